#pragma once

#include <complex>
#include <vector>

#include "symfuse/image.hpp"

namespace symfuse {

/// Densely sampled complex symmetry kernel on a (2*half_width+1)^2 support.
struct SymmetryKernel {
    int order = 0;
    int half_width = 0;
    std::vector<std::complex<double>> taps;  // row-major, offset (dx,dy) at [(dy+R)*(2R+1)+(dx+R)]
    double magnitude_sum = 0.0;              // sum of |taps| over the support

    std::complex<double> at(int dx, int dy) const {
        const int side = 2 * half_width + 1;
        return taps[static_cast<std::size_t>(dy + half_width) * side + (dx + half_width)];
    }
};

/// Samples h_n = (x+iy)^n * g for n >= 0 and (x-iy)^|n| * g for n < 0,
/// where g is the 2-D Gaussian density of std sigma2, on a square support
/// of half-width ceil(3*sigma2).
SymmetryKernel build_symmetry_filter(int order, double sigma2);

/// Immutable separable filter set for one (sigma1, sigma2, orders) choice.
/// Holds the 1-D tap arrays for every pass plus the per-order scale factors
/// that keep the normalized responses within the unit disc.
class FilterBank {
public:
    FilterBank(double sigma1, double sigma2, std::vector<int> orders);

    double sigma1() const { return sigma1_; }
    double sigma2() const { return sigma2_; }
    const std::vector<int>& orders() const { return orders_; }

    const std::vector<double>& smooth_taps() const { return smooth_; }
    const std::vector<double>& derivative_taps() const { return derivative_; }
    /// t^degree * g(t) taps at sigma2, degree <= max |order|.
    const std::vector<double>& moment_taps(int degree) const { return moments_[degree]; }
    /// 1 / sum|h_n| over the sampled support.
    double response_scale(int order) const;
    /// 1 / sum h_0 (the energy normalizer of the denominator filter).
    double energy_scale() const { return energy_scale_; }

private:
    double sigma1_;
    double sigma2_;
    std::vector<int> orders_;
    std::vector<double> smooth_;      // Gaussian at sigma1, sums to 1
    std::vector<double> derivative_;  // Gaussian derivative at sigma1, unit ramp response
    std::vector<std::vector<double>> moments_;
    std::vector<double> scales_;      // aligned with orders_
    double energy_scale_ = 0.0;
};

/// z = (Dx f + i Dy f)^2 with derivatives from separable Gaussian-derivative
/// filtering at scale sigma1 and mirrored borders. arg(z) is the double-angle
/// orientation. Throws NumericError when the kernel does not fit the image.
ComplexField orientation_tensor(const GrayImage& img, double sigma1);

/// s_n = <z, h_n> / <|z|, h_0>, realized as separable filtering of z and |z|.
/// Pixels whose energy denominator falls below 1e-12 map to 0, and the
/// magnitude is capped at 1 (argument preserved).
ComplexField normalized_response(const ComplexField& z, int order, const FilterBank& bank);

/// All normalized responses of the bank's orders, sharing one denominator pass.
std::vector<ComplexField> decompose(const ComplexField& z, const FilterBank& bank);

/// s_n^I = s_n * prod_{k != n} (1 - |s_k|). Requires |s_n| <= 1 everywhere.
std::vector<ComplexField> inhibit(const std::vector<ComplexField>& responses);

/// s = sum_n |s_n^I|.
RealField total_symmetry(const std::vector<ComplexField>& inhibited);

namespace detail {
/// Reflected index (edge pixel repeated); valid for |i - clamp| < n.
inline int mirror_index(int i, int n) {
    if (i < 0) i = -i - 1;
    if (i >= n) i = 2 * n - i - 1;
    return i;
}
/// Gaussian density taps, normalized to sum 1. Half-width ceil(3*sigma).
std::vector<double> gaussian_taps(double sigma);
/// Antisymmetric derivative-of-Gaussian taps scaled for unit ramp response.
std::vector<double> gaussian_derivative_taps(double sigma);
/// t^degree * g(t) taps (g the 1-D Gaussian density at sigma, not renormalized).
std::vector<double> moment_taps(double sigma, int degree);
}  // namespace detail

}  // namespace symfuse
