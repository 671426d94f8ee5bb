#include "support/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace oracle {

using symfuse::ComplexField;
using symfuse::GrayImage;
using symfuse::RealField;
using symfuse::SymmetryKernel;
using symfuse::detail::mirror_index;

namespace {

/// Direct 2-D correlation with a dense complex kernel, mirrored borders.
/// conjugate=true applies <f, k> = sum f * conj(k).
ComplexField correlate2d(const std::vector<std::complex<double>>& field, int w, int h,
                         const SymmetryKernel& kernel, bool conjugate) {
    ComplexField out(w, h);
    const int radius = kernel.half_width;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            std::complex<double> acc{};
            for (int dy = -radius; dy <= radius; ++dy) {
                for (int dx = -radius; dx <= radius; ++dx) {
                    const int sx = mirror_index(x + dx, w);
                    const int sy = mirror_index(y + dy, h);
                    const std::complex<double> k = kernel.at(dx, dy);
                    acc += field[static_cast<std::size_t>(sy) * w + sx] *
                           (conjugate ? std::conj(k) : k);
                }
            }
            out.at(x, y) = acc;
        }
    }
    return out;
}

std::vector<std::complex<double>> to_complex(const std::vector<double>& v) {
    return {v.begin(), v.end()};
}

/// Dense outer-product kernel from two 1-D tap arrays (row taps along x).
SymmetryKernel outer_kernel(const std::vector<double>& row_taps,
                            const std::vector<double>& col_taps) {
    SymmetryKernel k;
    k.half_width = static_cast<int>(row_taps.size()) / 2;
    const int side = 2 * k.half_width + 1;
    k.taps.resize(static_cast<std::size_t>(side) * side);
    for (int dy = 0; dy < side; ++dy) {
        for (int dx = 0; dx < side; ++dx) {
            k.taps[static_cast<std::size_t>(dy) * side + dx] = row_taps[dx] * col_taps[dy];
        }
    }
    return k;
}

}  // namespace

ComplexField orientation_tensor_dense(const GrayImage& img, double sigma1) {
    const auto smooth = symfuse::detail::gaussian_taps(sigma1);
    const auto deriv = symfuse::detail::gaussian_derivative_taps(sigma1);
    const auto pixels = to_complex(img.pixels);
    const ComplexField gx =
        correlate2d(pixels, img.width, img.height, outer_kernel(deriv, smooth), false);
    const ComplexField gy =
        correlate2d(pixels, img.width, img.height, outer_kernel(smooth, deriv), false);
    ComplexField z(img.width, img.height);
    for (std::size_t i = 0; i < z.size(); ++i) {
        const std::complex<double> grad(gx.values[i].real(), gy.values[i].real());
        z.values[i] = grad * grad;
    }
    return z;
}

ComplexField normalized_response_dense(const ComplexField& z, int order, double sigma2) {
    const SymmetryKernel hn = symfuse::build_symmetry_filter(order, sigma2);
    const SymmetryKernel h0 = symfuse::build_symmetry_filter(0, sigma2);
    const ComplexField num = correlate2d(z.values, z.width, z.height, hn, true);
    std::vector<std::complex<double>> mag(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) mag[i] = std::abs(z.values[i]);
    const ComplexField den = correlate2d(mag, z.width, z.height, h0, false);

    ComplexField out(z.width, z.height);
    const double num_scale = 1.0 / hn.magnitude_sum;
    const double den_scale = 1.0 / h0.magnitude_sum;
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double d = den.values[i].real() * den_scale;
        if (d < 1e-12) {
            out.values[i] = 0.0;
            continue;
        }
        std::complex<double> s = num.values[i] * num_scale / d;
        const double m = std::abs(s);
        if (m > 1.0) s /= m;
        out.values[i] = s;
    }
    return out;
}

double relative_error(const ComplexField& a, const ComplexField& b) {
    double max_diff = 0.0;
    double max_ref = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        max_diff = std::max(max_diff, std::abs(a.values[i] - b.values[i]));
        max_ref = std::max(max_ref, std::abs(b.values[i]));
    }
    return max_diff / std::max(max_ref, 1e-30);
}

}  // namespace oracle
