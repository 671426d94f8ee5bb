#include "symfuse/symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace symfuse {

namespace {

constexpr double kEnergyEpsilon = 1e-12;   // zero-denominator rule of the normalized response
constexpr double kUnitTolerance = 1e-9;    // slack on the |s_n| <= 1 precondition of inhibit()

/// Correlates each row with `taps` (odd length), mirrored borders.
template <typename T>
std::vector<T> correlate_rows(const std::vector<T>& in, int w, int h,
                              const std::vector<double>& taps) {
    const int radius = static_cast<int>(taps.size()) / 2;
    std::vector<T> out(in.size());
    for (int y = 0; y < h; ++y) {
        const T* row = in.data() + static_cast<std::size_t>(y) * w;
        T* orow = out.data() + static_cast<std::size_t>(y) * w;
        for (int x = 0; x < w; ++x) {
            T acc{};
            for (int t = -radius; t <= radius; ++t) {
                acc += row[detail::mirror_index(x + t, w)] * taps[t + radius];
            }
            orow[x] = acc;
        }
    }
    return out;
}

/// Correlates each column with `taps` (odd length), mirrored borders.
template <typename T>
std::vector<T> correlate_cols(const std::vector<T>& in, int w, int h,
                              const std::vector<double>& taps) {
    const int radius = static_cast<int>(taps.size()) / 2;
    std::vector<T> out(in.size());
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            T acc{};
            for (int t = -radius; t <= radius; ++t) {
                const int yy = detail::mirror_index(y + t, h);
                acc += in[static_cast<std::size_t>(yy) * w + x] * taps[t + radius];
            }
            out[static_cast<std::size_t>(y) * w + x] = acc;
        }
    }
    return out;
}

template <typename T>
std::vector<T> correlate_separable(const std::vector<T>& in, int w, int h,
                                   const std::vector<double>& row_taps,
                                   const std::vector<double>& col_taps) {
    return correlate_cols(correlate_rows(in, w, h, row_taps), w, h, col_taps);
}

void require_kernel_fits(int taps, int w, int h, const char* what) {
    if (taps > w || taps > h) {
        throw NumericError(std::string(what) + ": kernel of length " + std::to_string(taps) +
                           " does not fit a " + std::to_string(w) + "x" + std::to_string(h) +
                           " image");
    }
}

int binomial(int n, int k) {
    long long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return static_cast<int>(r);
}

}  // namespace

RealField magnitude(const ComplexField& field) {
    RealField out(field.width, field.height);
    for (std::size_t i = 0; i < field.size(); ++i) out.values[i] = std::abs(field.values[i]);
    return out;
}

namespace detail {

std::vector<double> gaussian_taps(double sigma) {
    if (sigma <= 0) throw NumericError("gaussian_taps: sigma must be positive");
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> taps(2 * radius + 1);
    double sum = 0.0;
    for (int t = -radius; t <= radius; ++t) {
        taps[t + radius] = std::exp(-0.5 * t * t / (sigma * sigma));
        sum += taps[t + radius];
    }
    for (double& v : taps) v /= sum;
    return taps;
}

std::vector<double> gaussian_derivative_taps(double sigma) {
    if (sigma <= 0) throw NumericError("gaussian_derivative_taps: sigma must be positive");
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> taps(2 * radius + 1);
    double ramp = 0.0;  // response to f(t) = t; rescaled to 1 below
    for (int t = -radius; t <= radius; ++t) {
        taps[t + radius] = t * std::exp(-0.5 * t * t / (sigma * sigma));
        ramp += t * taps[t + radius];
    }
    for (double& v : taps) v /= ramp;
    return taps;
}

std::vector<double> moment_taps(double sigma, int degree) {
    if (sigma <= 0) throw NumericError("moment_taps: sigma must be positive");
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * sigma * sigma);
    std::vector<double> taps(2 * radius + 1);
    for (int t = -radius; t <= radius; ++t) {
        taps[t + radius] = std::pow(static_cast<double>(t), degree) * norm *
                           std::exp(-0.5 * t * t / (sigma * sigma));
    }
    return taps;
}

}  // namespace detail

SymmetryKernel build_symmetry_filter(int order, double sigma2) {
    if (sigma2 <= 0) throw NumericError("build_symmetry_filter: sigma2 must be positive");
    SymmetryKernel k;
    k.order = order;
    k.half_width = static_cast<int>(std::ceil(3.0 * sigma2));
    const int side = 2 * k.half_width + 1;
    k.taps.resize(static_cast<std::size_t>(side) * side);
    const double norm = 1.0 / (2.0 * std::numbers::pi * sigma2 * sigma2);
    const int n = std::abs(order);
    for (int dy = -k.half_width; dy <= k.half_width; ++dy) {
        for (int dx = -k.half_width; dx <= k.half_width; ++dx) {
            const double g =
                norm * std::exp(-0.5 * (dx * dx + dy * dy) / (sigma2 * sigma2));
            std::complex<double> base(dx, order >= 0 ? dy : -dy);
            std::complex<double> mono(1.0, 0.0);
            for (int i = 0; i < n; ++i) mono *= base;
            const std::size_t idx =
                static_cast<std::size_t>(dy + k.half_width) * side + (dx + k.half_width);
            k.taps[idx] = mono * g;
            k.magnitude_sum += std::abs(k.taps[idx]);
        }
    }
    return k;
}

FilterBank::FilterBank(double sigma1, double sigma2, std::vector<int> orders)
    : sigma1_(sigma1), sigma2_(sigma2), orders_(std::move(orders)) {
    if (sigma1_ <= 0 || sigma2_ <= 0) throw NumericError("FilterBank: scales must be positive");
    if (orders_.empty()) throw NumericError("FilterBank: order list must not be empty");
    for (std::size_t i = 0; i < orders_.size(); ++i) {
        for (std::size_t j = i + 1; j < orders_.size(); ++j) {
            if (orders_[i] == orders_[j]) throw NumericError("FilterBank: duplicate order");
        }
    }
    smooth_ = detail::gaussian_taps(sigma1_);
    derivative_ = detail::gaussian_derivative_taps(sigma1_);
    int max_abs = 0;
    for (int n : orders_) max_abs = std::max(max_abs, std::abs(n));
    moments_.reserve(max_abs + 1);
    for (int d = 0; d <= max_abs; ++d) moments_.push_back(detail::moment_taps(sigma2_, d));
    scales_.reserve(orders_.size());
    for (int n : orders_) scales_.push_back(1.0 / build_symmetry_filter(n, sigma2_).magnitude_sum);
    energy_scale_ = 1.0 / build_symmetry_filter(0, sigma2_).magnitude_sum;
}

double FilterBank::response_scale(int order) const {
    for (std::size_t i = 0; i < orders_.size(); ++i) {
        if (orders_[i] == order) return scales_[i];
    }
    throw NumericError("FilterBank: order " + std::to_string(order) + " not in bank");
}

ComplexField orientation_tensor(const GrayImage& img, double sigma1) {
    if (img.width < 1 || img.height < 1) throw NumericError("orientation_tensor: empty image");
    const auto smooth = detail::gaussian_taps(sigma1);
    const auto deriv = detail::gaussian_derivative_taps(sigma1);
    require_kernel_fits(static_cast<int>(deriv.size()), img.width, img.height,
                        "orientation_tensor");
    const auto gx = correlate_separable(img.pixels, img.width, img.height, deriv, smooth);
    const auto gy = correlate_separable(img.pixels, img.width, img.height, smooth, deriv);
    ComplexField z(img.width, img.height);
    for (std::size_t i = 0; i < z.size(); ++i) {
        const std::complex<double> grad(gx[i], gy[i]);
        z.values[i] = grad * grad;
    }
    return z;
}

namespace {

/// <z, h_n> realized as a sum of separable passes: conj(h_n) expands into
/// binomial terms x^k (-+i)^(n-k) y^(n-k) g(x) g(y).
std::vector<std::complex<double>> raw_response(const ComplexField& z, int order,
                                               const FilterBank& bank) {
    const int n = std::abs(order);
    // conj for n >= 0, identity for n < 0: conj(h_-n) = h_n.
    const std::complex<double> unit = order >= 0 ? std::complex<double>(0.0, -1.0)
                                                 : std::complex<double>(0.0, 1.0);
    std::vector<std::complex<double>> acc(z.size(), {0.0, 0.0});
    for (int k = 0; k <= n; ++k) {
        std::complex<double> coeff(static_cast<double>(binomial(n, k)), 0.0);
        for (int i = 0; i < n - k; ++i) coeff *= unit;
        const auto term = correlate_separable(z.values, z.width, z.height,
                                              bank.moment_taps(k), bank.moment_taps(n - k));
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += coeff * term[i];
    }
    return acc;
}

std::vector<double> energy_denominator(const ComplexField& z, const FilterBank& bank) {
    const RealField mag = magnitude(z);
    auto den = correlate_separable(mag.values, z.width, z.height, bank.moment_taps(0),
                                   bank.moment_taps(0));
    const double scale = bank.energy_scale();
    for (double& v : den) v *= scale;
    return den;
}

ComplexField divide_and_cap(const std::vector<std::complex<double>>& num,
                            const std::vector<double>& den, double scale, int w, int h) {
    ComplexField out(w, h);
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (den[i] < kEnergyEpsilon) {
            out.values[i] = 0.0;
            continue;
        }
        std::complex<double> s = num[i] * scale / den[i];
        const double m = std::abs(s);
        if (m > 1.0) s /= m;  // certainty saturates at 1
        out.values[i] = s;
    }
    return out;
}

}  // namespace

ComplexField normalized_response(const ComplexField& z, int order, const FilterBank& bank) {
    require_kernel_fits(static_cast<int>(bank.moment_taps(0).size()), z.width, z.height,
                        "normalized_response");
    const auto num = raw_response(z, order, bank);
    const auto den = energy_denominator(z, bank);
    return divide_and_cap(num, den, bank.response_scale(order), z.width, z.height);
}

std::vector<ComplexField> decompose(const ComplexField& z, const FilterBank& bank) {
    require_kernel_fits(static_cast<int>(bank.moment_taps(0).size()), z.width, z.height,
                        "decompose");
    const auto den = energy_denominator(z, bank);
    std::vector<ComplexField> out;
    out.reserve(bank.orders().size());
    for (int n : bank.orders()) {
        const auto num = raw_response(z, n, bank);
        out.push_back(divide_and_cap(num, den, bank.response_scale(n), z.width, z.height));
    }
    return out;
}

std::vector<ComplexField> inhibit(const std::vector<ComplexField>& responses) {
    if (responses.empty()) return {};
    const int w = responses.front().width;
    const int h = responses.front().height;
    for (const auto& r : responses) {
        if (r.width != w || r.height != h) throw NumericError("inhibit: field size mismatch");
        for (const auto& v : r.values) {
            if (std::abs(v) > 1.0 + kUnitTolerance) {
                throw NumericError("inhibit: response magnitude exceeds 1");
            }
        }
    }
    std::vector<ComplexField> out(responses.size(), ComplexField(w, h));
    for (std::size_t i = 0; i < responses.size(); ++i) {
        for (std::size_t p = 0; p < responses[i].size(); ++p) {
            double factor = 1.0;
            for (std::size_t k = 0; k < responses.size(); ++k) {
                if (k != i) factor *= 1.0 - std::abs(responses[k].values[p]);
            }
            out[i].values[p] = responses[i].values[p] * factor;
        }
    }
    return out;
}

RealField total_symmetry(const std::vector<ComplexField>& inhibited) {
    if (inhibited.empty()) throw NumericError("total_symmetry: no responses");
    const int w = inhibited.front().width;
    const int h = inhibited.front().height;
    RealField out(w, h);
    for (const auto& r : inhibited) {
        if (r.width != w || r.height != h) {
            throw NumericError("total_symmetry: field size mismatch");
        }
        for (std::size_t p = 0; p < out.size(); ++p) out.values[p] += std::abs(r.values[p]);
    }
    return out;
}

}  // namespace symfuse
