#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "symfuse/errors.hpp"

namespace symfuse {

/// Grayscale image with intensities in [0,1], row-major.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<double> pixels;

    GrayImage() = default;
    GrayImage(int w, int h, double fill = 0.0)
        : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

    double& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
    std::size_t size() const { return pixels.size(); }
};

/// Per-pixel complex values (orientation tensor, symmetry responses).
struct ComplexField {
    int width = 0;
    int height = 0;
    std::vector<std::complex<double>> values;

    ComplexField() = default;
    ComplexField(int w, int h)
        : width(w), height(h), values(static_cast<std::size_t>(w) * h) {}

    std::complex<double>& at(int x, int y) {
        return values[static_cast<std::size_t>(y) * width + x];
    }
    std::complex<double> at(int x, int y) const {
        return values[static_cast<std::size_t>(y) * width + x];
    }
    std::size_t size() const { return values.size(); }
};

/// Per-pixel non-negative reals (magnitudes, total symmetry).
struct RealField {
    int width = 0;
    int height = 0;
    std::vector<double> values;

    RealField() = default;
    RealField(int w, int h, double fill = 0.0)
        : width(w), height(h), values(static_cast<std::size_t>(w) * h, fill) {}

    double& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
    double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
    std::size_t size() const { return values.size(); }
};

/// |field| taken pixel-wise.
RealField magnitude(const ComplexField& field);

}  // namespace symfuse
