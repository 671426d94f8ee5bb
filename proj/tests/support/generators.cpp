#include "support/generators.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "symfuse/synthetic.hpp"

namespace testgen {

using symfuse::GrayImage;

GrayImage random_image(int width, int height, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    GrayImage img(width, height);
    for (auto& p : img.pixels) p = dist(rng);
    return img;
}

GrayImage with_gaussian_noise(const GrayImage& img, double sigma, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, sigma);
    GrayImage out = img;
    if (sigma > 0.0) {
        for (auto& p : out.pixels) p = std::clamp(p + dist(rng), 0.0, 1.0);
    }
    return out;
}

GrayImage core_in_grating(int size, double wavelength, double core_radius) {
    const GrayImage grating = symfuse::generate_test_pattern(0, 0.0, size, wavelength);
    const GrayImage core = symfuse::generate_test_pattern(1, 0.0, size, wavelength);
    GrayImage out(size, size);
    const double cx = size / 2, cy = size / 2;
    const double r0 = core_radius;
    const double r1 = core_radius * 1.5;
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            const double r = std::hypot(x - cx, y - cy);
            double weight;  // 1 inside the core disc, 0 outside the annulus
            if (r <= r0) {
                weight = 1.0;
            } else if (r >= r1) {
                weight = 0.0;
            } else {
                const double t = (r - r0) / (r1 - r0);
                weight = 0.5 * (1.0 + std::cos(t * 3.14159265358979323846));
            }
            out.at(x, y) = weight * core.at(x, y) + (1.0 - weight) * grating.at(x, y);
        }
    }
    return out;
}

}  // namespace testgen
