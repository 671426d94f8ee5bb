#pragma once

#include <cstdint>

#include "symfuse/image.hpp"

// Deterministic image inputs for tests.
namespace testgen {

symfuse::GrayImage random_image(int width, int height, std::uint64_t seed);

/// Adds N(0, sigma^2) to every pixel, clipped back into [0,1].
symfuse::GrayImage with_gaussian_noise(const symfuse::GrayImage& img, double sigma,
                                       std::uint64_t seed);

/// A parabolic core blended into a straight grating. The core fills the disc
/// of `core_radius` around the center; the transition annulus extends another
/// core_radius/2 outward.
symfuse::GrayImage core_in_grating(int size, double wavelength, double core_radius);

}  // namespace testgen
