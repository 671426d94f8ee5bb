#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "symfuse/image.hpp"
#include "symfuse/io.hpp"

namespace symfuse {

/// Renders f = (1 + cos(2 pi xi / wavelength)) / 2 where xi is the harmonic
/// coordinate whose double-angle orientation field is exp(i(n*phi + alpha)):
/// straight gratings for n = 0, a parabolic (core-like) pattern for n = 1,
/// circles (log-spirals for alpha != 0) for n = 2, and the mirrored
/// counterparts for negative n. The oscillation runs at exactly `wavelength`
/// pixels at radius size/4 from the center. Orders outside [-2, 2] are
/// rejected; half-integer powers use the principal branch, so odd orders
/// carry a line-ending seam along the negative x axis.
GrayImage generate_test_pattern(int order, double alpha, int size, double wavelength);

struct SyntheticExpert {
    std::string id;
    double bias = 0.0;
    double sigma = 0.1;
};

enum class QualityModel {
    none,    // every quality is 1 (normal)
    coupled  // qualities drawn uniformly; noise variance is sigma^2 * s with s = 1/q^2
};

struct PanelSpec {
    std::vector<SyntheticExpert> experts;
    QualityModel quality_model = QualityModel::none;
    double quality_min = 1.0;
    double quality_max = 1.0;
    double claim_quality = -1.0;  // < 0 means quality_max
    int users = 1;
    int genuine_per_user = 0;
    int impostor_per_user = 0;
    bool clamp = true;  // clip scores into [0,1]
};

/// Labeled score records for `users` identities: x = y - z with
/// z ~ N(bias, sigma^2 * s). Deterministic for a fixed seed (draw order:
/// user, shot, expert).
std::vector<ScoreRecord> generate_synthetic_panel(const PanelSpec& spec, std::uint64_t seed);

/// Key=value panel description, header "symfuse-synth v1".
PanelSpec load_panel_spec(const std::string& path);

}  // namespace symfuse
