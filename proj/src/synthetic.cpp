#include "symfuse/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

namespace symfuse {

GrayImage generate_test_pattern(int order, double alpha, int size, double wavelength) {
    if (size < 32) throw DataError("generate_test_pattern: size must be >= 32");
    if (wavelength < 4) throw DataError("generate_test_pattern: wavelength must be >= 4 pixels");
    if (order < -2 || order > 2) {
        throw DataError("generate_test_pattern: order must lie in [-2, 2]");
    }
    const double cx = size / 2;
    const double cy = size / 2;
    const double ref_radius = size / 4.0;  // oscillation runs at `wavelength` here
    const std::complex<double> phase = std::polar(1.0, -alpha / 2.0);
    const double two_pi = 2.0 * std::numbers::pi;

    GrayImage img(size, size);
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            const std::complex<double> w(x - cx, y - cy);
            double xi;
            if (order == 2) {
                // log case: circles, log-spirals for alpha != 0
                const std::complex<double> wl = std::polar(std::max(std::abs(w), 0.5), std::arg(w));
                xi = (phase * ref_radius * std::log(wl / ref_radius)).real();
            } else {
                const double k = (2.0 - order) / 2.0;
                const double coeff = std::pow(ref_radius, 1.0 - k) / k;
                xi = (phase * coeff * std::pow(w, k)).real();
            }
            img.at(x, y) = 0.5 * (1.0 + std::cos(two_pi * xi / wavelength));
        }
    }
    return img;
}

std::vector<ScoreRecord> generate_synthetic_panel(const PanelSpec& spec, std::uint64_t seed) {
    if (spec.experts.empty()) throw DataError("generate_synthetic_panel: no experts");
    if (spec.users < 1) throw DataError("generate_synthetic_panel: need at least one user");
    if (spec.quality_model == QualityModel::coupled &&
        !(spec.quality_min > 0 && spec.quality_max >= spec.quality_min)) {
        throw DataError("generate_synthetic_panel: bad quality range");
    }
    const double claim_q = spec.claim_quality < 0 ? spec.quality_max : spec.claim_quality;

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(spec.quality_min, spec.quality_max);

    std::vector<ScoreRecord> records;
    records.reserve(static_cast<std::size_t>(spec.users) *
                    (spec.genuine_per_user + spec.impostor_per_user) * spec.experts.size());
    char shot_buf[64];
    for (int u = 0; u < spec.users; ++u) {
        const std::string claim = "u" + std::to_string(u + 1);
        const int total = spec.genuine_per_user + spec.impostor_per_user;
        for (int s = 0; s < total; ++s) {
            const bool genuine = s < spec.genuine_per_user;
            const double y = genuine ? 1.0 : 0.0;
            std::snprintf(shot_buf, sizeof(shot_buf), "%s-%c%04d", claim.c_str(),
                          genuine ? 'g' : 'i', genuine ? s + 1 : s - spec.genuine_per_user + 1);
            for (const auto& expert : spec.experts) {
                double quality = 1.0;
                double claim_quality = 1.0;
                double variance_scale = 1.0;
                if (spec.quality_model == QualityModel::coupled) {
                    quality = uniform(rng);
                    claim_quality = claim_q;
                    variance_scale = score_variance(quality_index(quality, claim_quality));
                }
                const double z = expert.bias +
                                 expert.sigma * std::sqrt(variance_scale) * gauss(rng);
                double x = y - z;
                if (spec.clamp) x = std::clamp(x, 0.0, 1.0);
                ScoreRecord r;
                r.expert_id = expert.id;
                r.shot_id = shot_buf;
                r.claim_id = claim;
                r.score = x;
                r.quality = quality;
                r.claim_quality = claim_quality;
                r.label = genuine ? "genuine" : "impostor";
                records.push_back(std::move(r));
            }
        }
    }
    return records;
}

namespace {

double to_double(const std::string& s, const std::string& ctx) {
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw DataError(ctx + ": not a number: '" + s + "'");
    }
    if (pos != s.size()) throw DataError(ctx + ": trailing garbage in '" + s + "'");
    return v;
}

}  // namespace

PanelSpec load_panel_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line) || line != "symfuse-synth v1") {
        throw DataError("'" + path + "': expected header 'symfuse-synth v1'");
    }
    PanelSpec spec;
    std::map<std::string, SyntheticExpert> experts;
    std::vector<std::string> order;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw DataError("'" + path + "': expected key=value, got '" + line + "'");
        }
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        if (key.rfind("expert.", 0) == 0) {
            const auto last_dot = key.rfind('.');
            const std::string id = key.substr(7, last_dot - 7);
            const std::string param = key.substr(last_dot + 1);
            if (id.empty()) throw DataError("'" + path + "': bad key " + key);
            auto [it, inserted] = experts.try_emplace(id);
            if (inserted) {
                it->second.id = id;
                order.push_back(id);
            }
            if (param == "bias") it->second.bias = to_double(value, path);
            else if (param == "sigma") it->second.sigma = to_double(value, path);
            else throw DataError("'" + path + "': unknown key " + key);
        } else if (key == "quality.model") {
            if (value == "none") spec.quality_model = QualityModel::none;
            else if (value == "coupled") spec.quality_model = QualityModel::coupled;
            else throw DataError("'" + path + "': quality.model must be none or coupled");
        } else if (key == "quality.min") {
            spec.quality_min = to_double(value, path);
        } else if (key == "quality.max") {
            spec.quality_max = to_double(value, path);
        } else if (key == "quality.claim") {
            spec.claim_quality = to_double(value, path);
        } else if (key == "users") {
            spec.users = static_cast<int>(to_double(value, path));
        } else if (key == "shots.genuine") {
            spec.genuine_per_user = static_cast<int>(to_double(value, path));
        } else if (key == "shots.impostor") {
            spec.impostor_per_user = static_cast<int>(to_double(value, path));
        } else if (key == "clamp") {
            spec.clamp = to_double(value, path) != 0;
        } else {
            throw DataError("'" + path + "': unknown key '" + key + "'");
        }
    }
    for (const auto& id : order) spec.experts.push_back(experts[id]);
    if (spec.experts.empty()) throw DataError("'" + path + "': no experts defined");
    return spec;
}

}  // namespace symfuse
