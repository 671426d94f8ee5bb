#include "symfuse/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

namespace symfuse {

double quality_index(double shot_quality, double claim_quality) {
    if (shot_quality < 0 || claim_quality < 0) {
        throw NumericError("quality_index: qualities must be >= 0");
    }
    return std::min(shot_quality, claim_quality);
}

double score_variance(double quality, double quality_floor) {
    if (quality < 0) throw NumericError("score_variance: quality must be >= 0");
    const double q = std::max(quality, quality_floor);
    return 1.0 / (q * q);
}

double to_supervisor_scale(double overall_quality, double quality_max) {
    return overall_quality * quality_max;
}

namespace {

struct SideStats {
    SupervisorParams params;
    bool negative_alpha = false;
};

/// Bias and variance of one expert on one side: alpha from the scatter of the
/// errors z = y - x weighted by the raw score variances, then the
/// precision-weighted mean over sigma^2 = s * alpha.
SideStats estimate_side(const std::vector<double>& errors, const std::vector<double>& variances,
                        const FusionOptions& opts) {
    const std::size_t n = errors.size();
    double sum_zz_s = 0.0, sum_z_s = 0.0, sum_inv_s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        sum_zz_s += errors[j] * errors[j] / variances[j];
        sum_z_s += errors[j] / variances[j];
        sum_inv_s += 1.0 / variances[j];
    }
    SideStats out;
    double alpha = (sum_zz_s - sum_z_s * sum_z_s / sum_inv_s) / (static_cast<double>(n) - 3.0);
    if (alpha < 0.0) out.negative_alpha = true;
    if (alpha < opts.alpha_floor) alpha = opts.alpha_floor;
    out.params.alpha = alpha;
    out.params.bias = sum_z_s / sum_inv_s;
    out.params.variance = alpha / sum_inv_s;
    return out;
}

std::vector<std::string> collect_expert_ids(const std::vector<LabeledPanel>& a,
                                            const std::vector<LabeledPanel>& b) {
    std::set<std::string> ids;
    for (const auto* panels : {&a, &b}) {
        for (const auto& p : *panels) {
            for (const auto& s : p.scores) ids.insert(s.expert_id);
        }
    }
    return {ids.begin(), ids.end()};
}

/// Per-expert (error, variance) series for one side; throws on incomplete panels.
void side_series(const std::vector<LabeledPanel>& panels, double y,
                 const std::vector<std::string>& ids, const FusionOptions& opts,
                 std::vector<std::vector<double>>& errors,
                 std::vector<std::vector<double>>& variances) {
    errors.assign(ids.size(), {});
    variances.assign(ids.size(), {});
    for (const auto& p : panels) {
        std::map<std::string, const ExpertScore*> by_id;
        for (const auto& s : p.scores) {
            if (!by_id.emplace(s.expert_id, &s).second) {
                throw DataError("train_supervisor: duplicate expert '" + s.expert_id +
                                "' in shot '" + p.shot_id + "'");
            }
        }
        for (std::size_t i = 0; i < ids.size(); ++i) {
            const auto it = by_id.find(ids[i]);
            if (it == by_id.end()) {
                throw DataError("train_supervisor: shot '" + p.shot_id + "' misses expert '" +
                                ids[i] + "'");
            }
            const ExpertScore& s = *it->second;
            errors[i].push_back(y - s.score);
            variances[i].push_back(
                score_variance(quality_index(s.quality, s.claim_quality), opts.quality_floor));
        }
    }
}

}  // namespace

TrainedSupervisor train_supervisor(const std::vector<LabeledPanel>& client_panels,
                                   const std::vector<LabeledPanel>& impostor_panels,
                                   const FusionOptions& opts) {
    if (client_panels.size() < 4 || impostor_panels.size() < 4) {
        throw DataError("train_supervisor: need at least 4 shots per side, got " +
                        std::to_string(client_panels.size()) + " client and " +
                        std::to_string(impostor_panels.size()) + " impostor");
    }
    const auto ids = collect_expert_ids(client_panels, impostor_panels);

    std::vector<std::vector<double>> client_err, client_var, imp_err, imp_var;
    side_series(client_panels, 1.0, ids, opts, client_err, client_var);
    side_series(impostor_panels, 0.0, ids, opts, imp_err, imp_var);

    TrainedSupervisor sup;
    sup.n_client = static_cast<int>(client_panels.size());
    sup.n_impostor = static_cast<int>(impostor_panels.size());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        ExpertModel m;
        m.id = ids[i];
        const SideStats c = estimate_side(client_err[i], client_var[i], opts);
        const SideStats im = estimate_side(imp_err[i], imp_var[i], opts);
        m.client = c.params;
        m.impostor = im.params;
        if (c.negative_alpha) {
            sup.warnings.push_back("expert '" + m.id + "': negative client alpha floored");
        }
        if (im.negative_alpha) {
            sup.warnings.push_back("expert '" + m.id + "': negative impostor alpha floored");
        }
        sup.experts.push_back(std::move(m));
    }
    return sup;
}

std::vector<Calibrated> calibrate(const TrainedSupervisor& sup, Branch side,
                                  const std::vector<double>& scores,
                                  const std::vector<double>& variances) {
    if (scores.size() != sup.experts.size() || variances.size() != sup.experts.size()) {
        throw DataError("calibrate: inputs not aligned with the trained experts");
    }
    std::vector<Calibrated> out(sup.experts.size());
    for (std::size_t i = 0; i < sup.experts.size(); ++i) {
        const SupervisorParams& p =
            side == Branch::client ? sup.experts[i].client : sup.experts[i].impostor;
        out[i].mean = scores[i] + p.bias;
        out[i].variance = variances[i] * p.alpha + p.variance;
    }
    return out;
}

double combine(const std::vector<Calibrated>& calibrated) {
    if (calibrated.empty()) throw DataError("combine: empty panel");
    double num = 0.0, den = 0.0;
    for (const auto& c : calibrated) {
        if (c.variance <= 0.0) throw NumericError("combine: non-positive calibrated variance");
        num += c.mean / c.variance;
        den += 1.0 / c.variance;
    }
    return num / den;
}

FusionDecision decide(double client_estimate, double impostor_estimate) {
    FusionDecision d;
    d.client_estimate = client_estimate;
    d.impostor_estimate = impostor_estimate;
    if (std::abs(1.0 - client_estimate) - std::abs(impostor_estimate) < 0.0) {
        d.branch = Branch::client;
        d.fused = client_estimate;
    } else {
        d.branch = Branch::impostor;
        d.fused = impostor_estimate;
    }
    return d;
}

FusionDecision bayes_fuse(const TrainedSupervisor& sup, const std::vector<ExpertScore>& panel,
                          bool adaptive, const FusionOptions& opts) {
    std::map<std::string, const ExpertScore*> by_id;
    for (const auto& s : panel) {
        if (!by_id.emplace(s.expert_id, &s).second) {
            throw DataError("bayes_fuse: duplicate expert '" + s.expert_id + "' in panel");
        }
    }
    for (const auto& s : panel) {
        bool known = false;
        for (const auto& e : sup.experts) known = known || e.id == s.expert_id;
        if (!known) throw DataError("bayes_fuse: unknown expert '" + s.expert_id + "'");
    }
    std::vector<double> scores(sup.experts.size());
    std::vector<double> variances(sup.experts.size());
    for (std::size_t i = 0; i < sup.experts.size(); ++i) {
        const auto it = by_id.find(sup.experts[i].id);
        if (it == by_id.end()) {
            throw DataError("bayes_fuse: panel misses expert '" + sup.experts[i].id + "'");
        }
        scores[i] = it->second->score;
        variances[i] =
            adaptive ? score_variance(quality_index(it->second->quality,
                                                    it->second->claim_quality),
                                      opts.quality_floor)
                     : 1.0;
    }
    const double mc = combine(calibrate(sup, Branch::client, scores, variances));
    const double mi = combine(calibrate(sup, Branch::impostor, scores, variances));
    return decide(mc, mi);
}

double fuse_sum(const std::vector<double>& scores) {
    if (scores.empty()) throw DataError("fuse_sum: empty panel");
    return std::accumulate(scores.begin(), scores.end(), 0.0) / scores.size();
}

double fuse_max(const std::vector<double>& scores) {
    if (scores.empty()) throw DataError("fuse_max: empty panel");
    return *std::max_element(scores.begin(), scores.end());
}

double apply_rule(FusionRule rule, const std::vector<double>& scores) {
    return rule == FusionRule::sum ? fuse_sum(scores) : fuse_max(scores);
}

CascadeResult cascaded_fuse(const CascadeConfig& cfg, double certainty,
                            const std::vector<std::function<double()>>& evaluators) {
    if (evaluators.empty()) throw DataError("cascaded_fuse: no experts");
    if (certainty < 0) throw NumericError("cascaded_fuse: certainty must be >= 0");
    if (cfg.thresholds.size() + 1 != evaluators.size()) {
        throw DataError("cascaded_fuse: need exactly one threshold per secondary expert");
    }
    for (std::size_t i = 1; i < cfg.thresholds.size(); ++i) {
        if (!(cfg.thresholds[i] < cfg.thresholds[i - 1])) {
            throw NumericError("cascaded_fuse: thresholds must be strictly decreasing");
        }
    }
    std::vector<double> collected;
    for (std::size_t i = 0; i < evaluators.size(); ++i) {
        if (i > 0 && !(certainty < cfg.thresholds[i - 1])) break;
        try {
            collected.push_back(evaluators[i]());
        } catch (const std::exception& e) {
            throw DataError("cascaded_fuse: expert " + std::to_string(i + 1) +
                            " failed: " + e.what());
        }
    }
    CascadeResult r;
    r.experts_used = static_cast<int>(collected.size());
    r.fused = apply_rule(cfg.rule, collected);
    return r;
}

std::vector<double> default_thresholds(int expert_count, double best_quality) {
    if (expert_count < 2) throw DataError("default_thresholds: need at least 2 experts");
    if (best_quality <= 0) throw NumericError("default_thresholds: best quality must be > 0");
    std::vector<double> taus(expert_count - 1);
    double tau = best_quality / 2.0;
    for (auto& t : taus) {
        t = tau;
        tau /= 2.0;
    }
    return taus;
}

double expected_execution_fraction(int expert_count) {
    if (expert_count < 1) throw DataError("expected_execution_fraction: need >= 1 expert");
    return (2.0 - std::pow(2.0, 1.0 - expert_count)) / expert_count;
}

}  // namespace symfuse
