#pragma once

#include <functional>
#include <string>
#include <vector>

#include "symfuse/errors.hpp"

namespace symfuse {

/// One expert's opinion on one shot.
struct ExpertScore {
    std::string expert_id;
    double score = 0.0;          // x, in [0,1]
    double quality = 1.0;        // Q for this shot, in [0, q_max]
    double claim_quality = 1.0;  // average enrollment quality of the claimed identity
};

/// A complete panel of expert opinions for one shot, optionally labeled.
struct LabeledPanel {
    std::string shot_id;
    int label = 0;  // true authenticity y: 1 client, 0 impostor
    std::vector<ExpertScore> scores;
};

struct SupervisorParams {
    double bias = 0.0;      // M
    double variance = 0.0;  // V
    double alpha = 0.0;
};

struct ExpertModel {
    std::string id;
    SupervisorParams client;
    SupervisorParams impostor;
};

/// Per-expert bias statistics for the client and impostor supervisors.
/// Immutable after training; shareable across concurrent fuse calls.
struct TrainedSupervisor {
    std::vector<ExpertModel> experts;  // sorted by id
    int n_client = 0;
    int n_impostor = 0;
    std::vector<std::string> warnings;
};

struct FusionOptions {
    double quality_floor = 0.05;  // caps the score variance at 400 for zero quality
    double alpha_floor = 1e-8;
    double quality_max = 2.0;     // supervisor quality scale; 1 is normal quality
};

enum class Branch { client, impostor };

struct FusionDecision {
    double fused = 0.0;   // conciliated overall score M''
    Branch branch = Branch::impostor;
    double client_estimate = 0.0;    // M''_C
    double impostor_estimate = 0.0;  // M''_I
};

struct Calibrated {
    double mean = 0.0;      // M'
    double variance = 0.0;  // V'
};

enum class FusionRule { sum, max };

struct CascadeConfig {
    std::vector<double> thresholds;  // tau_1 > tau_2 > ... > tau_{m-1}
    FusionRule rule = FusionRule::max;
};

struct CascadeResult {
    double fused = 0.0;
    int experts_used = 0;
};

/// q = min(Q_shot, Q_claim).
double quality_index(double shot_quality, double claim_quality);

/// s = 1 / max(q, floor)^2.
double score_variance(double quality, double quality_floor = 0.05);

/// Maps an overall image quality in [0,1] onto the supervisor scale [0, q_max].
double to_supervisor_scale(double overall_quality, double quality_max = 2.0);

/// Estimates per-expert bias/variance/alpha on each side from labeled panels.
/// Score variances come from the panels' quality fields; panels without
/// quality information carry 1 (normal quality) and hence s = 1. Requires at
/// least 4 shots per side and a complete expert panel on every shot.
TrainedSupervisor train_supervisor(const std::vector<LabeledPanel>& client_panels,
                                   const std::vector<LabeledPanel>& impostor_panels,
                                   const FusionOptions& opts = {});

/// M'_i = x_i + M_i, V'_i = s_i * alpha_i + V_i on the chosen side.
/// x and s are aligned with sup.experts.
std::vector<Calibrated> calibrate(const TrainedSupervisor& sup, Branch side,
                                  const std::vector<double>& scores,
                                  const std::vector<double>& variances);

/// Inverse-variance weighted mean of the calibrated estimates.
double combine(const std::vector<Calibrated>& calibrated);

/// Eq-10 conciliation: client branch iff |1 - Mc| - |Mi| < 0 (ties go impostor).
FusionDecision decide(double client_estimate, double impostor_estimate);

/// Calibrates and combines both supervisors for one panel and decides.
/// adaptive uses s = score_variance(quality_index(Q, Q_claim)); otherwise s = 1.
FusionDecision bayes_fuse(const TrainedSupervisor& sup, const std::vector<ExpertScore>& panel,
                          bool adaptive, const FusionOptions& opts = {});

double fuse_sum(const std::vector<double>& scores);
double fuse_max(const std::vector<double>& scores);
double apply_rule(FusionRule rule, const std::vector<double>& scores);

/// Evaluates expert 1 always and expert i >= 2 iff certainty < tau_{i-1};
/// fuses the collected scores with the configured rule.
CascadeResult cascaded_fuse(const CascadeConfig& cfg, double certainty,
                            const std::vector<std::function<double()>>& evaluators);

/// tau_1 = best_quality/2, tau_i = tau_{i-1}/2 (expert_count - 1 thresholds).
std::vector<double> default_thresholds(int expert_count, double best_quality);

/// (2 - 2^(1-m)) / m: expected fraction of (expert, trial) executions under
/// the halving schedule and uniformly distributed quality.
double expected_execution_fraction(int expert_count);

}  // namespace symfuse
