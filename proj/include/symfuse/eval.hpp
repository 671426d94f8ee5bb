#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "symfuse/fusion.hpp"

namespace symfuse {

enum class TrialLabel { genuine, impostor };

struct Trial {
    double score = 0.0;
    TrialLabel label = TrialLabel::impostor;
    std::string finger_id;
    std::string shot_id;
};

struct ErrorRates {
    double far = 0.0;  // fraction of impostor scores >= threshold
    double frr = 0.0;  // fraction of genuine scores < threshold
};

struct QualityGroup {
    std::vector<std::string> fingers;
    double mean_quality = 0.0;  // mean of the members' genuine-trial qualities
};

/// Equally sized (up to remainder) groups of increasing quality, I first.
struct QualityGroupPartition {
    std::vector<QualityGroup> groups;
};

ErrorRates far_frr(const std::vector<Trial>& trials, double threshold);

/// (FAR+FRR)/2 at the threshold minimizing |FAR-FRR| over the score support;
/// ties resolve to the lower threshold.
double compute_eer(const std::vector<Trial>& trials);

/// Sorts fingers ascending by mean genuine quality (ties by id) and cuts
/// contiguous chunks; the remainder goes to the lowest groups, one each.
QualityGroupPartition quality_partition(const std::map<std::string, double>& finger_quality,
                                        int groups);

/// compute_eer restricted to each group's trials (keyed by Trial::finger_id);
/// a group missing one class reports no value instead of aborting.
std::vector<std::optional<double>> per_group_eer(const QualityGroupPartition& partition,
                                                 const std::vector<Trial>& trials);

struct JackknifeOptions {
    bool adaptive = false;
    bool per_fold_average = false;  // default pools all folds into one EER
    int train_genuine = 4;
    int train_impostor = 4;
    FusionOptions fusion;
};

/// One user's labeled panels; the first train_genuine genuine and
/// train_impostor impostor panels (by shot id) feed training, the rest are
/// tested when the user is left out.
struct UserPanels {
    std::string user_id;
    std::vector<LabeledPanel> panels;
};

/// Leave-one-user-out: trains on everyone else's training panels, fuses the
/// left-out user's test panels, and computes the EER over the pooled test
/// scores (or the mean of per-fold EERs).
double jackknife_eer(const std::vector<UserPanels>& users, const JackknifeOptions& opts = {});

}  // namespace symfuse
