#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "symfuse/eval.hpp"
#include "symfuse/fusion.hpp"
#include "symfuse/image.hpp"
#include "symfuse/quality.hpp"

namespace symfuse {

/// Loads an 8-bit grayscale PGM (P2 or P5) or PNG; intensities are divided
/// by 255. Unsupported depths and truncated files raise DataError.
GrayImage load_image(const std::string& path);

GrayImage read_pgm(std::istream& in);
void write_pgm(const GrayImage& img, const std::string& path);

/// One row of the score interchange CSV
/// (expert_id,shot_id,claim_id,score,quality,claim_quality,label).
struct ScoreRecord {
    std::string expert_id;
    std::string shot_id;
    std::string claim_id;
    double score = 0.0;
    double quality = 1.0;
    double claim_quality = 1.0;
    std::string label = "unknown";  // genuine | impostor | unknown
};

/// Rejects rows with scores outside [0,1] or negative qualities.
std::vector<ScoreRecord> read_score_csv(const std::string& path);
std::vector<ScoreRecord> read_score_csv(std::istream& in);
void write_score_csv(const std::vector<ScoreRecord>& records, const std::string& path);
void write_score_csv(const std::vector<ScoreRecord>& records, std::ostream& out);

/// Groups records into per-shot panels (every expert present exactly once).
/// Labeled=true keeps only genuine/impostor rows and fails on unknown labels.
std::vector<LabeledPanel> panels_from_records(const std::vector<ScoreRecord>& records,
                                              bool labeled);

/// Groups labeled panels by claim id for the jackknife protocol.
std::vector<UserPanels> users_from_records(const std::vector<ScoreRecord>& records);

/// Trials for the evaluation commands: one trial per record, finger = claim id.
std::vector<Trial> trials_from_records(const std::vector<ScoreRecord>& records);

/// Mean Eq-15 quality index of the genuine records per claim id.
std::map<std::string, double> genuine_quality_by_finger(
    const std::vector<ScoreRecord>& records);

/// Plain-text supervisor model, header "symfuse-model v1", one key=value line
/// per parameter with 17 significant digits.
void save_model(const TrainedSupervisor& sup, const std::string& path);
TrainedSupervisor load_model(const std::string& path);

/// Key=value run configuration (header "symfuse-config v1"); unknown keys are
/// rejected.
struct RunConfig {
    QualityConfig quality;
    FusionOptions fusion;
    bool adaptive = false;
    std::vector<double> cascade_thresholds;
    FusionRule cascade_rule = FusionRule::max;
    int eval_groups = 5;
    bool jackknife_per_fold = false;
};

RunConfig load_run_config(const std::string& path);

}  // namespace symfuse
