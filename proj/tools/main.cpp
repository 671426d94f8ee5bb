#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "symfuse/eval.hpp"
#include "symfuse/fusion.hpp"
#include "symfuse/io.hpp"
#include "symfuse/quality.hpp"
#include "symfuse/synthetic.hpp"

namespace {

using namespace symfuse;

std::string roman(int n) {
    static const char* ones[] = {"", "I", "II", "III", "IV", "V", "VI", "VII", "VIII", "IX"};
    static const char* tens[] = {"", "X", "XX", "XXX", "XL", "L"};
    if (n < 1 || n > 59) return std::to_string(n);
    return std::string(tens[n / 10]) + ones[n % 10];
}

std::vector<ScoreRecord> records_for_expert(const std::vector<ScoreRecord>& records,
                                            const std::string& expert) {
    std::set<std::string> ids;
    for (const auto& r : records) ids.insert(r.expert_id);
    if (expert.empty()) {
        if (ids.size() > 1) {
            throw DataError("scores carry " + std::to_string(ids.size()) +
                            " experts; pick one with --expert");
        }
        return records;
    }
    if (!ids.count(expert)) throw DataError("no records for expert '" + expert + "'");
    std::vector<ScoreRecord> out;
    for (const auto& r : records) {
        if (r.expert_id == expert) out.push_back(r);
    }
    return out;
}

void write_quality_map(const QualityReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << "row,col,s,r,q,interesting\n";
    char buf[160];
    for (int row = 0; row < report.quality.rows; ++row) {
        for (int col = 0; col < report.quality.cols; ++col) {
            std::snprintf(buf, sizeof(buf), "%d,%d,%.9g,%.9g,%.9g,%d\n", row, col,
                          report.symmetry.at(col, row), report.correlation.at(col, row),
                          report.quality.at(col, row), report.interest.at(col, row) ? 1 : 0);
            out << buf;
        }
    }
    if (!out) throw DataError("cannot write '" + path + "'");
}

/// Label and claim id of each shot, for passing through to fused outputs.
struct ShotInfo {
    std::map<std::string, std::pair<std::string, std::string>> by_shot;  // label, claim

    explicit ShotInfo(const std::vector<ScoreRecord>& records) {
        for (const auto& r : records) by_shot.emplace(r.shot_id, std::make_pair(r.label, r.claim_id));
    }
    const std::string& label(const std::string& shot) const { return by_shot.at(shot).first; }
    const std::string& claim(const std::string& shot) const { return by_shot.at(shot).second; }
};

int run(int argc, char** argv) {
    CLI::App app{"fingerprint quality estimation and multialgorithm score fusion"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path, "key=value run configuration");

    // quality <image> [--map OUT.csv]
    auto* quality_cmd = app.add_subcommand("quality", "assess a fingerprint image");
    std::string quality_image, quality_map_path;
    quality_cmd->add_option("image", quality_image, "PGM or PNG image")->required();
    quality_cmd->add_option("--map", quality_map_path, "write the block map CSV here");

    // synth pattern / synth scores
    auto* synth_cmd = app.add_subcommand("synth", "synthetic inputs");
    synth_cmd->require_subcommand(1);
    auto* pattern_cmd = synth_cmd->add_subcommand("pattern", "symmetry test pattern");
    int pat_order = 0, pat_size = 128;
    double pat_alpha = 0.0, pat_wavelength = 8.0;
    std::string pat_out;
    pattern_cmd->add_option("--order", pat_order, "symmetry order in [-2,2]");
    pattern_cmd->add_option("--alpha", pat_alpha, "class member (pattern orientation)");
    pattern_cmd->add_option("--size", pat_size, "image side in pixels");
    pattern_cmd->add_option("--wavelength", pat_wavelength, "ridge wavelength in pixels");
    pattern_cmd->add_option("--out", pat_out, "output PGM")->required();

    auto* scores_cmd = synth_cmd->add_subcommand("scores", "synthetic expert score panel");
    std::string synth_spec, synth_out;
    std::uint64_t synth_seed = 1;
    scores_cmd->add_option("--spec", synth_spec, "panel spec (symfuse-synth v1)")->required();
    scores_cmd->add_option("--seed", synth_seed, "RNG seed");
    scores_cmd->add_option("--out", synth_out, "output CSV")->required();

    // fuse train / fuse run
    auto* fuse_cmd = app.add_subcommand("fuse", "Bayesian and simple score fusion");
    fuse_cmd->require_subcommand(1);
    auto* train_cmd = fuse_cmd->add_subcommand("train", "train the Bayesian supervisor");
    std::string train_scores, train_out;
    train_cmd->add_option("--scores", train_scores, "labeled score CSV")->required();
    train_cmd->add_option("--out", train_out, "model file")->required();

    auto* run_cmd = fuse_cmd->add_subcommand("run", "fuse score panels");
    std::string run_model, run_scores, run_mode = "bayes", run_out;
    run_cmd->add_option("--model", run_model, "trained model (bayes modes)");
    run_cmd->add_option("--scores", run_scores, "score CSV")->required();
    run_cmd->add_option("--mode", run_mode, "bayes|bayes-adaptive|sum|max");
    run_cmd->add_option("--out", run_out, "output CSV")->required();

    // cascade run
    auto* cascade_cmd = app.add_subcommand("cascade", "quality-triggered cascaded fusion");
    cascade_cmd->require_subcommand(1);
    auto* cascade_run = cascade_cmd->add_subcommand("run", "run the cascade over score panels");
    std::string cas_scores, cas_out, cas_rule = "max", cas_thresholds, cas_experts;
    cascade_run->add_option("--scores", cas_scores, "score CSV")->required();
    cascade_run->add_option("--thresholds", cas_thresholds, "t1,t2,... strictly decreasing");
    cascade_run->add_option("--rule", cas_rule, "max|sum");
    cascade_run->add_option("--experts", cas_experts, "expert order, primary first");
    cascade_run->add_option("--out", cas_out, "output CSV")->required();

    // eval eer / eval groups / eval jackknife
    auto* eval_cmd = app.add_subcommand("eval", "error-rate evaluation");
    eval_cmd->require_subcommand(1);
    auto* eer_cmd = eval_cmd->add_subcommand("eer", "equal error rate");
    std::string eer_scores, eer_expert;
    eer_cmd->add_option("--scores", eer_scores, "labeled score CSV")->required();
    eer_cmd->add_option("--expert", eer_expert, "expert id to evaluate");

    auto* groups_cmd = eval_cmd->add_subcommand("groups", "per-quality-group EER");
    std::string grp_scores, grp_expert, grp_out;
    int grp_k = 5;
    groups_cmd->add_option("--scores", grp_scores, "labeled score CSV")->required();
    groups_cmd->add_option("--k", grp_k, "number of quality groups");
    groups_cmd->add_option("--expert", grp_expert, "expert id to evaluate");
    groups_cmd->add_option("--out", grp_out, "write results CSV here (default stdout)");

    auto* jack_cmd = eval_cmd->add_subcommand("jackknife", "leave-one-user-out EER");
    std::string jack_scores, jack_mode = "bayes";
    bool jack_per_fold = false;
    int jack_train_genuine = 4, jack_train_impostor = 4;
    jack_cmd->add_option("--scores", jack_scores, "labeled score CSV")->required();
    jack_cmd->add_option("--mode", jack_mode, "bayes|bayes-adaptive");
    jack_cmd->add_flag("--per-fold", jack_per_fold, "average per-fold EERs instead of pooling");
    jack_cmd->add_option("--train-genuine", jack_train_genuine, "genuine shots per user");
    jack_cmd->add_option("--train-impostor", jack_train_impostor, "impostor shots per user");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }

    RunConfig cfg;
    if (!config_path.empty()) cfg = load_run_config(config_path);

    if (quality_cmd->parsed()) {
        const GrayImage img = load_image(quality_image);
        const QualityReport report = assess_fingerprint(img, cfg.quality);
        if (!quality_map_path.empty()) write_quality_map(report, quality_map_path);
        std::printf("Q=%.6f\n", report.overall);
        return 0;
    }

    if (pattern_cmd->parsed()) {
        write_pgm(generate_test_pattern(pat_order, pat_alpha, pat_size, pat_wavelength),
                  pat_out);
        return 0;
    }

    if (scores_cmd->parsed()) {
        const PanelSpec spec = load_panel_spec(synth_spec);
        write_score_csv(generate_synthetic_panel(spec, synth_seed), synth_out);
        return 0;
    }

    if (train_cmd->parsed()) {
        const auto records = read_score_csv(train_scores);
        const auto panels = panels_from_records(records, true);
        std::vector<LabeledPanel> client, impostor;
        for (const auto& p : panels) (p.label == 1 ? client : impostor).push_back(p);
        const TrainedSupervisor sup = train_supervisor(client, impostor, cfg.fusion);
        for (const auto& w : sup.warnings) std::cerr << "warning: " << w << "\n";
        save_model(sup, train_out);
        std::printf("experts=%zu nC=%d nI=%d\n", sup.experts.size(), sup.n_client,
                    sup.n_impostor);
        return 0;
    }

    if (run_cmd->parsed()) {
        if (run_mode != "bayes" && run_mode != "bayes-adaptive" && run_mode != "sum" &&
            run_mode != "max") {
            std::cerr << "--mode must be bayes, bayes-adaptive, sum or max\n";
            return 1;
        }
        const auto records = read_score_csv(run_scores);
        const ShotInfo shots(records);
        const auto panels = panels_from_records(records, false);
        TrainedSupervisor sup;
        const bool bayes = run_mode == "bayes" || run_mode == "bayes-adaptive";
        if (bayes) {
            if (run_model.empty()) {
                std::cerr << "--model is required for the bayes modes\n";
                return 1;
            }
            sup = load_model(run_model);
        }
        std::vector<ScoreRecord> out;
        out.reserve(panels.size());
        for (const auto& p : panels) {
            double fused;
            if (bayes) {
                fused = bayes_fuse(sup, p.scores, run_mode == "bayes-adaptive", cfg.fusion).fused;
            } else {
                std::vector<double> xs;
                for (const auto& s : p.scores) xs.push_back(s.score);
                fused = run_mode == "sum" ? fuse_sum(xs) : fuse_max(xs);
            }
            ScoreRecord r;
            r.expert_id = "fused";
            r.shot_id = p.shot_id;
            r.claim_id = shots.claim(p.shot_id);
            r.score = fused;
            r.label = shots.label(p.shot_id);
            out.push_back(std::move(r));
        }
        write_score_csv(out, run_out);
        return 0;
    }

    if (cascade_run->parsed()) {
        if (cas_rule != "max" && cas_rule != "sum") {
            std::cerr << "--rule must be max or sum\n";
            return 1;
        }
        const auto records = read_score_csv(cas_scores);
        const ShotInfo shots(records);
        const auto panels = panels_from_records(records, false);
        if (panels.empty()) throw DataError("no score panels");

        std::vector<std::string> expert_order;
        if (!cas_experts.empty()) {
            std::string id;
            std::istringstream ss(cas_experts);
            while (std::getline(ss, id, ',')) expert_order.push_back(id);
        } else {
            std::set<std::string> ids;
            for (const auto& r : records) ids.insert(r.expert_id);
            expert_order.assign(ids.begin(), ids.end());
        }

        CascadeConfig cc;
        cc.rule = cas_rule == "sum" ? FusionRule::sum : FusionRule::max;
        if (!cas_thresholds.empty()) {
            std::string part;
            std::istringstream ss(cas_thresholds);
            while (std::getline(ss, part, ',')) cc.thresholds.push_back(std::stod(part));
        } else if (!cfg.cascade_thresholds.empty()) {
            cc.thresholds = cfg.cascade_thresholds;
        } else if (expert_order.size() > 1) {
            cc.thresholds =
                default_thresholds(static_cast<int>(expert_order.size()), cfg.fusion.quality_max);
        }

        std::vector<long> executions(expert_order.size(), 0);
        std::vector<ScoreRecord> out;
        out.reserve(panels.size());
        for (const auto& p : panels) {
            std::map<std::string, const ExpertScore*> by_id;
            for (const auto& s : p.scores) by_id[s.expert_id] = &s;
            std::vector<std::function<double()>> evaluators;
            for (std::size_t i = 0; i < expert_order.size(); ++i) {
                const auto it = by_id.find(expert_order[i]);
                if (it == by_id.end()) {
                    throw DataError("shot '" + p.shot_id + "' misses expert '" +
                                    expert_order[i] + "'");
                }
                const ExpertScore* s = it->second;
                evaluators.emplace_back([s] { return s->score; });
            }
            const ExpertScore* primary = by_id.at(expert_order.front());
            const double certainty = quality_index(primary->quality, primary->claim_quality);
            const CascadeResult res = cascaded_fuse(cc, certainty, evaluators);
            for (int i = 0; i < res.experts_used; ++i) ++executions[i];
            ScoreRecord r;
            r.expert_id = "cascade";
            r.shot_id = p.shot_id;
            r.claim_id = shots.claim(p.shot_id);
            r.score = res.fused;
            r.label = shots.label(p.shot_id);
            out.push_back(std::move(r));
        }
        write_score_csv(out, cas_out);
        long total = 0;
        for (std::size_t i = 0; i < expert_order.size(); ++i) {
            std::printf("expert %s executions: %.6f\n", expert_order[i].c_str(),
                        static_cast<double>(executions[i]) / panels.size());
            total += executions[i];
        }
        std::printf("executions fraction: %.6f\n",
                    static_cast<double>(total) / (expert_order.size() * panels.size()));
        return 0;
    }

    if (eer_cmd->parsed()) {
        const auto records = records_for_expert(read_score_csv(eer_scores), eer_expert);
        std::printf("EER=%.6f\n", compute_eer(trials_from_records(records)));
        return 0;
    }

    if (groups_cmd->parsed()) {
        const auto all_records = read_score_csv(grp_scores);
        const auto records = records_for_expert(all_records, grp_expert);
        const int k = groups_cmd->count("--k") ? grp_k : cfg.eval_groups;
        const auto qualities = genuine_quality_by_finger(records);
        const auto partition = quality_partition(qualities, k);
        const auto trials = trials_from_records(records);
        const auto eers = per_group_eer(partition, trials);

        std::ostringstream csv;
        csv << "group,n_genuine,n_impostor,eer\n";
        for (std::size_t g = 0; g < partition.groups.size(); ++g) {
            const std::set<std::string> members(partition.groups[g].fingers.begin(),
                                                partition.groups[g].fingers.end());
            long n_gen = 0, n_imp = 0;
            for (const auto& t : trials) {
                if (!members.count(t.finger_id)) continue;
                (t.label == TrialLabel::genuine ? n_gen : n_imp)++;
            }
            csv << roman(static_cast<int>(g) + 1) << ',' << n_gen << ',' << n_imp << ',';
            if (eers[g]) {
                char buf[32];
                std::snprintf(buf, sizeof(buf), "%.6f", *eers[g]);
                csv << buf;
            }
            csv << "\n";
        }
        long n_gen = 0, n_imp = 0;
        for (const auto& t : trials) (t.label == TrialLabel::genuine ? n_gen : n_imp)++;
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.6f", compute_eer(trials));
        csv << "all," << n_gen << ',' << n_imp << ',' << buf << "\n";

        if (grp_out.empty()) {
            std::cout << csv.str();
        } else {
            std::ofstream out(grp_out);
            if (!out) throw DataError("cannot write '" + grp_out + "'");
            out << csv.str();
        }
        return 0;
    }

    if (jack_cmd->parsed()) {
        if (jack_mode != "bayes" && jack_mode != "bayes-adaptive") {
            std::cerr << "--mode must be bayes or bayes-adaptive\n";
            return 1;
        }
        const auto records = read_score_csv(jack_scores);
        JackknifeOptions opts;
        opts.adaptive = jack_mode == "bayes-adaptive";
        opts.per_fold_average = jack_per_fold || cfg.jackknife_per_fold;
        opts.train_genuine = jack_train_genuine;
        opts.train_impostor = jack_train_impostor;
        opts.fusion = cfg.fusion;
        std::printf("EER=%.6f\n", jackknife_eer(users_from_records(records), opts));
        return 0;
    }

    std::cerr << "no subcommand\n";
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const CLI::Error& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const symfuse::DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const symfuse::NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
