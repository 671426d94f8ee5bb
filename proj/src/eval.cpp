#include "symfuse/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace symfuse {

namespace {

void split_scores(const std::vector<Trial>& trials, std::vector<double>& genuine,
                  std::vector<double>& impostor) {
    for (const auto& t : trials) {
        (t.label == TrialLabel::genuine ? genuine : impostor).push_back(t.score);
    }
    if (genuine.empty() || impostor.empty()) {
        throw DataError("need at least one genuine and one impostor trial");
    }
}

ErrorRates rates_at(const std::vector<double>& genuine_sorted,
                    const std::vector<double>& impostor_sorted, double threshold) {
    ErrorRates r;
    const auto below_gen =
        std::lower_bound(genuine_sorted.begin(), genuine_sorted.end(), threshold) -
        genuine_sorted.begin();
    const auto below_imp =
        std::lower_bound(impostor_sorted.begin(), impostor_sorted.end(), threshold) -
        impostor_sorted.begin();
    r.frr = static_cast<double>(below_gen) / genuine_sorted.size();
    r.far = static_cast<double>(impostor_sorted.size() - below_imp) / impostor_sorted.size();
    return r;
}

}  // namespace

ErrorRates far_frr(const std::vector<Trial>& trials, double threshold) {
    std::vector<double> genuine, impostor;
    split_scores(trials, genuine, impostor);
    std::sort(genuine.begin(), genuine.end());
    std::sort(impostor.begin(), impostor.end());
    return rates_at(genuine, impostor, threshold);
}

double compute_eer(const std::vector<Trial>& trials) {
    std::vector<double> genuine, impostor;
    split_scores(trials, genuine, impostor);
    std::sort(genuine.begin(), genuine.end());
    std::sort(impostor.begin(), impostor.end());

    std::vector<double> thresholds;
    thresholds.reserve(genuine.size() + impostor.size() + 1);
    std::merge(genuine.begin(), genuine.end(), impostor.begin(), impostor.end(),
               std::back_inserter(thresholds));
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
    thresholds.push_back(thresholds.back() + 1.0);  // all-reject operating point

    double best_gap = std::numeric_limits<double>::infinity();
    double best_eer = 0.5;
    for (double t : thresholds) {  // ascending, so ties keep the lower threshold
        const ErrorRates r = rates_at(genuine, impostor, t);
        const double gap = std::abs(r.far - r.frr);
        if (gap < best_gap) {
            best_gap = gap;
            best_eer = 0.5 * (r.far + r.frr);
        }
    }
    return best_eer;
}

QualityGroupPartition quality_partition(const std::map<std::string, double>& finger_quality,
                                        int groups) {
    const int n = static_cast<int>(finger_quality.size());
    if (groups <= 0) throw DataError("quality_partition: group count must be positive");
    if (groups > n) {
        throw DataError("quality_partition: " + std::to_string(groups) + " groups for " +
                        std::to_string(n) + " fingers");
    }
    std::vector<std::pair<std::string, double>> order(finger_quality.begin(),
                                                      finger_quality.end());
    std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second < b.second : a.first < b.first;
    });

    const int base = n / groups;
    const int remainder = n % groups;
    QualityGroupPartition part;
    std::size_t next = 0;
    for (int g = 0; g < groups; ++g) {
        QualityGroup group;
        const int size = base + (g < remainder ? 1 : 0);  // extras land in the lowest groups
        double sum = 0.0;
        for (int i = 0; i < size; ++i, ++next) {
            group.fingers.push_back(order[next].first);
            sum += order[next].second;
        }
        group.mean_quality = sum / size;
        part.groups.push_back(std::move(group));
    }
    return part;
}

std::vector<std::optional<double>> per_group_eer(const QualityGroupPartition& partition,
                                                 const std::vector<Trial>& trials) {
    std::vector<std::optional<double>> out;
    out.reserve(partition.groups.size());
    for (const auto& group : partition.groups) {
        const std::set<std::string> members(group.fingers.begin(), group.fingers.end());
        std::vector<Trial> subset;
        for (const auto& t : trials) {
            if (members.count(t.finger_id)) subset.push_back(t);
        }
        bool has_genuine = false, has_impostor = false;
        for (const auto& t : subset) {
            (t.label == TrialLabel::genuine ? has_genuine : has_impostor) = true;
        }
        if (has_genuine && has_impostor) {
            out.push_back(compute_eer(subset));
        } else {
            out.push_back(std::nullopt);
        }
    }
    return out;
}

namespace {

struct UserSplit {
    std::vector<LabeledPanel> train_client;
    std::vector<LabeledPanel> train_impostor;
    std::vector<LabeledPanel> test;
};

UserSplit split_user(const UserPanels& user, const JackknifeOptions& opts) {
    std::vector<LabeledPanel> genuine, impostor;
    for (const auto& p : user.panels) (p.label == 1 ? genuine : impostor).push_back(p);
    const auto by_shot = [](const LabeledPanel& a, const LabeledPanel& b) {
        return a.shot_id < b.shot_id;
    };
    std::sort(genuine.begin(), genuine.end(), by_shot);
    std::sort(impostor.begin(), impostor.end(), by_shot);
    if (static_cast<int>(genuine.size()) < opts.train_genuine ||
        static_cast<int>(impostor.size()) < opts.train_impostor) {
        throw DataError("jackknife_eer: user '" + user.user_id + "' has " +
                        std::to_string(genuine.size()) + " genuine / " +
                        std::to_string(impostor.size()) + " impostor panels; needs " +
                        std::to_string(opts.train_genuine) + "/" +
                        std::to_string(opts.train_impostor) + " for training");
    }
    UserSplit s;
    s.train_client.assign(genuine.begin(), genuine.begin() + opts.train_genuine);
    s.train_impostor.assign(impostor.begin(), impostor.begin() + opts.train_impostor);
    s.test.assign(genuine.begin() + opts.train_genuine, genuine.end());
    s.test.insert(s.test.end(), impostor.begin() + opts.train_impostor, impostor.end());
    return s;
}

}  // namespace

double jackknife_eer(const std::vector<UserPanels>& users, const JackknifeOptions& opts) {
    if (users.size() < 2) throw DataError("jackknife_eer: need at least 2 users");
    std::vector<UserSplit> splits;
    splits.reserve(users.size());
    for (const auto& u : users) splits.push_back(split_user(u, opts));

    std::vector<Trial> pooled;
    std::vector<double> fold_eers;
    for (std::size_t leave = 0; leave < users.size(); ++leave) {
        std::vector<LabeledPanel> train_client, train_impostor;
        for (std::size_t v = 0; v < users.size(); ++v) {
            if (v == leave) continue;
            train_client.insert(train_client.end(), splits[v].train_client.begin(),
                                splits[v].train_client.end());
            train_impostor.insert(train_impostor.end(), splits[v].train_impostor.begin(),
                                  splits[v].train_impostor.end());
        }
        const TrainedSupervisor sup =
            train_supervisor(train_client, train_impostor, opts.fusion);
        std::vector<Trial> fold;
        for (const auto& panel : splits[leave].test) {
            const FusionDecision d = bayes_fuse(sup, panel.scores, opts.adaptive, opts.fusion);
            Trial t;
            t.score = d.fused;
            t.label = panel.label == 1 ? TrialLabel::genuine : TrialLabel::impostor;
            t.finger_id = users[leave].user_id;
            t.shot_id = panel.shot_id;
            fold.push_back(t);
        }
        if (opts.per_fold_average) {
            fold_eers.push_back(compute_eer(fold));
        } else {
            pooled.insert(pooled.end(), fold.begin(), fold.end());
        }
    }
    if (opts.per_fold_average) {
        double sum = 0.0;
        for (double e : fold_eers) sum += e;
        return sum / fold_eers.size();
    }
    return compute_eer(pooled);
}

}  // namespace symfuse
