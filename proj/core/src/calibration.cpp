#include "mgtd/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

namespace mgtd {

using ordered_json = nlohmann::ordered_json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> sorted_distinct(std::span<const double> scores) {
    std::vector<double> distinct(scores.begin(), scores.end());
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    return distinct;
}

// Count of values < cut in an ascending array.
std::size_t count_below(const std::vector<double>& sorted, double cut) {
    return static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), cut) -
                                    sorted.begin());
}

double macro_f1_from_counts(const std::size_t m[3][3]) {
    double total = 0.0;
    for (int k = 0; k < 3; ++k) {
        const double tp = static_cast<double>(m[k][k]);
        const double pred = static_cast<double>(m[0][k] + m[1][k] + m[2][k]);
        const double truth = static_cast<double>(m[k][0] + m[k][1] + m[k][2]);
        const double p = pred > 0 ? tp / pred : 0.0;
        const double r = truth > 0 ? tp / truth : 0.0;
        total += (p + r) > 0 ? 2.0 * p * r / (p + r) : 0.0;
    }
    return total / 3.0;
}

std::size_t label_row(Label label) {
    switch (label) {
        case Label::HWT: return 0;
        case Label::HLT: return 1;
        case Label::LGT: return 2;
    }
    return 0;
}

struct TernaryPrep {
    std::vector<double> cuts;
    // below[c][i]: count of class-c scores strictly below cuts[i]
    std::vector<std::size_t> below[3];
    std::size_t class_total[3] = {0, 0, 0};
};

TernaryPrep prepare_ternary(std::span<const double> scores, std::span<const Label> labels) {
    if (scores.size() != labels.size()) throw DataError("scores and labels differ in length");
    std::vector<double> per_class[3];
    for (std::size_t i = 0; i < scores.size(); ++i) {
        per_class[label_row(labels[i])].push_back(scores[i]);
    }
    for (int c = 0; c < 3; ++c) {
        if (per_class[c].empty()) {
            throw DataError("ternary calibration needs all three classes; missing " +
                            std::string(to_string(static_cast<Label>(c))));
        }
        std::sort(per_class[c].begin(), per_class[c].end());
    }

    TernaryPrep prep;
    prep.cuts = candidate_cuts(scores, /*infinite_sentinels=*/true);
    for (int c = 0; c < 3; ++c) {
        prep.class_total[c] = per_class[c].size();
        prep.below[c].reserve(prep.cuts.size());
        for (double cut : prep.cuts) {
            prep.below[c].push_back(count_below(per_class[c], cut));
        }
    }
    return prep;
}

double pair_macro_f1(const TernaryPrep& prep, std::size_t i, std::size_t j) {
    std::size_t m[3][3];
    for (int c = 0; c < 3; ++c) {
        m[c][0] = prep.below[c][i];
        m[c][1] = prep.below[c][j] - prep.below[c][i];
        m[c][2] = prep.class_total[c] - prep.below[c][j];
    }
    return macro_f1_from_counts(m);
}

}  // namespace

std::vector<double> candidate_cuts(std::span<const double> scores, bool infinite_sentinels) {
    if (scores.empty()) throw DataError("cannot derive cuts from an empty score list");
    const std::vector<double> distinct = sorted_distinct(scores);

    std::vector<double> cuts;
    cuts.reserve(distinct.size() + 1);
    cuts.push_back(infinite_sentinels ? -kInf : distinct.front() - 1.0);

    std::vector<double> mids;
    mids.reserve(distinct.size());
    for (std::size_t i = 0; i + 1 < distinct.size(); ++i) {
        mids.push_back(distinct[i] + (distinct[i + 1] - distinct[i]) / 2.0);
    }
    if (mids.size() > kTernaryExactLimit) {
        // quantile grid: 1001 evenly spaced midpoints, order preserved
        std::vector<double> grid;
        grid.reserve(1001);
        for (std::size_t g = 0; g <= 1000; ++g) {
            grid.push_back(mids[g * (mids.size() - 1) / 1000]);
        }
        grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
        mids = std::move(grid);
    }
    cuts.insert(cuts.end(), mids.begin(), mids.end());
    cuts.push_back(infinite_sentinels ? kInf : distinct.back() + 1.0);
    return cuts;
}

double calibrate_binary_best(std::span<const double> scores, std::span<const std::uint8_t> positive) {
    if (scores.size() != positive.size()) throw DataError("scores and labels differ in length");
    std::vector<double> pos, neg;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        (positive[i] ? pos : neg).push_back(scores[i]);
    }
    if (pos.empty() || neg.empty()) {
        throw DataError("binary calibration needs at least one positive and one negative");
    }
    std::sort(pos.begin(), pos.end());
    std::sort(neg.begin(), neg.end());

    double best_tau = 0.0;
    double best_j = -kInf;
    for (double tau : candidate_cuts(scores, /*infinite_sentinels=*/false)) {
        const double tpr =
            static_cast<double>(pos.size() - count_below(pos, tau)) / static_cast<double>(pos.size());
        const double fpr =
            static_cast<double>(neg.size() - count_below(neg, tau)) / static_cast<double>(neg.size());
        const double j = tpr - fpr;
        if (j > best_j) {  // strict: ties keep the smallest cut
            best_j = j;
            best_tau = tau;
        }
    }
    return best_tau;
}

double calibrate_binary_fpr(std::span<const double> scores, std::span<const std::uint8_t> positive,
                            double target) {
    if (scores.size() != positive.size()) throw DataError("scores and labels differ in length");
    if (!(target >= 0.0) || target >= 1.0) {
        throw DataError("target FPR must be in [0, 1), got " + std::to_string(target));
    }
    std::vector<double> neg;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!positive[i]) neg.push_back(scores[i]);
    }
    if (neg.empty()) throw DataError("FPR calibration needs at least one negative");
    std::sort(neg.begin(), neg.end());

    for (double tau : candidate_cuts(scores, /*infinite_sentinels=*/false)) {
        const double fpr =
            static_cast<double>(neg.size() - count_below(neg, tau)) / static_cast<double>(neg.size());
        if (fpr <= target) return tau;
    }
    // unreachable: the max+1 sentinel has FPR 0
    return neg.back() + 1.0;
}

Label classify_binary(double score, double tau) {
    return score < tau ? Label::HWT : Label::LGT;
}

TernaryThreshold calibrate_ternary(std::span<const double> scores, std::span<const Label> labels) {
    const TernaryPrep prep = prepare_ternary(scores, labels);
    const std::size_t k = prep.cuts.size();

    TernaryThreshold best{prep.cuts.front(), prep.cuts.front()};
    double best_f1 = -1.0;
    for (std::size_t i = 0; i < k; ++i) {
        for (std::size_t j = i; j < k; ++j) {
            const double f1 = pair_macro_f1(prep, i, j);
            if (f1 > best_f1) {  // strict: ties keep the smallest (t1, t2)
                best_f1 = f1;
                best = TernaryThreshold{prep.cuts[i], prep.cuts[j]};
            }
        }
    }
    return best;
}

TernaryThreshold calibrate_ternary_fpr(std::span<const double> scores, std::span<const Label> labels,
                                       double target) {
    if (!(target >= 0.0) || target >= 1.0) {
        throw DataError("target FPR must be in [0, 1), got " + std::to_string(target));
    }
    const TernaryPrep prep = prepare_ternary(scores, labels);
    const std::size_t k = prep.cuts.size();
    const double n_hwt = static_cast<double>(prep.class_total[0]);

    std::size_t i = k - 1;  // +inf always satisfies the bound
    for (std::size_t idx = 0; idx < k; ++idx) {
        const double fpr = (n_hwt - static_cast<double>(prep.below[0][idx])) / n_hwt;
        if (fpr <= target) {
            i = idx;
            break;
        }
    }

    TernaryThreshold best{prep.cuts[i], prep.cuts[i]};
    double best_f1 = -1.0;
    for (std::size_t j = i; j < k; ++j) {
        const double f1 = pair_macro_f1(prep, i, j);
        if (f1 > best_f1) {
            best_f1 = f1;
            best = TernaryThreshold{prep.cuts[i], prep.cuts[j]};
        }
    }
    return best;
}

Label classify_ternary(double score, const TernaryThreshold& thresholds) {
    if (!(thresholds.t1 <= thresholds.t2)) {
        throw DataError("ternary thresholds must satisfy t1 <= t2");
    }
    if (score < thresholds.t1) return Label::HWT;
    if (score < thresholds.t2) return Label::HLT;
    return Label::LGT;
}

namespace {

ordered_json encode_threshold(double value) {
    if (value == kInf) return "+inf";
    if (value == -kInf) return "-inf";
    return value;
}

double decode_threshold(const ordered_json& j, const char* key) {
    const auto& v = j.at(key);
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s == "+inf" || s == "inf") return kInf;
        if (s == "-inf") return -kInf;
        throw DataError(std::string("bad threshold value for ") + key + ": \"" + s + "\"");
    }
    return v.get<double>();
}

}  // namespace

std::string threshold_model_to_json(const ThresholdModel& model) {
    ordered_json j;
    j["detector"] = model.detector;
    j["kind"] = model.kind;
    if (model.kind == "binary") {
        j["tau_best"] = encode_threshold(model.binary.tau_best);
        j["tau_fpr"] = encode_threshold(model.binary.tau_fpr);
        j["target_fpr"] = model.binary.target_fpr;
    } else if (model.kind == "ternary") {
        j["t1"] = encode_threshold(model.ternary.t1);
        j["t2"] = encode_threshold(model.ternary.t2);
    } else {
        throw DataError("threshold model kind must be binary or ternary, got \"" + model.kind + "\"");
    }
    return j.dump(2);
}

ThresholdModel parse_threshold_model(const std::string& json_text) {
    ordered_json j;
    try {
        j = ordered_json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("invalid threshold model JSON: ") + e.what());
    }
    ThresholdModel model;
    model.detector = j.value("detector", "");
    model.kind = j.value("kind", "");
    if (model.kind == "binary") {
        model.binary.tau_best = decode_threshold(j, "tau_best");
        model.binary.tau_fpr = decode_threshold(j, "tau_fpr");
        model.binary.target_fpr = j.value("target_fpr", 0.01);
    } else if (model.kind == "ternary") {
        model.ternary.t1 = decode_threshold(j, "t1");
        model.ternary.t2 = decode_threshold(j, "t2");
        if (!(model.ternary.t1 <= model.ternary.t2)) {
            throw DataError("threshold model violates t1 <= t2");
        }
    } else {
        throw DataError("threshold model kind must be binary or ternary, got \"" + model.kind + "\"");
    }
    return model;
}

void save_threshold_model(const ThresholdModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write threshold model: " + path);
    out << threshold_model_to_json(model) << '\n';
    if (!out) throw DataError("write failed: " + path);
}

ThresholdModel load_threshold_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open threshold model: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_threshold_model(buffer.str());
}

}  // namespace mgtd
