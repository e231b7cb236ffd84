#include "mgtd/metrics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mgtd/attacks.hpp"

namespace mgtd {

using ordered_json = nlohmann::ordered_json;

std::string_view to_string(Task t) {
    return t == Task::binary ? "binary" : "ternary";
}

Task parse_task(std::string_view s) {
    if (s == "binary") return Task::binary;
    if (s == "ternary") return Task::ternary;
    throw DataError("unknown task: \"" + std::string(s) + "\" (want binary or ternary)");
}

ConfusionMatrix::ConfusionMatrix(std::size_t classes) : classes_(classes) {
    if (classes != 2 && classes != 3) throw DataError("confusion matrix supports 2 or 3 classes");
    counts_.assign(classes * classes, 0);
}

void ConfusionMatrix::add(std::size_t true_class, std::size_t predicted_class, std::size_t count) {
    if (true_class >= classes_ || predicted_class >= classes_) {
        throw DataError("confusion matrix index out of range");
    }
    counts_[true_class * classes_ + predicted_class] += count;
}

std::size_t ConfusionMatrix::at(std::size_t true_class, std::size_t predicted_class) const {
    return counts_[true_class * classes_ + predicted_class];
}

std::size_t ConfusionMatrix::total() const {
    std::size_t sum = 0;
    for (std::size_t c : counts_) sum += c;
    return sum;
}

double macro_f1(const ConfusionMatrix& cm) {
    if (cm.total() == 0) throw DataError("macro F1 of an empty confusion matrix");
    double total = 0.0;
    for (std::size_t k = 0; k < cm.classes(); ++k) {
        std::size_t tp = cm.at(k, k);
        std::size_t pred = 0, truth = 0;
        for (std::size_t i = 0; i < cm.classes(); ++i) {
            pred += cm.at(i, k);
            truth += cm.at(k, i);
        }
        const double p = pred > 0 ? static_cast<double>(tp) / static_cast<double>(pred) : 0.0;
        const double r = truth > 0 ? static_cast<double>(tp) / static_cast<double>(truth) : 0.0;
        total += (p + r) > 0 ? 2.0 * p * r / (p + r) : 0.0;
    }
    return total / static_cast<double>(cm.classes());
}

std::size_t binary_class_index(Label label) {
    if (label == Label::HWT) return 0;
    if (label == Label::LGT) return 1;
    throw DataError("binary task admits only HWT and LGT labels");
}

std::size_t ternary_class_index(Label label) {
    switch (label) {
        case Label::HWT: return 0;
        case Label::HLT: return 1;
        case Label::LGT: return 2;
    }
    return 0;
}

ConfusionMatrix binary_confusion(std::span<const double> scores, std::span<const Label> labels,
                                 double tau) {
    if (scores.size() != labels.size()) throw DataError("scores and labels differ in length");
    ConfusionMatrix cm(2);
    for (std::size_t i = 0; i < scores.size(); ++i) {
        cm.add(binary_class_index(labels[i]), binary_class_index(classify_binary(scores[i], tau)));
    }
    return cm;
}

ConfusionMatrix ternary_confusion(std::span<const double> scores, std::span<const Label> labels,
                                  const TernaryThreshold& thresholds) {
    if (scores.size() != labels.size()) throw DataError("scores and labels differ in length");
    ConfusionMatrix cm(3);
    for (std::size_t i = 0; i < scores.size(); ++i) {
        cm.add(ternary_class_index(labels[i]),
               ternary_class_index(classify_ternary(scores[i], thresholds)));
    }
    return cm;
}

double evaluate_f1_best(std::span<const double> scores, std::span<const Label> labels, double tau) {
    return macro_f1(binary_confusion(scores, labels, tau));
}

double evaluate_f1_fpr(std::span<const double> scores, std::span<const Label> labels, double tau_fpr) {
    return macro_f1(binary_confusion(scores, labels, tau_fpr));
}

double evaluate_f1_ternary(std::span<const double> scores, std::span<const Label> labels,
                           const TernaryThreshold& thresholds) {
    return macro_f1(ternary_confusion(scores, labels, thresholds));
}

namespace {

constexpr std::pair<std::string_view, Dimension> kDimensionNames[] = {
    {"in_distribution", Dimension::in_distribution},
    {"cross_domain", Dimension::cross_domain},
    {"cross_generator", Dimension::cross_generator},
    {"cross_language", Dimension::cross_language},
    {"cross_paraphrase", Dimension::cross_paraphrase},
    {"cross_perturbation", Dimension::cross_perturbation},
    {"cross_length", Dimension::cross_length},
    {"cross_operation", Dimension::cross_operation},
};

// Which metadata field this dimension slices on; empty = pooled.
std::string_view axis_field(Dimension d) {
    switch (d) {
        case Dimension::in_distribution: return "";
        case Dimension::cross_domain: return "domain";
        case Dimension::cross_generator: return "generator";
        case Dimension::cross_language: return "language";
        case Dimension::cross_paraphrase: return "attack";
        case Dimension::cross_perturbation: return "attack";
        case Dimension::cross_length: return "length_bucket";
        case Dimension::cross_operation: return "operation";
    }
    return "";
}

// HWT carries no generator/attack/operation, so those axes share all HWT
// samples across cells as the negative class.
bool axis_shares_hwt(Dimension d) {
    return d == Dimension::cross_generator || d == Dimension::cross_paraphrase ||
           d == Dimension::cross_perturbation || d == Dimension::cross_operation;
}

// Axis values occurring in the corpus, restricted to what the dimension
// admits and ordered canonically (generators sort by name).
std::vector<std::string> axis_values(Dimension d, const Corpus& corpus) {
    if (d == Dimension::in_distribution) return {"all"};

    std::vector<std::string> admissible;
    switch (d) {
        case Dimension::cross_domain:
            for (Domain v : kAllDomains) admissible.emplace_back(to_string(v));
            break;
        case Dimension::cross_language:
            for (Language v : kAllLanguages) admissible.emplace_back(to_string(v));
            break;
        case Dimension::cross_paraphrase:
            for (AttackKind k : kParaphraseKinds) admissible.emplace_back(to_string(k));
            break;
        case Dimension::cross_perturbation:
            for (AttackKind k : kPerturbationKinds) admissible.emplace_back(to_string(k));
            break;
        case Dimension::cross_length:
            for (LengthBucket b : kTokenBuckets) admissible.emplace_back(to_string(b));
            break;
        case Dimension::cross_operation:
            for (Operation op : kRefineOperations) admissible.emplace_back(to_string(op));
            break;
        default:
            break;  // cross_generator: any value present
    }

    std::vector<std::string> present;
    for (const Sample& s : corpus.samples) {
        const auto v = metadata_value(s, axis_field(d));
        if (!v) continue;
        if (std::find(present.begin(), present.end(), *v) == present.end()) present.push_back(*v);
    }

    if (admissible.empty()) {
        std::sort(present.begin(), present.end());
        return present;
    }
    std::vector<std::string> values;
    for (const std::string& v : admissible) {
        if (std::find(present.begin(), present.end(), v) != present.end()) values.push_back(v);
    }
    return values;
}

struct CellData {
    std::vector<double> scores;
    std::vector<Label> labels;
};

}  // namespace

std::string_view to_string(Dimension d) {
    for (const auto& [name, value] : kDimensionNames) {
        if (value == d) return name;
    }
    return "?";
}

Dimension parse_dimension(std::string_view s) {
    for (const auto& [name, value] : kDimensionNames) {
        if (name == s) return value;
    }
    throw DataError("unknown dimension: \"" + std::string(s) + "\"");
}

ScoreSet ScoreSet::from_scores(const std::vector<DetectorScore>& scores) {
    if (scores.empty()) throw DataError("empty score list");
    ScoreSet set;
    set.detector = scores.front().detector;
    set.orientation = scores.front().orientation;
    for (const auto& s : scores) {
        if (s.detector != set.detector) {
            throw DataError("score set mixes detectors \"" + set.detector + "\" and \"" +
                            s.detector + "\"");
        }
        if (!set.by_id.emplace(s.sample_id, s.score).second) {
            throw DataError("duplicate score for sample \"" + s.sample_id + "\"");
        }
    }
    return set;
}

DimensionResult run_dimension(const Corpus& corpus, Dimension dimension, const ScoreSet& scores,
                              Task task, double target_fpr) {
    const std::string_view field = axis_field(dimension);
    const bool share_hwt = axis_shares_hwt(dimension);

    const std::vector<std::string> keys = axis_values(dimension, corpus);

    auto cell_member = [&](const Sample& s, const std::string& key) {
        if (dimension == Dimension::in_distribution) return true;
        if (share_hwt && s.label == Label::HWT) return true;
        const auto v = metadata_value(s, field);
        return v.has_value() && *v == key;
    };

    auto oriented = [&](double raw) { return oriented_score(raw, scores.orientation); };

    auto collect = [&](const std::string& key, Split split) {
        CellData data;
        for (const Sample& s : corpus.samples) {
            if (s.split != split) continue;
            if (task == Task::binary && s.label == Label::HLT) continue;
            if (!cell_member(s, key)) continue;
            const auto it = scores.by_id.find(s.id);
            if (it == scores.by_id.end()) {
                throw DataError("no \"" + scores.detector + "\" score for sample \"" + s.id + "\"");
            }
            data.scores.push_back(oriented(it->second));
            data.labels.push_back(s.label);
        }
        return data;
    };

    auto has_class = [](const CellData& d, Label l) {
        return std::find(d.labels.begin(), d.labels.end(), l) != d.labels.end();
    };

    DimensionResult result;
    for (const std::string& train_key : keys) {
        const CellData train = collect(train_key, Split::train);
        if (train.scores.empty()) {
            if (dimension != Dimension::in_distribution) continue;  // axis value absent
        }

        const bool trainable =
            task == Task::binary
                ? has_class(train, Label::HWT) && has_class(train, Label::LGT)
                : has_class(train, Label::HWT) && has_class(train, Label::HLT) &&
                      has_class(train, Label::LGT);
        if (!trainable) {
            if (!train.scores.empty()) {
                result.skipped.push_back("train cell \"" + train_key +
                                         "\" lacks a class; cells skipped");
            }
            continue;
        }

        double tau_best = 0.0, tau_fpr = 0.0;
        TernaryThreshold best_pair, fpr_pair;
        if (task == Task::binary) {
            std::vector<std::uint8_t> positive;
            positive.reserve(train.labels.size());
            for (Label l : train.labels) positive.push_back(l == Label::LGT ? 1 : 0);
            tau_best = calibrate_binary_best(train.scores, positive);
            tau_fpr = calibrate_binary_fpr(train.scores, positive, target_fpr);
        } else {
            best_pair = calibrate_ternary(train.scores, train.labels);
            fpr_pair = calibrate_ternary_fpr(train.scores, train.labels, target_fpr);
        }

        for (const std::string& test_key : keys) {
            const CellData test = collect(test_key, Split::test);
            if (test.scores.empty()) {
                if (dimension != Dimension::in_distribution) continue;
                result.skipped.push_back("empty test cell \"" + test_key + "\"");
                continue;
            }
            EvalCell cell;
            cell.dimension = dimension;
            cell.train_key = train_key;
            cell.test_key = test_key;
            cell.detector = scores.detector;
            cell.train_count = train.scores.size();
            cell.test_count = test.scores.size();
            if (task == Task::binary) {
                cell.f1_best = evaluate_f1_best(test.scores, test.labels, tau_best);
                cell.f1_fpr = evaluate_f1_fpr(test.scores, test.labels, tau_fpr);
            } else {
                cell.f1_best = evaluate_f1_ternary(test.scores, test.labels, best_pair);
                cell.f1_fpr = evaluate_f1_ternary(test.scores, test.labels, fpr_pair);
            }
            result.cells.push_back(std::move(cell));
        }
    }
    return result;
}

std::vector<LeaderboardEntry> leaderboard(const std::vector<EvalCell>& cells) {
    // detector -> dimension -> accumulated sums
    std::map<std::string, std::map<Dimension, std::array<double, 3>>> sums;
    for (const EvalCell& c : cells) {
        auto& acc = sums[c.detector][c.dimension];
        acc[0] += c.f1_best;
        acc[1] += c.f1_fpr;
        acc[2] += 1.0;
    }

    std::vector<LeaderboardEntry> entries;
    for (const auto& [detector, dims] : sums) {
        LeaderboardEntry entry;
        entry.detector = detector;
        double best_total = 0.0, fpr_total = 0.0;
        for (const auto& [dim, acc] : dims) {
            const double mean_best = acc[0] / acc[2];
            const double mean_fpr = acc[1] / acc[2];
            entry.per_dimension[dim] = {mean_best, mean_fpr};
            best_total += mean_best;
            fpr_total += mean_fpr;
        }
        entry.avg_f1_best = best_total / static_cast<double>(dims.size());
        entry.avg_f1_fpr = fpr_total / static_cast<double>(dims.size());
        entries.push_back(std::move(entry));
    }

    std::sort(entries.begin(), entries.end(), [](const LeaderboardEntry& a, const LeaderboardEntry& b) {
        if (a.avg_f1_best != b.avg_f1_best) return a.avg_f1_best > b.avg_f1_best;
        return a.detector < b.detector;
    });
    for (std::size_t i = 0; i < entries.size(); ++i) entries[i].rank = static_cast<int>(i) + 1;
    return entries;
}

std::string cells_to_json(const std::vector<EvalCell>& cells) {
    ordered_json arr = ordered_json::array();
    for (const EvalCell& c : cells) {
        ordered_json j;
        j["dimension"] = to_string(c.dimension);
        j["train_key"] = c.train_key;
        j["test_key"] = c.test_key;
        j["detector"] = c.detector;
        j["f1_best"] = c.f1_best;
        j["f1_fpr"] = c.f1_fpr;
        j["train_count"] = c.train_count;
        j["test_count"] = c.test_count;
        arr.push_back(std::move(j));
    }
    return arr.dump(2);
}

std::string leaderboard_to_json(const std::vector<LeaderboardEntry>& entries) {
    ordered_json arr = ordered_json::array();
    for (const auto& e : entries) {
        ordered_json j;
        j["detector"] = e.detector;
        j["rank"] = e.rank;
        j["avg_f1_best"] = e.avg_f1_best;
        j["avg_f1_fpr"] = e.avg_f1_fpr;
        ordered_json dims = ordered_json::object();
        for (const auto& [dim, pair] : e.per_dimension) {
            dims[std::string(to_string(dim))] = {{"f1_best", pair.first}, {"f1_fpr", pair.second}};
        }
        j["dimensions"] = std::move(dims);
        arr.push_back(std::move(j));
    }
    return arr.dump(2);
}

std::string leaderboard_to_text(const std::vector<LeaderboardEntry>& entries) {
    // collect the dimensions that actually occur, in canonical order
    std::vector<Dimension> dims;
    for (Dimension d : kAllDimensions) {
        for (const auto& e : entries) {
            if (e.per_dimension.count(d) != 0) {
                dims.push_back(d);
                break;
            }
        }
    }

    auto pct = [](double v) {
        std::ostringstream os;
        os << std::fixed << std::setprecision(2) << v * 100.0;
        return os.str();
    };

    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> header{"detector"};
    for (Dimension d : dims) {
        header.push_back(std::string(to_string(d)) + " F1B");
        header.push_back(std::string(to_string(d)) + " F1F");
    }
    header.insert(header.end(), {"avg F1B", "avg F1F", "rank"});
    rows.push_back(header);

    for (const auto& e : entries) {
        std::vector<std::string> row{e.detector};
        for (Dimension d : dims) {
            const auto it = e.per_dimension.find(d);
            if (it == e.per_dimension.end()) {
                row.push_back("-");
                row.push_back("-");
            } else {
                row.push_back(pct(it->second.first));
                row.push_back(pct(it->second.second));
            }
        }
        row.push_back(pct(e.avg_f1_best));
        row.push_back(pct(e.avg_f1_fpr));
        row.push_back(std::to_string(e.rank));
        rows.push_back(std::move(row));
    }

    std::vector<std::size_t> width(rows.front().size(), 0);
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
    }
    std::ostringstream os;
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            os << std::setw(static_cast<int>(width[i])) << (i == 0 ? std::left : std::right)
               << row[i];
            os << (i + 1 == row.size() ? "\n" : "  ");
        }
    }
    return os.str();
}

}  // namespace mgtd
