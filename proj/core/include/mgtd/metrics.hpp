#pragma once

#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "mgtd/calibration.hpp"
#include "mgtd/corpus.hpp"
#include "mgtd/scoring.hpp"

namespace mgtd {

enum class Task { binary, ternary };

std::string_view to_string(Task t);
Task parse_task(std::string_view s);

// counts[true][predicted]; K is 2 (HWT, LGT) or 3 (HWT, HLT, LGT).
class ConfusionMatrix {
public:
    explicit ConfusionMatrix(std::size_t classes);

    void add(std::size_t true_class, std::size_t predicted_class, std::size_t count = 1);
    std::size_t at(std::size_t true_class, std::size_t predicted_class) const;
    std::size_t classes() const { return classes_; }
    std::size_t total() const;

private:
    std::size_t classes_;
    std::vector<std::size_t> counts_;
};

// Unweighted mean of per-class F1. A class with a zero precision+recall
// denominator contributes 0, including classes absent from the data.
double macro_f1(const ConfusionMatrix& cm);

// Class index conventions shared by the evaluators.
std::size_t binary_class_index(Label label);   // HWT=0, LGT=1 (HLT rejected)
std::size_t ternary_class_index(Label label);  // HWT=0, HLT=1, LGT=2

ConfusionMatrix binary_confusion(std::span<const double> scores, std::span<const Label> labels,
                                 double tau);
ConfusionMatrix ternary_confusion(std::span<const double> scores, std::span<const Label> labels,
                                  const TernaryThreshold& thresholds);

// Macro F1 of the thresholded classification on (test) scores.
double evaluate_f1_best(std::span<const double> scores, std::span<const Label> labels, double tau);
double evaluate_f1_fpr(std::span<const double> scores, std::span<const Label> labels, double tau_fpr);
double evaluate_f1_ternary(std::span<const double> scores, std::span<const Label> labels,
                           const TernaryThreshold& thresholds);

enum class Dimension {
    in_distribution,
    cross_domain,
    cross_generator,
    cross_language,
    cross_paraphrase,
    cross_perturbation,
    cross_length,
    cross_operation,
};

constexpr Dimension kAllDimensions[] = {
    Dimension::in_distribution, Dimension::cross_domain,       Dimension::cross_generator,
    Dimension::cross_language,  Dimension::cross_paraphrase,   Dimension::cross_perturbation,
    Dimension::cross_length,    Dimension::cross_operation,
};

std::string_view to_string(Dimension d);
Dimension parse_dimension(std::string_view s);

struct EvalCell {
    Dimension dimension = Dimension::in_distribution;
    std::string train_key;
    std::string test_key;
    std::string detector;
    double f1_best = 0.0;
    double f1_fpr = 0.0;
    std::size_t train_count = 0;
    std::size_t test_count = 0;
};

// One detector's scores keyed by sample id.
struct ScoreSet {
    std::string detector;
    Orientation orientation = Orientation::higher_is_generated;
    std::unordered_map<std::string, double> by_id;

    static ScoreSet from_scores(const std::vector<DetectorScore>& scores);
};

struct DimensionResult {
    std::vector<EvalCell> cells;
    std::vector<std::string> skipped;  // human-readable reasons for dropped cells
};

// Calibrate on each train-key cell of the train split, evaluate on each
// test-key cell of the test split; In-Distribution is the single pooled
// cell. Cells missing a class are reported in `skipped` rather than failing
// the run.
DimensionResult run_dimension(const Corpus& corpus, Dimension dimension, const ScoreSet& scores,
                              Task task, double target_fpr = 0.01);

struct LeaderboardEntry {
    std::string detector;
    // dimension -> (mean f1_best, mean f1_fpr) over that dimension's cells
    std::map<Dimension, std::pair<double, double>> per_dimension;
    double avg_f1_best = 0.0;
    double avg_f1_fpr = 0.0;
    int rank = 0;
};

// Ranked by average f1_best, descending; ties break on detector name.
std::vector<LeaderboardEntry> leaderboard(const std::vector<EvalCell>& cells);

std::string cells_to_json(const std::vector<EvalCell>& cells);
std::string leaderboard_to_json(const std::vector<LeaderboardEntry>& entries);
// Aligned text table; fractions become percentages with two decimals here.
std::string leaderboard_to_text(const std::vector<LeaderboardEntry>& entries);

}  // namespace mgtd
