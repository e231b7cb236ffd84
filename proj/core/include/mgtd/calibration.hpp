#pragma once

#include <span>
#include <string>
#include <vector>

#include "mgtd/corpus.hpp"

namespace mgtd {

// Calibration works on scores oriented so that larger means more
// machine-like; callers negate lower_is_generated scores at the boundary.

struct BinaryThreshold {
    double tau_best = 0.0;   // maximizes Youden's J on the calibration set
    double tau_fpr = 0.0;    // smallest cut with calibration-set FPR <= target_fpr
    double target_fpr = 0.01;
};

struct TernaryThreshold {
    double t1 = 0.0;
    double t2 = 0.0;  // t1 <= t2; both may be +-infinity sentinels
};

// Candidate decision boundaries: the midpoints between adjacent distinct
// scores, bracketed by sentinels. With `infinite_sentinels` the brackets are
// +-infinity (the ternary search space); otherwise min-1 / max+1.
std::vector<double> candidate_cuts(std::span<const double> scores, bool infinite_sentinels);

// Youden's J (TPR - FPR, predicting positive when score >= tau) maximized
// over all candidate cuts; ties resolve to the smallest cut.
double calibrate_binary_best(std::span<const double> scores, std::span<const std::uint8_t> positive);

// Smallest candidate cut whose calibration-set false positive rate is <=
// target; max+1 (rejecting everything) is always admissible, so a finite cut
// always exists.
double calibrate_binary_fpr(std::span<const double> scores, std::span<const std::uint8_t> positive,
                            double target = 0.01);

// HWT below tau, LGT at or above it.
Label classify_binary(double score, double tau);

// Exhaustive search over ordered candidate pairs (t1 <= t2, infinity
// sentinels included) maximizing macro F1 of the three-way rule; ties resolve
// to the smallest (t1, t2). Beyond kTernaryExactLimit distinct scores, the
// search runs on a 1001-point quantile grid of cuts instead.
inline constexpr std::size_t kTernaryExactLimit = 5000;
TernaryThreshold calibrate_ternary(std::span<const double> scores, std::span<const Label> labels);

// t1 is the smallest cut keeping the calibration-set rate of HWT scoring >=
// t1 within target; t2 >= t1 then maximizes macro F1 with t1 fixed.
TernaryThreshold calibrate_ternary_fpr(std::span<const double> scores, std::span<const Label> labels,
                                       double target = 0.01);

// HWT when x < t1, HLT when t1 <= x < t2, LGT when x >= t2.
Label classify_ternary(double score, const TernaryThreshold& thresholds);

// Threshold model file: one JSON object with detector, kind and the
// thresholds; infinities serialize as the strings "-inf" / "+inf".
struct ThresholdModel {
    std::string detector;
    std::string kind;  // "binary" | "ternary"
    BinaryThreshold binary;
    TernaryThreshold ternary;
};

std::string threshold_model_to_json(const ThresholdModel& model);
ThresholdModel parse_threshold_model(const std::string& json_text);
void save_threshold_model(const ThresholdModel& model, const std::string& path);
ThresholdModel load_threshold_model(const std::string& path);

}  // namespace mgtd
