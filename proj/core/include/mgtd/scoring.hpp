#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mgtd/corpus.hpp"

namespace mgtd {

// Per-token evidence from a scoring backend. All values use natural log;
// backends reporting other bases convert at the wire boundary.
struct TokenEvidence {
    std::vector<double> token_logprobs;        // ln p(token | context), <= 0
    std::vector<std::int64_t> token_ranks;     // 1-based rank of the realized token
    std::vector<double> contrast_logprobs;     // optional second model; empty = absent

    bool has_ranks() const { return !token_ranks.empty(); }
    bool has_contrast() const { return !contrast_logprobs.empty(); }
    std::size_t length() const { return token_logprobs.size(); }

    // Throws DataError: lists present must share one length >= 1, logprobs
    // must be <= 0, ranks >= 1.
    void validate() const;
};

enum class Orientation { higher_is_generated, lower_is_generated };

std::string_view to_string(Orientation o);
Orientation parse_orientation(std::string_view s);

struct DetectorScore {
    std::string sample_id;
    std::string detector;
    double score = 0.0;
    Orientation orientation = Orientation::higher_is_generated;
};

// Score in the canonical direction (larger = more machine-like).
inline double oriented_score(double score, Orientation o) {
    return o == Orientation::higher_is_generated ? score : -score;
}

// Mean token log-probability. Machine text sits higher on this scale.
double log_likelihood_score(const TokenEvidence& evidence);

// Negated mean ln(rank); rank-1 sequences score 0, the model-likeliest value.
double log_rank_score(const TokenEvidence& evidence);

// (-mean logprob) / mean ln(rank), denominator clamped at kLrrEpsilon so
// all-rank-1 inputs stay finite.
inline constexpr double kLrrEpsilon = 1e-6;
double lrr_score(const TokenEvidence& evidence);

// mean(primary logprobs) - mean(contrast logprobs): the log perplexity ratio
// between the contrast and primary models.
double contrast_llr_score(const TokenEvidence& evidence);

DetectorScore score_log_likelihood(const std::string& sample_id, const TokenEvidence& evidence);
DetectorScore score_log_rank(const std::string& sample_id, const TokenEvidence& evidence);
DetectorScore score_lrr(const std::string& sample_id, const TokenEvidence& evidence);
DetectorScore score_contrast_llr(const std::string& sample_id, const TokenEvidence& evidence);

// External score file: a header line `{"detector": ..., "orientation": ...}`
// followed by one `{"id": ..., "score": ...}` object per line.
std::vector<DetectorScore> ingest_external_scores(const std::string& path);
void write_external_scores(const std::vector<DetectorScore>& scores, const std::string& path);
std::string external_scores_to_string(const std::vector<DetectorScore>& scores);
std::vector<DetectorScore> parse_external_scores(std::string_view content,
                                                 std::string_view origin = "<memory>");

class ScoringClient {
public:
    virtual ~ScoringClient() = default;
    virtual std::vector<TokenEvidence> score_texts(const std::string& model,
                                                   const std::vector<std::string>& texts) = 0;
};

// One evidence per text, input order preserved regardless of batching.
// Responses that break TokenEvidence invariants raise BackendError.
std::vector<TokenEvidence> fetch_evidence(const std::vector<std::string>& texts,
                                          ScoringClient& client, const std::string& model,
                                          std::size_t batch_size = 32);

struct CategoryStats {
    std::size_t count = 0;
    double mean = 0.0;
    double stddev = 0.0;  // population
    double min = 0.0;
    double max = 0.0;
};

struct DistributionReport {
    std::string detector;
    std::map<Label, CategoryStats> per_label;
    // Best binary cut for HWT vs rest in raw score space; absent when only
    // one side is present.
    std::optional<double> best_f1_threshold;
};

DistributionReport score_distribution_report(const std::vector<DetectorScore>& scores,
                                             const std::map<std::string, Label>& labels);

}  // namespace mgtd
