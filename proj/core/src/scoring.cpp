#include "mgtd/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mgtd/calibration.hpp"

namespace mgtd {

using ordered_json = nlohmann::ordered_json;

namespace {

double mean_of(const std::vector<double>& values) {
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

double mean_ln_rank(const std::vector<std::int64_t>& ranks) {
    double sum = 0.0;
    for (std::int64_t r : ranks) sum += std::log(static_cast<double>(r));
    return sum / static_cast<double>(ranks.size());
}

}  // namespace

void TokenEvidence::validate() const {
    if (token_logprobs.empty()) throw DataError("token evidence has no logprobs");
    for (double lp : token_logprobs) {
        if (!(lp <= 0.0)) throw DataError("token logprob must be <= 0, got " + std::to_string(lp));
    }
    if (has_ranks()) {
        if (token_ranks.size() != token_logprobs.size()) {
            throw DataError("token_ranks length differs from token_logprobs");
        }
        for (std::int64_t r : token_ranks) {
            if (r < 1) throw DataError("token rank must be >= 1, got " + std::to_string(r));
        }
    }
    if (has_contrast()) {
        if (contrast_logprobs.size() != token_logprobs.size()) {
            throw DataError("contrast_logprobs length differs from token_logprobs");
        }
        for (double lp : contrast_logprobs) {
            if (!(lp <= 0.0)) {
                throw DataError("contrast logprob must be <= 0, got " + std::to_string(lp));
            }
        }
    }
}

std::string_view to_string(Orientation o) {
    return o == Orientation::higher_is_generated ? "higher_is_generated" : "lower_is_generated";
}

Orientation parse_orientation(std::string_view s) {
    if (s == "higher_is_generated") return Orientation::higher_is_generated;
    if (s == "lower_is_generated") return Orientation::lower_is_generated;
    throw DataError("unknown orientation: \"" + std::string(s) + "\"");
}

double log_likelihood_score(const TokenEvidence& evidence) {
    evidence.validate();
    return mean_of(evidence.token_logprobs);
}

double log_rank_score(const TokenEvidence& evidence) {
    evidence.validate();
    if (!evidence.has_ranks()) throw DataError("log-rank score needs token ranks");
    return -mean_ln_rank(evidence.token_ranks);
}

double lrr_score(const TokenEvidence& evidence) {
    evidence.validate();
    if (!evidence.has_ranks()) throw DataError("LRR score needs token ranks");
    const double numerator = -mean_of(evidence.token_logprobs);
    const double denominator = std::max(mean_ln_rank(evidence.token_ranks), kLrrEpsilon);
    return numerator / denominator;
}

double contrast_llr_score(const TokenEvidence& evidence) {
    evidence.validate();
    if (!evidence.has_contrast()) throw DataError("contrastive score needs a contrast stream");
    return mean_of(evidence.token_logprobs) - mean_of(evidence.contrast_logprobs);
}

namespace {

DetectorScore make_score(const std::string& id, const char* name, double value) {
    return DetectorScore{id, name, value, Orientation::higher_is_generated};
}

}  // namespace

DetectorScore score_log_likelihood(const std::string& id, const TokenEvidence& e) {
    return make_score(id, "log_likelihood", log_likelihood_score(e));
}
DetectorScore score_log_rank(const std::string& id, const TokenEvidence& e) {
    return make_score(id, "log_rank", log_rank_score(e));
}
DetectorScore score_lrr(const std::string& id, const TokenEvidence& e) {
    return make_score(id, "lrr", lrr_score(e));
}
DetectorScore score_contrast_llr(const std::string& id, const TokenEvidence& e) {
    return make_score(id, "contrast_llr", contrast_llr_score(e));
}

std::vector<DetectorScore> parse_external_scores(std::string_view content, std::string_view origin) {
    std::vector<DetectorScore> scores;
    std::string detector;
    Orientation orientation = Orientation::higher_is_generated;
    bool have_header = false;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < content.size()) {
        std::size_t nl = content.find('\n', pos);
        if (nl == std::string_view::npos) nl = content.size();
        const std::string line(content.substr(pos, nl - pos));
        pos = nl + 1;
        ++line_no;
        if (line.empty()) continue;

        ordered_json j;
        try {
            j = ordered_json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw DataError(std::string(origin) + ":" + std::to_string(line_no) + ": " + e.what());
        }
        if (!have_header) {
            if (!j.contains("detector") || !j.contains("orientation")) {
                throw DataError(std::string(origin) +
                                ": first line must be a header with detector and orientation");
            }
            detector = j["detector"].get<std::string>();
            orientation = parse_orientation(j["orientation"].get<std::string>());
            have_header = true;
            continue;
        }
        if (!j.contains("id") || !j.contains("score") || !j["score"].is_number()) {
            throw DataError(std::string(origin) + ":" + std::to_string(line_no) +
                            ": record needs string id and numeric score");
        }
        scores.push_back(DetectorScore{j["id"].get<std::string>(), detector,
                                       j["score"].get<double>(), orientation});
    }
    if (!have_header) {
        throw DataError(std::string(origin) + ": missing orientation header line");
    }
    return scores;
}

std::vector<DetectorScore> ingest_external_scores(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open score file: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_external_scores(buffer.str(), path);
}

std::string external_scores_to_string(const std::vector<DetectorScore>& scores) {
    if (scores.empty()) throw DataError("refusing to write an empty score file");
    const std::string& detector = scores.front().detector;
    const Orientation orientation = scores.front().orientation;
    for (const auto& s : scores) {
        if (s.detector != detector || s.orientation != orientation) {
            throw DataError("a score file holds one detector; found \"" + s.detector +
                            "\" mixed with \"" + detector + "\"");
        }
    }
    ordered_json header;
    header["detector"] = detector;
    header["orientation"] = to_string(orientation);
    std::string out = header.dump();
    out += '\n';
    for (const auto& s : scores) {
        ordered_json j;
        j["id"] = s.sample_id;
        j["score"] = s.score;
        out += j.dump();
        out += '\n';
    }
    return out;
}

void write_external_scores(const std::vector<DetectorScore>& scores, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write score file: " + path);
    out << external_scores_to_string(scores);
    if (!out) throw DataError("write failed: " + path);
}

std::vector<TokenEvidence> fetch_evidence(const std::vector<std::string>& texts,
                                          ScoringClient& client, const std::string& model,
                                          std::size_t batch_size) {
    if (batch_size == 0) batch_size = 1;
    std::vector<TokenEvidence> out;
    out.reserve(texts.size());
    for (std::size_t start = 0; start < texts.size(); start += batch_size) {
        const std::size_t end = std::min(texts.size(), start + batch_size);
        const std::vector<std::string> batch(texts.begin() + static_cast<std::ptrdiff_t>(start),
                                             texts.begin() + static_cast<std::ptrdiff_t>(end));
        std::vector<TokenEvidence> results = client.score_texts(model, batch);
        if (results.size() != batch.size()) {
            throw BackendError("scoring backend returned " + std::to_string(results.size()) +
                               " results for " + std::to_string(batch.size()) + " texts");
        }
        for (auto& evidence : results) {
            try {
                evidence.validate();
            } catch (const DataError& e) {
                throw BackendError(std::string("scoring backend returned invalid evidence: ") +
                                   e.what());
            }
            out.push_back(std::move(evidence));
        }
    }
    return out;
}

DistributionReport score_distribution_report(const std::vector<DetectorScore>& scores,
                                             const std::map<std::string, Label>& labels) {
    DistributionReport report;
    if (scores.empty()) return report;
    report.detector = scores.front().detector;

    std::map<Label, std::vector<double>> grouped;
    std::vector<double> oriented;
    std::vector<std::uint8_t> positive;  // non-HWT
    for (const auto& s : scores) {
        const auto it = labels.find(s.sample_id);
        if (it == labels.end()) {
            throw DataError("no label for scored sample \"" + s.sample_id + "\"");
        }
        grouped[it->second].push_back(s.score);
        oriented.push_back(oriented_score(s.score, s.orientation));
        positive.push_back(it->second != Label::HWT ? 1 : 0);
    }

    for (const auto& [label, values] : grouped) {
        CategoryStats stats;
        stats.count = values.size();
        double sum = 0.0;
        stats.min = values.front();
        stats.max = values.front();
        for (double v : values) {
            sum += v;
            stats.min = std::min(stats.min, v);
            stats.max = std::max(stats.max, v);
        }
        stats.mean = sum / static_cast<double>(values.size());
        double sq = 0.0;
        for (double v : values) sq += (v - stats.mean) * (v - stats.mean);
        stats.stddev = std::sqrt(sq / static_cast<double>(values.size()));
        report.per_label[label] = stats;
    }

    const bool has_pos = std::find(positive.begin(), positive.end(), 1) != positive.end();
    const bool has_neg = std::find(positive.begin(), positive.end(), 0) != positive.end();
    if (has_pos && has_neg) {
        const double tau = calibrate_binary_best(oriented, positive);
        // map back to raw score space
        report.best_f1_threshold =
            scores.front().orientation == Orientation::higher_is_generated ? tau : -tau;
    }
    return report;
}

}  // namespace mgtd
