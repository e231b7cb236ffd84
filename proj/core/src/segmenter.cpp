#include "mgtd/segmenter.hpp"

#include "mgtd/attacks.hpp"
#include "mgtd/utf8.hpp"

namespace mgtd {

namespace {

bool is_terminal(char32_t c) {
    return c == U'.' || c == U'!' || c == U'?' || c == 0x3002 /* 。 */ ||
           c == 0xFF01 /* ！ */ || c == 0xFF1F /* ？ */ || c == 0x061F /* ؟ */;
}

bool is_closer(char32_t c) {
    return c == U'"' || c == U'\'' || c == U')' || c == U']' || c == 0x201D || c == 0x2019 ||
           c == 0x00BB || c == 0xFF09 || c == 0x300D || c == 0x300F;
}

bool is_digit(char32_t c) {
    return c >= U'0' && c <= U'9';
}

}  // namespace

std::string SentenceList::reconstruct() const {
    std::string out = joiners.empty() ? std::string() : joiners[0];
    for (std::size_t i = 0; i < sentences.size(); ++i) {
        out += sentences[i];
        out += joiners[i + 1];
    }
    return out;
}

std::string SentenceList::prefix_text(std::size_t count) const {
    std::string out;
    for (std::size_t i = 0; i < count && i < sentences.size(); ++i) {
        if (i > 0) out += joiners[i];
        out += sentences[i];
    }
    return out;
}

SentenceList segment_sentences(std::string_view text, Language /*language*/) {
    const std::u32string chars = utf8::decode(text);
    const std::size_t n = chars.size();

    SentenceList result;
    std::size_t pos = 0;
    for (;;) {
        std::size_t start = pos;
        while (start < n && utf8::is_space(chars[start])) ++start;
        result.joiners.push_back(utf8::encode(std::u32string_view(chars.data() + pos, start - pos)));
        if (start == n) break;

        std::size_t end = start;
        while (end < n) {
            const char32_t c = chars[end];
            if (is_terminal(c)) {
                // decimal point, not a boundary
                if (c == U'.' && end > 0 && end + 1 < n && is_digit(chars[end - 1]) &&
                    is_digit(chars[end + 1])) {
                    ++end;
                    continue;
                }
                while (end < n && is_terminal(chars[end])) ++end;
                while (end < n && is_closer(chars[end])) ++end;
                break;
            }
            ++end;
        }
        result.sentences.push_back(utf8::encode(std::u32string_view(chars.data() + start, end - start)));
        pos = end;
    }
    return result;
}

TokenCounter word_token_counter() {
    return TokenCounter{"words", [](std::string_view text) -> std::size_t {
                            std::size_t count = 0;
                            for (const auto& span : tokenize_words_utf8(text)) {
                                if (span.is_word) ++count;
                            }
                            return count;
                        }};
}

TokenCounter make_token_counter(std::string_view name) {
    if (name == "words" || name.empty()) return word_token_counter();
    if (name == "chars") {
        return TokenCounter{"chars",
                            [](std::string_view text) { return utf8::length(text); }};
    }
    throw UsageError("unknown token counter: \"" + std::string(name) + "\" (known: words, chars)");
}

std::optional<Chunk> merge_to_budget(const SentenceList& sentences, std::size_t budget,
                                     const TokenCounter& counter) {
    if (budget == 0) throw DataError("token budget must be >= 1");

    std::size_t best = 0;
    std::size_t best_tokens = 0;
    for (std::size_t k = 1; k <= sentences.sentences.size(); ++k) {
        const std::size_t tokens = counter.count(sentences.prefix_text(k));
        if (tokens > budget) break;  // counters are monotone in the prefix
        best = k;
        best_tokens = tokens;
    }
    if (best == 0) return std::nullopt;
    return Chunk{sentences.prefix_text(best), best, best_tokens};
}

std::optional<std::size_t> bucket_budget(LengthBucket bucket) {
    switch (bucket) {
        case LengthBucket::b64: return 64;
        case LengthBucket::b128: return 128;
        case LengthBucket::b256: return 256;
        case LengthBucket::b512: return 512;
        case LengthBucket::full: return std::nullopt;
    }
    return std::nullopt;
}

std::vector<Sample> bucketize(const Sample& sample, const std::vector<LengthBucket>& budgets,
                              const TokenCounter& counter, std::vector<LengthBucket>* excluded) {
    const SentenceList sentences = segment_sentences(sample.text, sample.language);
    std::vector<Sample> out;
    for (LengthBucket bucket : budgets) {
        const auto budget = bucket_budget(bucket);
        if (!budget) throw DataError("bucketize budgets must be token-bounded buckets");
        const auto chunk = merge_to_budget(sentences, *budget, counter);
        if (!chunk) {
            if (excluded != nullptr) excluded->push_back(bucket);
            continue;
        }
        Sample derived = sample;
        derived.id = sample.id + "#len" + std::string(to_string(bucket));
        derived.text = chunk->text;
        derived.length_bucket = bucket;
        out.push_back(std::move(derived));
    }
    return out;
}

}  // namespace mgtd
