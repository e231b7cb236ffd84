#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mgtd/corpus.hpp"

namespace mgtd {

// Sentences plus the separators around them. joiners.size() is always
// sentences.size() + 1: leading whitespace, the gaps between sentences, and
// trailing whitespace, so reconstruct() reproduces the input byte-exact.
struct SentenceList {
    std::vector<std::string> sentences;
    std::vector<std::string> joiners;

    std::string reconstruct() const;
    // The first `count` sentences joined with their interior separators.
    std::string prefix_text(std::size_t count) const;
};

// Rule-based splitter over terminal punctuation (. ! ? and the fullwidth /
// Arabic equivalents), keeping trailing quotes and brackets with the
// sentence. A '.' between digits does not end a sentence. No abbreviation
// guard; an external segmenter can replace this behind the same contract.
SentenceList segment_sentences(std::string_view text, Language language);

struct TokenCounter {
    std::string name;
    std::function<std::size_t(std::string_view)> count;
};

// Default approximation: whitespace-delimited words, with each CJK character
// counted separately. An exact subword counter can be plugged in when parity
// with a specific tokenizer matters.
TokenCounter word_token_counter();
TokenCounter make_token_counter(std::string_view name);

struct Chunk {
    std::string text;
    std::size_t sentence_count = 0;
    std::size_t token_count = 0;
};

// Longest sentence prefix whose joined text stays within `budget` tokens.
// Nothing is returned when even the first sentence exceeds the budget; texts
// are never cut mid-sentence.
std::optional<Chunk> merge_to_budget(const SentenceList& sentences, std::size_t budget,
                                     const TokenCounter& counter);

std::optional<std::size_t> bucket_budget(LengthBucket bucket);

// One derived sample per budget the text can fill; ids get a "#len<n>"
// suffix and length_bucket is set, all other metadata is copied. Budgets the
// first sentence already exceeds are reported through `excluded`.
std::vector<Sample> bucketize(const Sample& sample, const std::vector<LengthBucket>& budgets,
                              const TokenCounter& counter,
                              std::vector<LengthBucket>* excluded = nullptr);

}  // namespace mgtd
