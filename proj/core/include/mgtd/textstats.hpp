#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "mgtd/corpus.hpp"
#include "mgtd/segmenter.hpp"

namespace mgtd {

struct TextFeatures {
    std::size_t word_count = 0;
    std::size_t sentence_count = 0;
    std::size_t syllable_count = 0;
    double fres = 0.0;
    double lds = 0.0;
    std::map<int, double> distinct_n;  // n in {1,2,3} for texts with >= n words
};

// Words of the text: whitespace-delimited runs, CJK characters standing alone.
// Punctuation stays attached to its word.
std::vector<std::string> word_list(std::string_view text);

// Maximal vowel-group runs with a per-language vowel set; each CJK character
// counts as one syllable; never less than 1. A heuristic — the non-Latin
// outputs downstream of this are heuristic too.
std::size_t count_syllables(std::string_view word, Language language);

// 206.835 - 1.015 * (words / sentences) - 84.6 * (syllables / words)
double flesch(std::string_view text, Language language);

// Case-folded unique word types over total words.
double lexical_diversity(std::string_view text);

// Unique n-grams over total n-grams of the word sequence.
double distinct_n(std::string_view text, int n);

TextFeatures compute_features(std::string_view text, Language language);

struct GroupStats {
    std::size_t count = 0;
    double mean = 0.0;
    double stddev = 0.0;  // population
    double min = 0.0;
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double max = 0.0;
};

GroupStats summarize_values(const std::vector<double>& values);

// Token-count distribution per metadata group. Keys look like
// "label=HWT,language=en"; samples missing a group field fall under "-".
std::map<std::string, GroupStats> length_report(const Corpus& corpus, const TokenCounter& counter,
                                                const std::vector<std::string>& group_keys);

}  // namespace mgtd
