#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mgtd/corpus.hpp"

namespace mgtd {

enum class AttackKind {
    char_insert,
    char_substitute,
    char_delete,
    zero_width_insert,
    encoder_paraphrase,
    seq2seq_paraphrase,
    decoder_paraphrase,
    back_translate,
};

std::string_view to_string(AttackKind k);
AttackKind parse_attack_kind(std::string_view s);

// The first four kinds run in-process with no backend; the rest are
// dispatched to an external transform provider.
bool is_native_attack(AttackKind k);

constexpr AttackKind kPerturbationKinds[] = {AttackKind::char_insert, AttackKind::char_substitute,
                                             AttackKind::char_delete, AttackKind::zero_width_insert};
constexpr AttackKind kParaphraseKinds[] = {AttackKind::encoder_paraphrase,
                                           AttackKind::seq2seq_paraphrase,
                                           AttackKind::decoder_paraphrase, AttackKind::back_translate};

// The four zero-width code points injected by zero_width_insert.
constexpr char32_t kZeroWidthChars[] = {0x200B, 0x200C, 0x200D, 0x2060};

struct AttackSpec {
    AttackKind kind = AttackKind::char_insert;
    double rate = 0.15;  // fraction of words modified, in (0, 1]
    std::uint64_t seed = 0;
};

// Half-open [start, end) span in code-point offsets. Spans tile the text:
// concatenating them in order reproduces the input exactly.
struct WordSpan {
    std::size_t start = 0;
    std::size_t end = 0;
    bool is_word = false;
};

// Whitespace-delimited runs become words; inside a run, each CJK character
// (with any trailing combining marks) is its own word, so space-free scripts
// still yield usable word units.
std::vector<WordSpan> tokenize_words(std::u32string_view text);
std::vector<WordSpan> tokenize_words_utf8(std::string_view text);

// Word indices (into the span list) chosen for modification:
// max(1, floor(rate * W)) of the W word spans, empty when W == 0.
// Selection = first k entries of a seeded Fisher-Yates shuffle; returned sorted.
std::vector<std::size_t> sample_targets(const std::vector<WordSpan>& spans, double rate,
                                        std::uint64_t seed);

// One span-local edit. `offset` is the code-point position in the OUTPUT text.
struct Edit {
    std::size_t word_index = 0;
    std::size_t offset = 0;
    char32_t inserted = 0;  // 0 when nothing was inserted
    char32_t removed = 0;   // 0 when nothing was removed
};

struct AttackReport {
    std::size_t word_count = 0;  // W
    std::size_t budget = 0;      // max(1, floor(rate * W)); 0 when W == 0
    std::size_t modified = 0;    // words actually changed (exactly one edit each)
    std::size_t skipped = 0;     // budget shortfall after the redraw pass
    std::vector<Edit> edits;     // in text order
};

struct AttackResult {
    std::string text;
    AttackReport report;
};

// The native perturbations. Deterministic in (text, rate, seed): draws come
// from one Rng stream in a fixed order — the word shuffle first, then the
// per-word position/choice draws in attempt order. Words that cannot take the
// edit (no confusable, too short) are skipped and the walk continues into the
// remaining shuffled words; any unmet budget is reported, never an error.
AttackResult char_insert(std::string_view text, double rate, std::uint64_t seed);
AttackResult char_substitute(std::string_view text, double rate, std::uint64_t seed,
                             const class ConfusablesTable& table);
AttackResult char_delete(std::string_view text, double rate, std::uint64_t seed);
AttackResult zero_width_insert(std::string_view text, double rate, std::uint64_t seed);

// Removes every occurrence of the four zero-width code points.
std::string strip_zero_width(std::string_view text);

// Map from a character to its visually-similar stand-ins.
class ConfusablesTable {
public:
    // Lines of `SRC<TAB>REPL1 REPL2 ...` with literal characters; `#` comments.
    static ConfusablesTable load(const std::string& path);
    static ConfusablesTable parse(std::string_view content, std::string_view origin = "<memory>");

    void add(char32_t key, char32_t replacement);
    const std::vector<char32_t>* find(char32_t key) const;
    bool empty() const { return map_.empty(); }
    std::size_t size() const { return map_.size(); }

private:
    std::map<char32_t, std::vector<char32_t>> map_;
};

// External rewriting provider (paraphrasers, translators).
class TransformClient {
public:
    virtual ~TransformClient() = default;
    virtual std::string transform(const std::string& task, const std::string& text,
                                  const std::string& source_lang,
                                  const std::string& target_lang) = 0;
};

// source -> pivot -> source round trip. Pivot is English for non-English
// input and Chinese for English input. Empty backend output is a BackendError.
std::string back_translate(std::string_view text, Language language, TransformClient& client);

// Applies the attack to a sample's text; the attack tag is set to the kind
// name and all other metadata is copied. Native kinds seed from
// derive_seed(spec.seed, sample.id); paraphrase kinds require a backend.
Sample apply_attack(const Sample& sample, const AttackSpec& spec,
                    const ConfusablesTable* table = nullptr, TransformClient* backend = nullptr,
                    AttackReport* report = nullptr);

}  // namespace mgtd
