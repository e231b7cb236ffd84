#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mgtd/errors.hpp"

namespace mgtd {

enum class Label { HWT, HLT, LGT };

enum class Language { en, zh, es, ar, fr, ru, pt, de };

enum class Domain { Academic, News, Novel, SEO, Wiki, WebText };

enum class Operation { none, polishing, expanding, condensing };

enum class LengthBucket { b64, b128, b256, b512, full };

enum class Split { train, test, unassigned };

std::string_view to_string(Label v);
std::string_view to_string(Language v);
std::string_view to_string(Domain v);
std::string_view to_string(Operation v);
std::string_view to_string(LengthBucket v);
std::string_view to_string(Split v);

Label parse_label(std::string_view s);
Language parse_language(std::string_view s);
Domain parse_domain(std::string_view s);
Operation parse_operation(std::string_view s);
LengthBucket parse_length_bucket(std::string_view s);
Split parse_split(std::string_view s);

constexpr Language kAllLanguages[] = {Language::en, Language::zh, Language::es, Language::ar,
                                      Language::fr, Language::ru, Language::pt, Language::de};
constexpr Domain kAllDomains[] = {Domain::Academic, Domain::News, Domain::Novel,
                                  Domain::SEO,      Domain::Wiki, Domain::WebText};
constexpr LengthBucket kTokenBuckets[] = {LengthBucket::b64, LengthBucket::b128,
                                          LengthBucket::b256, LengthBucket::b512};
constexpr Operation kRefineOperations[] = {Operation::polishing, Operation::expanding,
                                           Operation::condensing};

// Canonical generator identifiers. The field itself is an open string so that
// corpora built against other backends (or test stubs) remain representable.
namespace generators {
inline constexpr const char* kDeepseekV3 = "Deepseek-V3";
inline constexpr const char* kGemini25Flash = "Gemini-2.5-flash";
inline constexpr const char* kGPT4o = "GPT-4o";
inline constexpr const char* kQwenMax = "Qwen-Max";
}  // namespace generators

// One labeled text with full provenance metadata.
struct Sample {
    std::string id;
    std::string text;
    Label label = Label::HWT;
    Language language = Language::en;
    Domain domain = Domain::WebText;
    std::optional<std::string> generator;
    std::optional<std::string> attack;
    Operation operation = Operation::none;
    LengthBucket length_bucket = LengthBucket::full;
    Split split = Split::unassigned;
    // Unrecognized record fields, preserved verbatim across load/save.
    std::map<std::string, std::string> extra;

    // Throws DataError when a Sample invariant is broken.
    void validate() const;
};

struct Corpus {
    std::vector<Sample> samples;
    std::map<std::string, std::string> provenance;

    std::size_t size() const { return samples.size(); }
    bool empty() const { return samples.empty(); }
};

struct SplitRatio {
    unsigned train = 2;
    unsigned test = 1;
};

// Value of a named metadata field, as it appears in the on-disk record.
// Known keys: id, label, language, domain, generator, attack, operation,
// length_bucket, split. Absent optional fields yield nullopt.
std::optional<std::string> metadata_value(const Sample& s, std::string_view key);
bool is_metadata_key(std::string_view key);

// One JSON object per line; rejects the whole file on the first bad record,
// naming the line. A sidecar `<path>.meta.json`, when present, is loaded into
// Corpus::provenance.
Corpus load_corpus(const std::string& path);

// Inverse of load_corpus; writes the sidecar only when provenance is non-empty.
void save_corpus(const Corpus& corpus, const std::string& path);

// JSONL (de)serialization of a single record.
Sample parse_sample_json(const std::string& line);
std::string sample_to_json(const Sample& s);

// Assigns Split::train / Split::test stratum by stratum. Within a stratum of
// n samples, test gets floor(n * ratio.test / (ratio.train + ratio.test)) and
// train the remainder; membership comes from a Fisher-Yates shuffle seeded by
// (seed, stratum key), so reruns reproduce the same split.
Corpus split_corpus(const Corpus& corpus, SplitRatio ratio,
                    const std::vector<std::string>& strata_keys, std::uint64_t seed);

using SamplePredicate = std::function<bool(const Sample&)>;

// Order-preserving filter; the input corpus is untouched.
Corpus filter_corpus(const Corpus& corpus, const SamplePredicate& predicate);

// Predicate syntax for the CLI: comma-separated `key=value` / `key!=value`
// clauses, AND-combined. `key!=value` accepts samples where the field is absent.
SamplePredicate parse_predicate(std::string_view expr);

}  // namespace mgtd
