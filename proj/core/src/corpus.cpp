#include "mgtd/corpus.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "mgtd/rng.hpp"

namespace mgtd {

using ordered_json = nlohmann::ordered_json;

namespace {

template <typename Enum, std::size_t N>
Enum parse_enum(std::string_view s, const std::pair<std::string_view, Enum> (&table)[N],
                std::string_view field) {
    for (const auto& [name, value] : table) {
        if (name == s) return value;
    }
    throw DataError("unknown " + std::string(field) + " value: \"" + std::string(s) + "\"");
}

constexpr std::pair<std::string_view, Label> kLabelNames[] = {
    {"HWT", Label::HWT}, {"HLT", Label::HLT}, {"LGT", Label::LGT}};
constexpr std::pair<std::string_view, Language> kLanguageNames[] = {
    {"en", Language::en}, {"zh", Language::zh}, {"es", Language::es}, {"ar", Language::ar},
    {"fr", Language::fr}, {"ru", Language::ru}, {"pt", Language::pt}, {"de", Language::de}};
constexpr std::pair<std::string_view, Domain> kDomainNames[] = {
    {"Academic", Domain::Academic}, {"News", Domain::News}, {"Novel", Domain::Novel},
    {"SEO", Domain::SEO},           {"Wiki", Domain::Wiki}, {"WebText", Domain::WebText}};
constexpr std::pair<std::string_view, Operation> kOperationNames[] = {
    {"none", Operation::none},
    {"polishing", Operation::polishing},
    {"expanding", Operation::expanding},
    {"condensing", Operation::condensing}};
constexpr std::pair<std::string_view, LengthBucket> kBucketNames[] = {
    {"64", LengthBucket::b64},   {"128", LengthBucket::b128}, {"256", LengthBucket::b256},
    {"512", LengthBucket::b512}, {"full", LengthBucket::full}};
constexpr std::pair<std::string_view, Split> kSplitNames[] = {
    {"train", Split::train}, {"test", Split::test}, {"unassigned", Split::unassigned}};

template <typename Enum, std::size_t N>
std::string_view enum_name(Enum v, const std::pair<std::string_view, Enum> (&table)[N]) {
    for (const auto& [name, value] : table) {
        if (value == v) return name;
    }
    return "?";
}

bool has_non_whitespace(std::string_view text) {
    // ASCII check is enough here: any multi-byte UTF-8 sequence starts with a
    // byte >= 0x80, which is not ASCII whitespace.
    return std::any_of(text.begin(), text.end(), [](unsigned char c) {
        return c != ' ' && c != '\t' && c != '\n' && c != '\r' && c != '\v' && c != '\f';
    });
}

}  // namespace

std::string_view to_string(Label v) { return enum_name(v, kLabelNames); }
std::string_view to_string(Language v) { return enum_name(v, kLanguageNames); }
std::string_view to_string(Domain v) { return enum_name(v, kDomainNames); }
std::string_view to_string(Operation v) { return enum_name(v, kOperationNames); }
std::string_view to_string(LengthBucket v) { return enum_name(v, kBucketNames); }
std::string_view to_string(Split v) { return enum_name(v, kSplitNames); }

Label parse_label(std::string_view s) { return parse_enum(s, kLabelNames, "label"); }
Language parse_language(std::string_view s) { return parse_enum(s, kLanguageNames, "language"); }
Domain parse_domain(std::string_view s) { return parse_enum(s, kDomainNames, "domain"); }
Operation parse_operation(std::string_view s) { return parse_enum(s, kOperationNames, "operation"); }
LengthBucket parse_length_bucket(std::string_view s) {
    return parse_enum(s, kBucketNames, "length_bucket");
}
Split parse_split(std::string_view s) { return parse_enum(s, kSplitNames, "split"); }

void Sample::validate() const {
    if (id.empty()) throw DataError("sample has empty id");
    if (text.empty() || !has_non_whitespace(text)) {
        throw DataError("sample \"" + id + "\": text has no non-whitespace character");
    }
    if (label == Label::HWT) {
        if (generator.has_value()) {
            throw DataError("sample \"" + id + "\": HWT must not carry a generator");
        }
        if (operation != Operation::none) {
            throw DataError("sample \"" + id + "\": HWT requires operation \"none\"");
        }
    }
    if (label == Label::HLT && operation == Operation::none) {
        throw DataError("sample \"" + id +
                        "\": HLT requires a refinement operation (polishing/expanding/condensing)");
    }
}

std::optional<std::string> metadata_value(const Sample& s, std::string_view key) {
    if (key == "id") return s.id;
    if (key == "label") return std::string(to_string(s.label));
    if (key == "language") return std::string(to_string(s.language));
    if (key == "domain") return std::string(to_string(s.domain));
    if (key == "generator") return s.generator;
    if (key == "attack") return s.attack;
    if (key == "operation") return std::string(to_string(s.operation));
    if (key == "length_bucket") return std::string(to_string(s.length_bucket));
    if (key == "split") return std::string(to_string(s.split));
    throw DataError("unknown metadata key: \"" + std::string(key) + "\"");
}

bool is_metadata_key(std::string_view key) {
    static const char* kKeys[] = {"id",     "label",     "language",      "domain", "generator",
                                  "attack", "operation", "length_bucket", "split"};
    for (const char* k : kKeys) {
        if (key == k) return true;
    }
    return false;
}

Sample parse_sample_json(const std::string& line) {
    ordered_json j;
    try {
        j = ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw DataError("record is not a JSON object");

    auto require_string = [&](const char* key) -> std::string {
        if (!j.contains(key)) throw DataError(std::string("missing required key \"") + key + "\"");
        if (!j[key].is_string()) throw DataError(std::string("key \"") + key + "\" must be a string");
        return j[key].get<std::string>();
    };

    Sample s;
    s.id = require_string("id");
    s.text = require_string("text");
    s.label = parse_label(require_string("label"));
    s.language = parse_language(require_string("language"));
    s.domain = parse_domain(require_string("domain"));
    s.operation = parse_operation(require_string("operation"));
    s.length_bucket = parse_length_bucket(require_string("length_bucket"));
    s.split = parse_split(require_string("split"));
    if (j.contains("generator")) {
        if (!j["generator"].is_string() || j["generator"].get<std::string>().empty()) {
            throw DataError("key \"generator\" must be a non-empty string");
        }
        s.generator = j["generator"].get<std::string>();
    }
    if (j.contains("attack")) {
        if (!j["attack"].is_string() || j["attack"].get<std::string>().empty()) {
            throw DataError("key \"attack\" must be a non-empty string");
        }
        s.attack = j["attack"].get<std::string>();
    }
    for (const auto& [key, value] : j.items()) {
        if (is_metadata_key(key) || key == "text") continue;
        // Extra columns ride along as opaque provenance.
        s.extra[key] = value.is_string() ? value.get<std::string>() : value.dump();
    }
    s.validate();
    return s;
}

std::string sample_to_json(const Sample& s) {
    ordered_json j;
    j["id"] = s.id;
    j["text"] = s.text;
    j["label"] = to_string(s.label);
    j["language"] = to_string(s.language);
    j["domain"] = to_string(s.domain);
    if (s.generator) j["generator"] = *s.generator;
    if (s.attack) j["attack"] = *s.attack;
    j["operation"] = to_string(s.operation);
    j["length_bucket"] = to_string(s.length_bucket);
    j["split"] = to_string(s.split);
    for (const auto& [key, value] : s.extra) j[key] = value;
    return j.dump();
}

Corpus load_corpus(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open corpus file: " + path);

    Corpus corpus;
    std::unordered_set<std::string> seen_ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        Sample s;
        try {
            s = parse_sample_json(line);
        } catch (const DataError& e) {
            throw DataError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
        if (!seen_ids.insert(s.id).second) {
            throw DataError(path + ":" + std::to_string(line_no) + ": duplicate id \"" + s.id + "\"");
        }
        corpus.samples.push_back(std::move(s));
    }

    const std::string sidecar = path + ".meta.json";
    if (std::filesystem::exists(sidecar)) {
        std::ifstream meta(sidecar, std::ios::binary);
        ordered_json j;
        try {
            meta >> j;
        } catch (const nlohmann::json::exception& e) {
            throw DataError(sidecar + ": " + e.what());
        }
        for (const auto& [key, value] : j.items()) {
            corpus.provenance[key] = value.is_string() ? value.get<std::string>() : value.dump();
        }
    }
    return corpus;
}

void save_corpus(const Corpus& corpus, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write corpus file: " + path);
    for (const auto& s : corpus.samples) {
        s.validate();
        out << sample_to_json(s) << '\n';
    }
    out.flush();
    if (!out) throw DataError("write failed: " + path);

    const std::string sidecar = path + ".meta.json";
    if (!corpus.provenance.empty()) {
        ordered_json j = ordered_json::object();
        for (const auto& [key, value] : corpus.provenance) j[key] = value;
        std::ofstream meta(sidecar, std::ios::binary | std::ios::trunc);
        meta << j.dump(2) << '\n';
        if (!meta) throw DataError("write failed: " + sidecar);
    } else {
        std::error_code ec;
        std::filesystem::remove(sidecar, ec);
    }
}

Corpus split_corpus(const Corpus& corpus, SplitRatio ratio,
                    const std::vector<std::string>& strata_keys, std::uint64_t seed) {
    if (ratio.train == 0 || ratio.test == 0) throw DataError("split ratio parts must be positive");
    for (const auto& key : strata_keys) {
        if (!is_metadata_key(key)) throw DataError("unknown strata key: \"" + key + "\"");
    }

    Corpus out = corpus;
    // Stratum key -> sample indices in load order.
    std::map<std::string, std::vector<std::size_t>> strata;
    for (std::size_t i = 0; i < out.samples.size(); ++i) {
        std::string key;
        for (const auto& field : strata_keys) {
            key += field;
            key += '=';
            key += metadata_value(out.samples[i], field).value_or("");
            key += '|';
        }
        strata[key].push_back(i);
    }

    const unsigned total = ratio.train + ratio.test;
    for (auto& [key, indices] : strata) {
        Rng rng(derive_seed(seed, key));
        rng.shuffle(indices);
        const std::size_t n = indices.size();
        const std::size_t n_test = n * ratio.test / total;  // train keeps the remainder
        for (std::size_t k = 0; k < n; ++k) {
            out.samples[indices[k]].split = k < n - n_test ? Split::train : Split::test;
        }
    }
    return out;
}

Corpus filter_corpus(const Corpus& corpus, const SamplePredicate& predicate) {
    Corpus out;
    out.provenance = corpus.provenance;
    for (const auto& s : corpus.samples) {
        if (predicate(s)) out.samples.push_back(s);
    }
    return out;
}

SamplePredicate parse_predicate(std::string_view expr) {
    struct Clause {
        std::string key;
        std::string value;
        bool negated;
    };
    std::vector<Clause> clauses;
    std::stringstream ss{std::string(expr)};
    std::string part;
    while (std::getline(ss, part, ',')) {
        if (part.empty()) continue;
        const auto neq = part.find("!=");
        const auto eq = part.find('=');
        Clause c;
        if (neq != std::string::npos) {
            c.key = part.substr(0, neq);
            c.value = part.substr(neq + 2);
            c.negated = true;
        } else if (eq != std::string::npos) {
            c.key = part.substr(0, eq);
            c.value = part.substr(eq + 1);
            c.negated = false;
        } else {
            throw UsageError("bad filter clause (want key=value or key!=value): \"" + part + "\"");
        }
        if (!is_metadata_key(c.key)) throw UsageError("unknown filter key: \"" + c.key + "\"");
        clauses.push_back(std::move(c));
    }
    return [clauses](const Sample& s) {
        for (const auto& c : clauses) {
            const auto v = metadata_value(s, c.key);
            const bool match = v.has_value() && *v == c.value;
            if (match == c.negated) return false;
        }
        return true;
    };
}

}  // namespace mgtd
