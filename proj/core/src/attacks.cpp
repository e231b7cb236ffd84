#include "mgtd/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "mgtd/rng.hpp"
#include "mgtd/utf8.hpp"

namespace mgtd {

namespace {

constexpr std::pair<std::string_view, AttackKind> kKindNames[] = {
    {"char_insert", AttackKind::char_insert},
    {"char_substitute", AttackKind::char_substitute},
    {"char_delete", AttackKind::char_delete},
    {"zero_width_insert", AttackKind::zero_width_insert},
    {"encoder_paraphrase", AttackKind::encoder_paraphrase},
    {"seq2seq_paraphrase", AttackKind::seq2seq_paraphrase},
    {"decoder_paraphrase", AttackKind::decoder_paraphrase},
    {"back_translate", AttackKind::back_translate},
};

bool is_zero_width(char32_t c) {
    for (char32_t z : kZeroWidthChars) {
        if (c == z) return true;
    }
    return false;
}

void check_rate(double rate) {
    if (!(rate > 0.0) || rate > 1.0) {
        throw DataError("attack rate must be in (0, 1], got " + std::to_string(rate));
    }
}

std::size_t target_budget(double rate, std::size_t word_count) {
    if (word_count == 0) return 0;
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(rate * static_cast<double>(word_count))));
}

std::vector<std::size_t> shuffled_word_indices(const std::vector<WordSpan>& spans, Rng& rng) {
    std::vector<std::size_t> words;
    for (std::size_t i = 0; i < spans.size(); ++i) {
        if (spans[i].is_word) words.push_back(i);
    }
    rng.shuffle(words);
    return words;
}

// Per-word edit attempt: returns the replacement word content, or nullopt
// when this word cannot take the edit. `edit` gets span-relative offsets.
using EditFn = std::function<std::optional<std::u32string>(std::u32string_view word, Rng& rng, Edit& edit)>;

AttackResult run_perturbation(std::string_view text, double rate, std::uint64_t seed,
                              const EditFn& try_edit) {
    check_rate(rate);
    if (text.empty()) throw DataError("attack input text is empty");

    const std::u32string chars = utf8::decode(text);
    const std::vector<WordSpan> spans = tokenize_words(chars);

    AttackResult result;
    auto& report = result.report;
    for (const auto& s : spans) {
        if (s.is_word) ++report.word_count;
    }
    report.budget = target_budget(rate, report.word_count);

    Rng rng(seed);
    const std::vector<std::size_t> order = shuffled_word_indices(spans, rng);

    // span index -> (replacement content, span-relative edit)
    std::map<std::size_t, std::pair<std::u32string, Edit>> replacements;
    for (std::size_t idx : order) {
        if (report.modified == report.budget) break;
        const WordSpan& span = spans[idx];
        const std::u32string_view word(chars.data() + span.start, span.end - span.start);
        Edit edit;
        edit.word_index = idx;
        if (auto replaced = try_edit(word, rng, edit)) {
            replacements.emplace(idx, std::make_pair(std::move(*replaced), edit));
            ++report.modified;
        }
    }
    report.skipped = report.budget - report.modified;

    std::u32string out;
    out.reserve(chars.size() + report.modified);
    for (std::size_t i = 0; i < spans.size(); ++i) {
        const WordSpan& span = spans[i];
        const auto it = replacements.find(i);
        if (it == replacements.end()) {
            out.append(chars, span.start, span.end - span.start);
        } else {
            Edit edit = it->second.second;
            edit.offset += out.size();
            report.edits.push_back(edit);
            out.append(it->second.first);
        }
    }
    result.text = utf8::encode(out);
    return result;
}

}  // namespace

std::string_view to_string(AttackKind k) {
    for (const auto& [name, value] : kKindNames) {
        if (value == k) return name;
    }
    return "?";
}

AttackKind parse_attack_kind(std::string_view s) {
    for (const auto& [name, value] : kKindNames) {
        if (name == s) return value;
    }
    throw DataError("unknown attack kind: \"" + std::string(s) + "\"");
}

bool is_native_attack(AttackKind k) {
    return k == AttackKind::char_insert || k == AttackKind::char_substitute ||
           k == AttackKind::char_delete || k == AttackKind::zero_width_insert;
}

std::vector<WordSpan> tokenize_words(std::u32string_view text) {
    std::vector<WordSpan> spans;
    const std::size_t n = text.size();
    std::size_t i = 0;
    while (i < n) {
        if (utf8::is_space(text[i])) {
            std::size_t j = i;
            while (j < n && utf8::is_space(text[j])) ++j;
            spans.push_back({i, j, false});
            i = j;
            continue;
        }
        std::size_t run_end = i;
        while (run_end < n && !utf8::is_space(text[run_end])) ++run_end;
        std::size_t k = i;
        while (k < run_end) {
            std::size_t e;
            if (utf8::is_cjk(text[k])) {
                e = k + 1;
                while (e < run_end && utf8::is_combining(text[e])) ++e;
            } else {
                e = k + 1;
                while (e < run_end && !utf8::is_cjk(text[e])) ++e;
            }
            spans.push_back({k, e, true});
            k = e;
        }
        i = run_end;
    }
    return spans;
}

std::vector<WordSpan> tokenize_words_utf8(std::string_view text) {
    return tokenize_words(utf8::decode(text));
}

std::vector<std::size_t> sample_targets(const std::vector<WordSpan>& spans, double rate,
                                        std::uint64_t seed) {
    check_rate(rate);
    std::size_t word_count = 0;
    for (const auto& s : spans) {
        if (s.is_word) ++word_count;
    }
    if (word_count == 0) return {};

    Rng rng(seed);
    std::vector<std::size_t> order = shuffled_word_indices(spans, rng);
    order.resize(target_budget(rate, word_count));
    std::sort(order.begin(), order.end());
    return order;
}

AttackResult char_insert(std::string_view text, double rate, std::uint64_t seed) {
    return run_perturbation(text, rate, seed,
                            [](std::u32string_view word, Rng& rng, Edit& edit) -> std::optional<std::u32string> {
                                // duplicate the character before the insertion point
                                const std::size_t pos = 1 + rng.below(word.size());
                                std::u32string out(word);
                                out.insert(out.begin() + static_cast<std::ptrdiff_t>(pos), word[pos - 1]);
                                edit.offset = pos;
                                edit.inserted = word[pos - 1];
                                return out;
                            });
}

AttackResult char_substitute(std::string_view text, double rate, std::uint64_t seed,
                             const ConfusablesTable& table) {
    if (table.empty()) throw DataError("confusables table is empty");
    return run_perturbation(
        text, rate, seed,
        [&table](std::u32string_view word, Rng& rng, Edit& edit) -> std::optional<std::u32string> {
            std::vector<std::size_t> mappable;
            for (std::size_t i = 0; i < word.size(); ++i) {
                if (table.find(word[i]) != nullptr) mappable.push_back(i);
            }
            if (mappable.empty()) return std::nullopt;
            const std::size_t pos = mappable[rng.below(mappable.size())];
            const auto& choices = *table.find(word[pos]);
            const char32_t repl = choices[rng.below(choices.size())];
            std::u32string out(word);
            edit.offset = pos;
            edit.removed = out[pos];
            edit.inserted = repl;
            out[pos] = repl;
            return out;
        });
}

AttackResult char_delete(std::string_view text, double rate, std::uint64_t seed) {
    return run_perturbation(text, rate, seed,
                            [](std::u32string_view word, Rng& rng, Edit& edit) -> std::optional<std::u32string> {
                                if (word.size() < 2) return std::nullopt;
                                const std::size_t pos = rng.below(word.size());
                                std::u32string out(word);
                                edit.offset = pos;
                                edit.removed = out[pos];
                                out.erase(out.begin() + static_cast<std::ptrdiff_t>(pos));
                                return out;
                            });
}

AttackResult zero_width_insert(std::string_view text, double rate, std::uint64_t seed) {
    return run_perturbation(text, rate, seed,
                            [](std::u32string_view word, Rng& rng, Edit& edit) -> std::optional<std::u32string> {
                                if (word.size() < 2) return std::nullopt;  // needs an interior position
                                const std::size_t pos = 1 + rng.below(word.size() - 1);
                                const char32_t c = kZeroWidthChars[rng.below(4)];
                                std::u32string out(word);
                                out.insert(out.begin() + static_cast<std::ptrdiff_t>(pos), c);
                                edit.offset = pos;
                                edit.inserted = c;
                                return out;
                            });
}

std::string strip_zero_width(std::string_view text) {
    const std::u32string chars = utf8::decode(text);
    std::u32string out;
    out.reserve(chars.size());
    for (char32_t c : chars) {
        if (!is_zero_width(c)) out.push_back(c);
    }
    return utf8::encode(out);
}

ConfusablesTable ConfusablesTable::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open confusables table: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str(), path);
}

ConfusablesTable ConfusablesTable::parse(std::string_view content, std::string_view origin) {
    ConfusablesTable table;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= content.size()) {
        const std::size_t nl = content.find('\n', pos);
        std::string_view line = content.substr(pos, nl == std::string_view::npos ? nl : nl - pos);
        pos = nl == std::string_view::npos ? content.size() + 1 : nl + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty() || line.front() == '#') continue;

        const std::size_t tab = line.find('\t');
        if (tab == std::string_view::npos) {
            throw DataError(std::string(origin) + ":" + std::to_string(line_no) +
                            ": expected SRC<TAB>REPL...");
        }
        const std::u32string key = utf8::decode(line.substr(0, tab));
        if (key.size() != 1) {
            throw DataError(std::string(origin) + ":" + std::to_string(line_no) +
                            ": source must be a single character");
        }
        std::size_t added = 0;
        for (const std::u32string field = utf8::decode(line.substr(tab + 1)); const char32_t c : field) {
            if (utf8::is_space(c)) continue;
            table.add(key[0], c);
            ++added;
        }
        if (added == 0) {
            throw DataError(std::string(origin) + ":" + std::to_string(line_no) +
                            ": no replacements listed");
        }
    }
    return table;
}

void ConfusablesTable::add(char32_t key, char32_t replacement) {
    if (key == replacement) {
        throw DataError("confusable maps to itself: U+" + std::to_string(static_cast<std::uint32_t>(key)));
    }
    auto& list = map_[key];
    if (std::find(list.begin(), list.end(), replacement) == list.end()) {
        list.push_back(replacement);
    }
}

const std::vector<char32_t>* ConfusablesTable::find(char32_t key) const {
    const auto it = map_.find(key);
    return it == map_.end() ? nullptr : &it->second;
}

std::string back_translate(std::string_view text, Language language, TransformClient& client) {
    const std::string source(to_string(language));
    const std::string pivot = language == Language::en ? "zh" : "en";
    const std::string task(to_string(AttackKind::back_translate));

    const std::string intermediate = client.transform(task, std::string(text), source, pivot);
    if (intermediate.empty()) throw BackendError("back-translation backend returned empty text");
    const std::string round_trip = client.transform(task, intermediate, pivot, source);
    if (round_trip.empty()) throw BackendError("back-translation backend returned empty text");
    return round_trip;
}

Sample apply_attack(const Sample& sample, const AttackSpec& spec, const ConfusablesTable* table,
                    TransformClient* backend, AttackReport* report) {
    Sample out = sample;
    out.attack = std::string(to_string(spec.kind));

    if (is_native_attack(spec.kind)) {
        const std::uint64_t seed = derive_seed(spec.seed, sample.id);
        AttackResult result;
        switch (spec.kind) {
            case AttackKind::char_insert:
                result = char_insert(sample.text, spec.rate, seed);
                break;
            case AttackKind::char_substitute:
                if (table == nullptr) throw DataError("char_substitute needs a confusables table");
                result = char_substitute(sample.text, spec.rate, seed, *table);
                break;
            case AttackKind::char_delete:
                result = char_delete(sample.text, spec.rate, seed);
                break;
            default:
                result = zero_width_insert(sample.text, spec.rate, seed);
                break;
        }
        out.text = std::move(result.text);
        if (report != nullptr) *report = std::move(result.report);
        return out;
    }

    if (backend == nullptr) {
        throw DataError("attack kind \"" + std::string(to_string(spec.kind)) +
                        "\" requires a transform backend");
    }
    const std::string lang(to_string(sample.language));
    std::string transformed;
    if (spec.kind == AttackKind::back_translate) {
        transformed = back_translate(sample.text, sample.language, *backend);
    } else {
        transformed = backend->transform(std::string(to_string(spec.kind)), sample.text, lang, lang);
        if (transformed.empty()) throw BackendError("transform backend returned empty text");
    }
    out.text = std::move(transformed);
    if (report != nullptr) *report = AttackReport{};
    return out;
}

}  // namespace mgtd
