#include "adaptmix/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "adaptmix/errors.hpp"
#include "adaptmix/rng.hpp"
#include "adaptmix/unicode.hpp"

namespace adaptmix {
namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IngestError(path.string(), "cannot read file");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) {
        throw IngestError(path.string(), "read failure");
    }
    return std::move(buf).str();
}

std::string lowercase_ascii(std::string s) {
    for (char& c : s) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return s;
}

void add_document(CorpusStore& store, const LanguageId& lang, std::string text) {
    auto& totals = store.totals[lang];
    totals.documents += 1;
    totals.characters += uni::count_codepoints(text);
    totals.words += count_words(text);
    store.documents[lang].push_back(std::move(text));
}

// Longest prefix of `text` holding at most `budget` scalar values that does
// not end mid-word. Returns the byte length of the prefix and writes the
// number of scalar values kept to `kept`.
std::size_t word_boundary_prefix(std::string_view text, std::uint64_t budget,
                                 std::uint64_t* kept) {
    std::size_t pos = 0;           // byte cursor
    std::uint64_t count = 0;       // scalar values consumed
    std::size_t cut_bytes = 0;     // last admissible cut
    std::uint64_t cut_count = 0;
    bool prev_ws = true;           // start of text is a word boundary
    while (pos < text.size() && count < budget) {
        uni::Utf8Decode d = uni::decode_utf8(text, pos);
        bool ws = d.ok && uni::is_whitespace(d.cp);
        if (ws || prev_ws) {
            // Cutting before a whitespace char, or right after one, never
            // splits a non-whitespace run.
            cut_bytes = pos;
            cut_count = count;
        }
        prev_ws = ws;
        pos += d.length;
        ++count;
    }
    // The stopping point itself is admissible when it does not split a
    // non-whitespace run: at end-of-text, after whitespace, or before it.
    bool admissible = pos == text.size() || prev_ws;
    if (!admissible) {
        uni::Utf8Decode d = uni::decode_utf8(text, pos);
        admissible = d.ok && uni::is_whitespace(d.cp);
    }
    if (admissible) {
        cut_bytes = pos;
        cut_count = count;
    }
    *kept = cut_count;
    return cut_bytes;
}

}  // namespace

std::vector<LanguageId> CorpusStore::languages() const {
    std::vector<LanguageId> out;
    out.reserve(documents.size());
    for (const auto& [lang, docs] : documents) {
        out.push_back(lang);
    }
    return out;
}

std::uint64_t count_words(std::string_view text) {
    std::uint64_t words = 0;
    bool in_word = false;
    std::size_t pos = 0;
    while (pos < text.size()) {
        uni::Utf8Decode d = uni::decode_utf8(text, pos);
        bool ws = d.ok && uni::is_whitespace(d.cp);
        if (!ws && !in_word) {
            ++words;
        }
        in_word = !ws;
        pos += d.length;
    }
    return words;
}

CorpusStore ingest(const std::filesystem::path& root,
                   std::vector<std::string>* warnings) {
    std::error_code ec;
    if (!std::filesystem::is_directory(root, ec)) {
        throw IngestError(root.string(), "corpus root is not a readable directory");
    }

    enum class Delimiter { File, Line };
    Delimiter delim = Delimiter::File;
    auto manifest_path = root / "manifest.json";
    if (std::filesystem::exists(manifest_path, ec)) {
        nlohmann::json manifest;
        try {
            manifest = nlohmann::json::parse(read_file(manifest_path));
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(manifest_path.string() + ": " + e.what());
        }
        if (manifest.contains("doc_delimiter")) {
            const auto& v = manifest["doc_delimiter"];
            if (v == "file") {
                delim = Delimiter::File;
            } else if (v == "line") {
                delim = Delimiter::Line;
            } else {
                throw ParseError(manifest_path.string() +
                                 ": doc_delimiter must be \"file\" or \"line\"");
            }
        }
    }

    CorpusStore store;
    std::vector<std::filesystem::path> lang_dirs;
    for (const auto& entry : std::filesystem::directory_iterator(root)) {
        if (entry.is_directory()) {
            lang_dirs.push_back(entry.path());
        }
    }
    std::sort(lang_dirs.begin(), lang_dirs.end());

    for (const auto& dir : lang_dirs) {
        LanguageId lang = lowercase_ascii(dir.filename().string());
        if (lang.empty()) {
            throw IngestError(dir.string(), "language directory has empty name");
        }
        // Register the language even if no files follow.
        store.documents[lang];
        store.totals[lang];

        std::vector<std::filesystem::path> files;
        for (const auto& entry : std::filesystem::directory_iterator(dir)) {
            if (entry.is_regular_file() && entry.path().extension() == ".txt") {
                files.push_back(entry.path());
            }
        }
        std::sort(files.begin(), files.end());
        if (files.empty()) {
            if (warnings) {
                warnings->push_back("language '" + lang + "' has no .txt files: " +
                                    dir.string());
            }
            continue;
        }

        for (const auto& file : files) {
            std::string raw = read_file(file);
            std::size_t bad = 0;
            if (!uni::validate_utf8(raw, &bad)) {
                throw IngestError(file.string(), bad, "invalid UTF-8");
            }
            if (delim == Delimiter::File) {
                add_document(store, lang, uni::nfc(raw));
            } else {
                std::size_t start = 0;
                while (start < raw.size()) {
                    std::size_t end = raw.find('\n', start);
                    if (end == std::string::npos) end = raw.size();
                    if (end > start) {
                        add_document(store, lang,
                                     uni::nfc(std::string_view(raw).substr(start, end - start)));
                    }
                    start = end + 1;
                }
            }
        }
    }
    return store;
}

SampledCorpus sample_characters(const CorpusStore& store, const LanguageId& lang,
                                std::uint64_t budget, std::uint64_t seed) {
    auto it = store.documents.find(lang);
    if (it == store.documents.end()) {
        throw UnknownLanguageError(lang);
    }
    SampledCorpus sample;
    sample.language = lang;
    sample.seed = seed;
    if (budget == 0) {
        return sample;
    }

    const auto& docs = it->second;
    std::uint64_t lang_chars = store.totals.at(lang).characters;
    if (docs.empty() || lang_chars == 0) {
        // Nothing to draw from; an empty sample is the only honest answer.
        return sample;
    }

    std::vector<std::size_t> order(docs.size());
    std::uint64_t pass = 0;
    for (;;) {
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        SplitMix64 rng(mix_seed(seed, pass));
        deterministic_shuffle(order, rng);

        for (std::size_t idx : order) {
            const std::string& doc = docs[idx];
            std::uint64_t len = uni::count_codepoints(doc);
            std::uint64_t remaining = budget - sample.character_count;
            if (len < remaining) {
                sample.documents.push_back(doc);
                sample.character_count += len;
                continue;
            }
            // This document crosses the budget: truncate at a word boundary.
            std::uint64_t kept = 0;
            std::size_t bytes = word_boundary_prefix(doc, remaining, &kept);
            if (bytes > 0) {
                sample.documents.emplace_back(doc.substr(0, bytes));
                sample.character_count += kept;
            }
            return sample;
        }
        ++pass;
    }
}

std::string stats_to_json(const CorpusStore& store) {
    nlohmann::ordered_json out = nlohmann::ordered_json::object();
    for (const auto& [lang, totals] : store.totals) {
        out[lang] = {{"documents", totals.documents},
                     {"characters", totals.characters},
                     {"words", totals.words}};
    }
    return out.dump(2) + "\n";
}

std::map<LanguageId, LanguageTotals> stats_from_json(const std::string& text) {
    nlohmann::json parsed;
    try {
        parsed = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("statistics JSON: ") + e.what());
    }
    if (!parsed.is_object()) {
        throw ParseError("statistics JSON: expected an object keyed by language");
    }
    std::map<LanguageId, LanguageTotals> out;
    for (const auto& [lang, entry] : parsed.items()) {
        if (!entry.is_object() || !entry.contains("documents") ||
            !entry.contains("characters") || !entry.contains("words")) {
            throw ParseError("statistics JSON: language '" + lang +
                             "' must hold documents/characters/words");
        }
        LanguageTotals t;
        t.documents = entry["documents"].get<std::uint64_t>();
        t.characters = entry["characters"].get<std::uint64_t>();
        t.words = entry["words"].get<std::uint64_t>();
        out[lang] = t;
    }
    return out;
}

}  // namespace adaptmix
