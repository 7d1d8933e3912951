#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace adaptmix {

// Short language tag (directory name under the corpus root), lowercased at
// ingestion so "HI" and "hi" name the same language.
using LanguageId = std::string;

struct LanguageTotals {
    std::uint64_t documents = 0;
    std::uint64_t characters = 0;  // Unicode scalar values, not bytes
    std::uint64_t words = 0;
};

// Language-tagged document collections. Read-only after ingest(); safe for
// concurrent readers.
struct CorpusStore {
    std::map<LanguageId, std::vector<std::string>> documents;
    std::map<LanguageId, LanguageTotals> totals;

    bool has_language(const LanguageId& lang) const {
        return documents.find(lang) != documents.end();
    }
    std::vector<LanguageId> languages() const;
};

// Deterministic character-budget sample drawn from one language.
struct SampledCorpus {
    LanguageId language;
    std::vector<std::string> documents;
    std::uint64_t character_count = 0;
    std::uint64_t seed = 0;
};

// Number of maximal runs of non-whitespace scalar values (Unicode White_Space
// property defines whitespace).
std::uint64_t count_words(std::string_view text);

// Reads `<root>/<lang>/*.txt` (UTF-8). An optional `manifest.json` at the root
// selects the document delimiter: {"doc_delimiter": "file" | "line"}, default
// "file". Text is NFC-normalized before storage. Unreadable files and invalid
// UTF-8 raise IngestError; empty language directories produce a warning and a
// language with zero totals.
CorpusStore ingest(const std::filesystem::path& root,
                   std::vector<std::string>* warnings = nullptr);

// Selects documents by seeded shuffle until the cumulative character count
// first reaches `budget`; the crossing document is truncated at a word
// boundary so the sample never exceeds the budget. If the language holds fewer
// characters than the budget, documents repeat in fresh shuffled passes (one
// derived seed per pass). Deterministic in (store, lang, budget, seed).
SampledCorpus sample_characters(const CorpusStore& store, const LanguageId& lang,
                                std::uint64_t budget, std::uint64_t seed);

// JSON map {lang: {documents, characters, words}} and its inverse.
std::string stats_to_json(const CorpusStore& store);
std::map<LanguageId, LanguageTotals> stats_from_json(const std::string& text);

}  // namespace adaptmix
