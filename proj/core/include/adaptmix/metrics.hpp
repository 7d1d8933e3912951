#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "adaptmix/bpe.hpp"
#include "adaptmix/corpus.hpp"

namespace adaptmix {

// Per-language token-to-word ratios for one tokenizer evaluation. Range and
// average are derived from the fertility map.
struct FertilityReport {
    std::uint64_t iteration = 0;
    std::map<LanguageId, double> fertility;
    double f_min = 0.0;
    double f_max = 0.0;
    double f_range = 0.0;
    double average = 0.0;

    void derive();  // recomputes f_min/f_max/f_range/average
};

struct ParityReport {
    LanguageId reference;
    std::map<LanguageId, double> parity;  // f_l / f_reference
};

// Corpus-level ratio of sums: total tokens over all documents (tokens from
// whitespace- and newline-kind segments excluded, so separator tokens cannot
// push a word-level ratio below 1) divided by total words. Throws on a corpus
// with zero words.
double fertility(const TokenizerModel& model, const SampledCorpus& eval_corpus);

// Fertility per language plus derived range statistics. Languages evaluate in
// parallel; sums per language are integer totals, so results do not depend on
// the thread count.
FertilityReport evaluate(const TokenizerModel& model,
                         const std::map<LanguageId, SampledCorpus>& eval_set,
                         int threads = 0);

ParityReport parity(const FertilityReport& report, const LanguageId& reference);

// CSV layout: header `language,fertility[,parity]`, one row per language in
// lexicographic order, then a trailing `average` row.
std::string report_to_csv(const FertilityReport& report,
                          const ParityReport* parity_report = nullptr);
std::string report_to_json(const FertilityReport& report,
                           const ParityReport* parity_report = nullptr);

// Self-roundtrip readers for the exports above.
FertilityReport report_from_json(const std::string& text);
FertilityReport report_from_csv(const std::string& text);

}  // namespace adaptmix
