#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace adaptmix {

// PT0: no diacritic separation. PT1: separate only a configured subset.
// PT2: separate every combining mark (general categories Mn and Mc).
enum class PretokStrategy { PT0, PT1, PT2 };

struct PreTokenizerConfig {
    PretokStrategy strategy = PretokStrategy::PT0;
    std::vector<char32_t> diacritic_subset;  // sorted ascending; PT1 only
    bool digit_split = true;
    int whitespace_group_max = 4;  // longest run of non-newline whitespace kept whole
    bool split_on_newline = true;

    void validate() const;  // throws Error on invariant violations
};

enum class SegmentKind { Word, Digit, Whitespace, Newline, Mark };

struct Segment {
    std::string text;
    SegmentKind kind;
};

// Ordered segments whose concatenation reproduces the input byte-for-byte.
using PreTokenStream = std::vector<Segment>;

// Splits text into segments: each digit alone (category Nd), newlines alone,
// whitespace runs chunked at whitespace_group_max, and separated diacritics
// per the strategy. Segments act as hard merge barriers for BPE. Total over
// arbitrary bytes; invalid UTF-8 bytes pass through inside word segments.
PreTokenStream pretokenize(std::string_view text, const PreTokenizerConfig& config);

bool is_diacritic(char32_t cp, const PreTokenizerConfig& config);

// Subset shipped for PT1 when no file is given: virama and nukta marks of the
// nine main Indic blocks (Devanagari through Malayalam).
std::vector<char32_t> default_diacritic_subset();

// Parses a JSON array of code points spelled "U+XXXX".
std::vector<char32_t> load_diacritic_subset(const std::filesystem::path& path);

const char* segment_kind_name(SegmentKind kind);
const char* strategy_name(PretokStrategy strategy);
PretokStrategy strategy_from_name(std::string_view name);  // "pt0"|"pt1"|"pt2"

}  // namespace adaptmix
