#include "adaptmix/pretokenizer.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "adaptmix/errors.hpp"
#include "adaptmix/unicode.hpp"

namespace adaptmix {
namespace {

char32_t parse_uplus(const std::string& spelled) {
    if (spelled.size() < 3 || spelled[0] != 'U' || spelled[1] != '+') {
        throw ParseError("diacritic subset: expected \"U+XXXX\", got \"" + spelled + "\"");
    }
    char32_t cp = 0;
    for (std::size_t i = 2; i < spelled.size(); ++i) {
        char c = spelled[i];
        int digit;
        if (c >= '0' && c <= '9') {
            digit = c - '0';
        } else if (c >= 'A' && c <= 'F') {
            digit = c - 'A' + 10;
        } else if (c >= 'a' && c <= 'f') {
            digit = c - 'a' + 10;
        } else {
            throw ParseError("diacritic subset: bad hex digit in \"" + spelled + "\"");
        }
        cp = cp * 16 + static_cast<char32_t>(digit);
        if (cp > uni::kMaxCodepoint) {
            throw ParseError("diacritic subset: code point out of range in \"" + spelled + "\"");
        }
    }
    return cp;
}

enum class CharClass { Word, Digit, Whitespace, Newline, Mark };

CharClass classify(char32_t cp, bool valid, const PreTokenizerConfig& config) {
    if (!valid) return CharClass::Word;  // raw byte, handled by byte fallback
    if (config.split_on_newline && (cp == U'\n' || cp == U'\r')) {
        return CharClass::Newline;
    }
    if (uni::is_whitespace(cp)) return CharClass::Whitespace;
    if (config.digit_split && uni::is_digit(cp)) return CharClass::Digit;
    if (is_diacritic(cp, config)) return CharClass::Mark;
    return CharClass::Word;
}

SegmentKind to_kind(CharClass c) {
    switch (c) {
        case CharClass::Digit: return SegmentKind::Digit;
        case CharClass::Whitespace: return SegmentKind::Whitespace;
        case CharClass::Newline: return SegmentKind::Newline;
        case CharClass::Mark: return SegmentKind::Mark;
        case CharClass::Word: break;
    }
    return SegmentKind::Word;
}

}  // namespace

void PreTokenizerConfig::validate() const {
    if (whitespace_group_max < 1) {
        throw Error("whitespace_group_max must be at least 1");
    }
    if (!std::is_sorted(diacritic_subset.begin(), diacritic_subset.end())) {
        throw Error("diacritic subset must be sorted ascending");
    }
    if (strategy == PretokStrategy::PT1) {
        for (char32_t cp : diacritic_subset) {
            if (!uni::is_mark(cp)) {
                throw Error("diacritic subset entry U+" +
                            [cp] {
                                std::ostringstream hex;
                                hex << std::uppercase << std::hex << static_cast<std::uint32_t>(cp);
                                return hex.str();
                            }() +
                            " is not a combining mark");
            }
        }
    }
}

bool is_diacritic(char32_t cp, const PreTokenizerConfig& config) {
    switch (config.strategy) {
        case PretokStrategy::PT0:
            return false;
        case PretokStrategy::PT1:
            return std::binary_search(config.diacritic_subset.begin(),
                                      config.diacritic_subset.end(), cp);
        case PretokStrategy::PT2:
            return uni::is_mark(cp);
    }
    return false;
}

PreTokenStream pretokenize(std::string_view text, const PreTokenizerConfig& config) {
    PreTokenStream out;
    std::size_t pos = 0;
    std::size_t seg_start = 0;       // byte offset of the open segment
    int seg_units = 0;               // scalar values in the open segment
    CharClass seg_class = CharClass::Word;

    auto flush = [&](std::size_t end) {
        if (end > seg_start) {
            out.push_back({std::string(text.substr(seg_start, end - seg_start)),
                           to_kind(seg_class)});
        }
        seg_start = end;
        seg_units = 0;
    };

    while (pos < text.size()) {
        uni::Utf8Decode d = uni::decode_utf8(text, pos);
        CharClass cls = classify(d.cp, d.ok, config);

        bool boundary = false;
        if (seg_units > 0) {
            if (cls != seg_class) {
                boundary = true;
            } else if (cls == CharClass::Digit || cls == CharClass::Mark ||
                       cls == CharClass::Newline) {
                boundary = true;  // these are always single-character segments
            } else if (cls == CharClass::Whitespace &&
                       seg_units >= config.whitespace_group_max) {
                boundary = true;
            }
        }
        if (boundary) flush(pos);
        if (seg_units == 0) seg_class = cls;
        seg_units += 1;
        pos += d.length;
    }
    flush(pos);
    return out;
}

std::vector<char32_t> default_diacritic_subset() {
    // Nukta (ccc 7) and virama (ccc 9) marks across the Indic blocks
    // U+0900–U+0D7F. Mirrors configs/pt1_subset.json.
    return {0x093C, 0x094D, 0x09BC, 0x09CD, 0x0A3C, 0x0A4D, 0x0ABC, 0x0ACD, 0x0B3C,
            0x0B4D, 0x0BCD, 0x0C4D, 0x0CBC, 0x0CCD, 0x0D3B, 0x0D3C, 0x0D4D};
}

std::vector<char32_t> load_diacritic_subset(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IngestError(path.string(), "cannot read diacritic subset file");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    nlohmann::json parsed;
    try {
        parsed = nlohmann::json::parse(buf.str());
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    if (!parsed.is_array()) {
        throw ParseError(path.string() + ": expected a JSON array of \"U+XXXX\" strings");
    }
    std::vector<char32_t> out;
    out.reserve(parsed.size());
    for (const auto& item : parsed) {
        if (!item.is_string()) {
            throw ParseError(path.string() + ": expected a JSON array of \"U+XXXX\" strings");
        }
        out.push_back(parse_uplus(item.get<std::string>()));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

const char* segment_kind_name(SegmentKind kind) {
    switch (kind) {
        case SegmentKind::Word: return "word";
        case SegmentKind::Digit: return "digit";
        case SegmentKind::Whitespace: return "whitespace";
        case SegmentKind::Newline: return "newline";
        case SegmentKind::Mark: return "mark";
    }
    return "word";
}

const char* strategy_name(PretokStrategy strategy) {
    switch (strategy) {
        case PretokStrategy::PT0: return "pt0";
        case PretokStrategy::PT1: return "pt1";
        case PretokStrategy::PT2: return "pt2";
    }
    return "pt0";
}

PretokStrategy strategy_from_name(std::string_view name) {
    if (name == "pt0") return PretokStrategy::PT0;
    if (name == "pt1") return PretokStrategy::PT1;
    if (name == "pt2") return PretokStrategy::PT2;
    throw ParseError("unknown pre-tokenization strategy '" + std::string(name) +
                     "' (expected pt0, pt1, or pt2)");
}

}  // namespace adaptmix
