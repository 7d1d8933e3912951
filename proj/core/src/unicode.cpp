#include "adaptmix/unicode.hpp"

#include <algorithm>

#include "unicode_tables.hpp"

namespace adaptmix::uni {
namespace {

using tables::CodepointRange;

bool in_ranges(const CodepointRange* ranges, std::size_t count, char32_t cp) {
    std::size_t lo = 0, hi = count;
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (cp < ranges[mid].first) {
            hi = mid;
        } else if (cp > ranges[mid].last) {
            lo = mid + 1;
        } else {
            return true;
        }
    }
    return false;
}

// Hangul syllable composition constants (UAX #15).
constexpr char32_t kHangulSBase = 0xAC00;
constexpr char32_t kHangulLBase = 0x1100;
constexpr char32_t kHangulVBase = 0x1161;
constexpr char32_t kHangulTBase = 0x11A7;
constexpr int kHangulLCount = 19;
constexpr int kHangulVCount = 21;
constexpr int kHangulTCount = 28;
constexpr int kHangulNCount = kHangulVCount * kHangulTCount;
constexpr int kHangulSCount = kHangulLCount * kHangulNCount;

const tables::DecompositionEntry* find_decomposition(char32_t cp) {
    std::size_t lo = 0, hi = tables::kDecompositionCount;
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (tables::kDecomposition[mid].cp < cp) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    if (lo < tables::kDecompositionCount && tables::kDecomposition[lo].cp == cp) {
        return &tables::kDecomposition[lo];
    }
    return nullptr;
}

char32_t compose_pair(char32_t a, char32_t b) {
    // Hangul L+V and LV+T are algorithmic.
    if (a >= kHangulLBase && a < kHangulLBase + kHangulLCount &&
        b >= kHangulVBase && b < kHangulVBase + kHangulVCount) {
        return kHangulSBase + ((a - kHangulLBase) * kHangulVCount + (b - kHangulVBase)) * kHangulTCount;
    }
    if (a >= kHangulSBase && a < kHangulSBase + kHangulSCount &&
        (a - kHangulSBase) % kHangulTCount == 0 &&
        b > kHangulTBase && b < kHangulTBase + kHangulTCount) {
        return a + (b - kHangulTBase);
    }
    std::size_t lo = 0, hi = tables::kCompositionCount;
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        const auto& e = tables::kComposition[mid];
        if (e.first < a || (e.first == a && e.second < b)) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    if (lo < tables::kCompositionCount && tables::kComposition[lo].first == a &&
        tables::kComposition[lo].second == b) {
        return tables::kComposition[lo].composite;
    }
    return 0;
}

void decompose_cp(char32_t cp, std::u32string& out) {
    if (cp >= kHangulSBase && cp < kHangulSBase + kHangulSCount) {
        char32_t s = cp - kHangulSBase;
        out.push_back(kHangulLBase + s / kHangulNCount);
        out.push_back(kHangulVBase + (s % kHangulNCount) / kHangulTCount);
        char32_t t = s % kHangulTCount;
        if (t != 0) out.push_back(kHangulTBase + t);
        return;
    }
    if (const auto* d = find_decomposition(cp)) {
        decompose_cp(d->first, out);
        if (d->second != 0) decompose_cp(d->second, out);
        return;
    }
    out.push_back(cp);
}

void canonical_order(std::u32string& cps) {
    // Insertion sort within runs of nonzero combining class; stable.
    for (std::size_t i = 1; i < cps.size(); ++i) {
        std::uint8_t ccc = combining_class(cps[i]);
        if (ccc == 0) continue;
        std::size_t j = i;
        while (j > 0 && combining_class(cps[j - 1]) > ccc) {
            std::swap(cps[j - 1], cps[j]);
            --j;
        }
    }
}

}  // namespace

bool is_whitespace(char32_t cp) {
    return in_ranges(tables::kWhitespace, tables::kWhitespaceCount, cp);
}

bool is_digit(char32_t cp) { return in_ranges(tables::kNd, tables::kNdCount, cp); }

bool is_mn(char32_t cp) { return in_ranges(tables::kMn, tables::kMnCount, cp); }

bool is_mc(char32_t cp) { return in_ranges(tables::kMc, tables::kMcCount, cp); }

bool is_mark(char32_t cp) { return is_mn(cp) || is_mc(cp); }

std::uint8_t combining_class(char32_t cp) {
    std::size_t lo = 0, hi = tables::kCombiningClassCount;
    while (lo < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (tables::kCombiningClass[mid].cp < cp) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    if (lo < tables::kCombiningClassCount && tables::kCombiningClass[lo].cp == cp) {
        return tables::kCombiningClass[lo].ccc;
    }
    return 0;
}

std::vector<std::pair<char32_t, char32_t>> mark_ranges() {
    std::vector<std::pair<char32_t, char32_t>> out;
    for (std::size_t i = 0; i < tables::kMnCount; ++i) {
        out.emplace_back(tables::kMn[i].first, tables::kMn[i].last);
    }
    for (std::size_t i = 0; i < tables::kMcCount; ++i) {
        out.emplace_back(tables::kMc[i].first, tables::kMc[i].last);
    }
    std::sort(out.begin(), out.end());
    return out;
}

Utf8Decode decode_utf8(std::string_view text, std::size_t pos) {
    const auto* bytes = reinterpret_cast<const unsigned char*>(text.data());
    unsigned char b0 = bytes[pos];
    if (b0 < 0x80) return {b0, 1, true};

    int len;
    char32_t cp;
    unsigned char min2 = 0x80, max2 = 0xBF;
    if (b0 >= 0xC2 && b0 <= 0xDF) {
        len = 2;
        cp = b0 & 0x1F;
    } else if (b0 >= 0xE0 && b0 <= 0xEF) {
        len = 3;
        cp = b0 & 0x0F;
        if (b0 == 0xE0) min2 = 0xA0;
        if (b0 == 0xED) max2 = 0x9F;  // reject surrogates
    } else if (b0 >= 0xF0 && b0 <= 0xF4) {
        len = 4;
        cp = b0 & 0x07;
        if (b0 == 0xF0) min2 = 0x90;
        if (b0 == 0xF4) max2 = 0x8F;
    } else {
        return {kReplacementChar, 1, false};
    }
    if (pos + static_cast<std::size_t>(len) > text.size()) {
        return {kReplacementChar, 1, false};
    }
    for (int i = 1; i < len; ++i) {
        unsigned char b = bytes[pos + i];
        unsigned char lo = (i == 1) ? min2 : 0x80;
        unsigned char hi = (i == 1) ? max2 : 0xBF;
        if (b < lo || b > hi) return {kReplacementChar, 1, false};
        cp = (cp << 6) | (b & 0x3F);
    }
    return {cp, len, true};
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

std::string to_utf8(char32_t cp) {
    std::string out;
    append_utf8(out, cp);
    return out;
}

bool validate_utf8(std::string_view text, std::size_t* bad_offset) {
    std::size_t pos = 0;
    while (pos < text.size()) {
        Utf8Decode d = decode_utf8(text, pos);
        if (!d.ok) {
            if (bad_offset) *bad_offset = pos;
            return false;
        }
        pos += d.length;
    }
    return true;
}

std::size_t count_codepoints(std::string_view text) {
    std::size_t pos = 0, n = 0;
    while (pos < text.size()) {
        pos += decode_utf8(text, pos).length;
        ++n;
    }
    return n;
}

std::u32string decode_utf8_string(std::string_view text) {
    std::u32string out;
    out.reserve(text.size());
    std::size_t pos = 0;
    while (pos < text.size()) {
        Utf8Decode d = decode_utf8(text, pos);
        out.push_back(d.cp);
        pos += d.length;
    }
    return out;
}

std::string encode_utf8(const std::u32string& cps) {
    std::string out;
    out.reserve(cps.size());
    for (char32_t cp : cps) append_utf8(out, cp);
    return out;
}

std::string nfc(std::string_view text) {
    // Fast path: nothing in the text can decompose, reorder, or compose.
    bool safe = true;
    std::size_t pos = 0;
    while (pos < text.size()) {
        Utf8Decode d = decode_utf8(text, pos);
        if (!d.ok || in_ranges(tables::kNfcUnsafe, tables::kNfcUnsafeCount, d.cp)) {
            safe = false;
            break;
        }
        pos += d.length;
    }
    if (safe) return std::string(text);

    std::u32string decomposed;
    decomposed.reserve(text.size());
    pos = 0;
    while (pos < text.size()) {
        Utf8Decode d = decode_utf8(text, pos);
        decompose_cp(d.cp, decomposed);
        pos += d.length;
    }
    canonical_order(decomposed);

    std::u32string out;
    out.reserve(decomposed.size());
    std::ptrdiff_t last_starter = -1;
    for (char32_t cp : decomposed) {
        std::uint8_t ccc = combining_class(cp);
        if (last_starter >= 0) {
            bool immediately_follows =
                out.size() == static_cast<std::size_t>(last_starter) + 1;
            bool unblocked =
                immediately_follows || combining_class(out.back()) < ccc;
            if (unblocked) {
                if (char32_t composite = compose_pair(out[last_starter], cp)) {
                    out[last_starter] = composite;
                    continue;
                }
            }
        }
        out.push_back(cp);
        if (ccc == 0) last_starter = static_cast<std::ptrdiff_t>(out.size()) - 1;
    }
    return encode_utf8(out);
}

}  // namespace adaptmix::uni
