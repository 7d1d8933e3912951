#include <doctest.h>

#include <string>

#include "adaptmix/unicode.hpp"

using namespace adaptmix;

namespace {
// Frozen pairs produced by an external normalizer (see tools/gen_unicode_tables.py).
#include "nfc_fixtures.inc"
}  // namespace

TEST_CASE("whitespace property") {
    CHECK(uni::is_whitespace(U' '));
    CHECK(uni::is_whitespace(U'\t'));
    CHECK(uni::is_whitespace(U'\n'));
    CHECK(uni::is_whitespace(U'\r'));
    CHECK(uni::is_whitespace(U' '));  // no-break space
    CHECK(uni::is_whitespace(U'　'));  // ideographic space
    CHECK_FALSE(uni::is_whitespace(U'a'));
    CHECK_FALSE(uni::is_whitespace(U'​'));  // zero width space is not White_Space
}

TEST_CASE("digit property covers ASCII and Indic blocks") {
    CHECK(uni::is_digit(U'0'));
    CHECK(uni::is_digit(U'9'));
    CHECK(uni::is_digit(U'०'));  // devanagari zero
    CHECK(uni::is_digit(U'০'));  // bengali zero
    CHECK(uni::is_digit(U'௯'));  // tamil nine
    CHECK_FALSE(uni::is_digit(U'a'));
    CHECK_FALSE(uni::is_digit(U'½'));  // vulgar fraction one half (No, not Nd)
}

TEST_CASE("combining mark categories") {
    CHECK(uni::is_mn(U'्'));   // devanagari virama
    CHECK(uni::is_mn(U'़'));   // devanagari nukta
    CHECK(uni::is_mc(U'ा'));   // devanagari vowel sign AA (spacing)
    CHECK(uni::is_mc(U'ா'));   // tamil vowel sign AA
    CHECK(uni::is_mark(U'्'));
    CHECK(uni::is_mark(U'ा'));
    CHECK_FALSE(uni::is_mark(U'क'));  // devanagari KA is a base letter
    CHECK_FALSE(uni::is_mark(U'a'));
}

TEST_CASE("combining classes") {
    CHECK(uni::combining_class(U'्') == 9);   // virama
    CHECK(uni::combining_class(U'़') == 7);   // nukta
    CHECK(uni::combining_class(U'́') == 230); // combining acute
    CHECK(uni::combining_class(U'a') == 0);
    CHECK(uni::combining_class(U'ा') == 0);   // spacing marks are ccc 0
}

TEST_CASE("mark_ranges agrees with the mark predicate") {
    auto ranges = uni::mark_ranges();
    CHECK_FALSE(ranges.empty());
    for (const auto& [first, last] : ranges) {
        CHECK(uni::is_mark(first));
        CHECK(uni::is_mark(last));
    }
    // Exhaustive cross-check over the BMP.
    std::size_t mismatches = 0;
    for (char32_t cp = 0; cp <= 0xFFFF; ++cp) {
        bool in_ranges = false;
        for (const auto& [first, last] : ranges) {
            if (cp >= first && cp <= last) {
                in_ranges = true;
                break;
            }
        }
        if (in_ranges != uni::is_mark(cp)) ++mismatches;
    }
    CHECK(mismatches == 0);
}

TEST_CASE("strict utf-8 decoding") {
    uni::Utf8Decode d = uni::decode_utf8("a", 0);
    CHECK(d.ok);
    CHECK(d.cp == U'a');
    CHECK(d.length == 1);

    d = uni::decode_utf8("\xE0\xA4\x95", 0);  // devanagari KA
    CHECK(d.ok);
    CHECK(d.cp == U'क');
    CHECK(d.length == 3);

    SUBCASE("overlong form rejected") {
        d = uni::decode_utf8("\xC0\xAF", 0);  // overlong '/'
        CHECK_FALSE(d.ok);
        CHECK(d.length == 1);
    }
    SUBCASE("surrogate rejected") {
        d = uni::decode_utf8("\xED\xA0\x80", 0);  // U+D800
        CHECK_FALSE(d.ok);
    }
    SUBCASE("above U+10FFFF rejected") {
        d = uni::decode_utf8("\xF4\x90\x80\x80", 0);  // U+110000
        CHECK_FALSE(d.ok);
    }
    SUBCASE("truncated sequence rejected") {
        d = uni::decode_utf8("\xE0\xA4", 0);
        CHECK_FALSE(d.ok);
        CHECK(d.length == 1);
    }
}

TEST_CASE("validate_utf8 reports the offending byte offset") {
    std::size_t bad = 0;
    CHECK(uni::validate_utf8("hello \xE0\xA4\x95"));
    CHECK_FALSE(uni::validate_utf8(std::string("ab\xFF" "cd", 5), &bad));
    CHECK(bad == 2);
}

TEST_CASE("utf-8 encode/decode roundtrip") {
    for (char32_t cp : {U'a', U'é', U'क', U'中', U'\U0001F600'}) {
        std::string bytes = uni::to_utf8(cp);
        uni::Utf8Decode d = uni::decode_utf8(bytes, 0);
        CHECK(d.ok);
        CHECK(d.cp == cp);
        CHECK(static_cast<std::size_t>(d.length) == bytes.size());
    }
}

TEST_CASE("count_codepoints") {
    CHECK(uni::count_codepoints("") == 0);
    CHECK(uni::count_codepoints("abc") == 3);
    CHECK(uni::count_codepoints("\xE0\xA4\x95\xE0\xA5\x8D") == 2);  // KA + virama
}

TEST_CASE("nfc matches the frozen external fixtures") {
    std::size_t failures = 0;
    for (const auto& c : kNfcFixtures) {
        if (uni::nfc(c[0]) != c[1]) ++failures;
    }
    CHECK(failures == 0);
}

TEST_CASE("nfc well-known compositions") {
    // a + combining acute -> á
    CHECK(uni::nfc("a\xCC\x81") == "\xC3\xA1");
    // Ohm sign -> Greek omega
    CHECK(uni::nfc("\xE2\x84\xA6") == "\xCE\xA9");
    // Hangul jamo compose to a syllable
    CHECK(uni::nfc("\xE1\x84\x92\xE1\x85\xA1\xE1\x86\xAB") == "\xED\x95\x9C");
    // Devanagari QA decomposes (composition exclusion): U+0958 -> U+0915 U+093C
    CHECK(uni::nfc("\xE0\xA5\x98") == "\xE0\xA4\x95\xE0\xA4\xBC");
    // Already-NFC Indic text is untouched
    std::string kya = "\xE0\xA4\x95\xE0\xA5\x8D\xE0\xA4\xAF\xE0\xA4\xBE";
    CHECK(uni::nfc(kya) == kya);
}

TEST_CASE("nfc is idempotent on fixtures") {
    for (const auto& c : kNfcFixtures) {
        std::string once = uni::nfc(c[0]);
        CHECK(uni::nfc(once) == once);
    }
}
