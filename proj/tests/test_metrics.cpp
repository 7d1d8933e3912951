#include <doctest.h>

#include <adaptmix/bpe.hpp>
#include <adaptmix/errors.hpp>
#include <adaptmix/metrics.hpp>
#include <adaptmix/unicode.hpp>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "testutil.hpp"

using namespace adaptmix;
using namespace testutil;

namespace {

SampledCorpus make_sample(const std::string& lang, std::vector<std::string> docs) {
    SampledCorpus s;
    s.language = lang;
    s.documents = std::move(docs);
    for (const auto& d : s.documents) s.character_count += uni::count_codepoints(d);
    return s;
}

TokenizerModel char_model(const std::vector<std::string>& train_docs,
                          std::uint32_t extra = 0, std::uint32_t min_frequency = 2) {
    std::vector<SampledCorpus> corpora = {make_sample("train", train_docs)};
    Vocabulary seed = seed_alphabet(corpora, {}, 1u << 20);
    TrainOptions options;
    options.min_frequency = min_frequency;
    return train_bpe(corpora, seed.assigned + extra, {}, std::move(seed), options);
}

// Fertility fixture: a frozen 16-language evaluation of one tokenizer,
// paired below with independently reported parity-to-English values. The
// pair cross-checks our parity definition: recomputing parity from the
// fertilities must land within rounding distance of the reported values.
const std::pair<const char*, double> kFertilityFixture[] = {
    {"assamese", 1.93}, {"bengali", 1.90},   {"english", 1.47}, {"gujarati", 2.03},
    {"hindi", 1.43},    {"kannada", 2.30},   {"maithili", 1.73}, {"malayalam", 2.60},
    {"marathi", 1.87},  {"nepali", 1.70},    {"oriya", 1.95},   {"punjabi", 1.61},
    {"sanskrit", 2.57}, {"sindhi", 1.67},    {"tamil", 2.35},   {"telugu", 2.34},
};
const std::pair<const char*, double> kParityFixture[] = {
    {"assamese", 1.3129}, {"bengali", 1.2925},   {"english", 1.0000},
    {"gujarati", 1.3751}, {"hindi", 0.9699},     {"kannada", 1.5615},
    {"maithili", 1.1739}, {"malayalam", 1.7638}, {"marathi", 1.2664},
    {"nepali", 1.1513},   {"oriya", 1.3215},     {"punjabi", 1.0923},
    {"sanskrit", 1.7408}, {"sindhi", 1.1354},    {"tamil", 1.5942},
    {"telugu", 1.5898},
};

}  // namespace

TEST_CASE("fertility is tokens per word, ignoring separator tokens") {
    // No merges: every word character is one token.
    TokenizerModel model = char_model({"ab cd"});
    CHECK(fertility(model, make_sample("x", {"ab cd"})) == doctest::Approx(2.0));

    // With merges (a,b) and (c,d) each word is a single token.
    TokenizerModel merged = char_model({"ab ab cd cd"}, 2);
    REQUIRE(merged.merges.size() == 2);
    CHECK(fertility(merged, make_sample("x", {"ab cd"})) == doctest::Approx(1.0));
}

TEST_CASE("fertility is a ratio of sums, not a mean of per-document ratios") {
    TokenizerModel model = char_model({"ab cd"});
    // 2 tokens / 1 word and 3 tokens / 3 words pool to 5/4.
    SampledCorpus eval = make_sample("x", {"aa", "b b b"});
    CHECK(fertility(model, eval) == doctest::Approx(1.25));
}

TEST_CASE("fertility never drops below one") {
    TokenizerModel model = char_model({"ab ab cd cd aaaa aaaa"}, 6, 1);
    SampledCorpus eval = make_sample("x", {"ab  cd \n aaaa ab ab"});
    CHECK(fertility(model, eval) >= 1.0);
}

TEST_CASE("fertility rejects corpora without words") {
    TokenizerModel model = char_model({"ab cd"});
    try {
        fertility(model, make_sample("blankish", {"   ", "\n\n"}));
        FAIL("expected Error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("blankish") != std::string::npos);
    }
}

TEST_CASE("duplicating every document leaves fertility unchanged") {
    TokenizerModel model = char_model({"ab cd ef gh"});
    SampledCorpus once = make_sample("x", {"ab cd", "efg h"});
    SampledCorpus twice = make_sample("x", {"ab cd", "efg h", "ab cd", "efg h"});
    CHECK(fertility(model, once) == doctest::Approx(fertility(model, twice)));
}

TEST_CASE("evaluate derives range statistics over languages") {
    TokenizerModel model = char_model({"ab ab cd cd"}, 2);
    std::map<LanguageId, SampledCorpus> eval_set;
    eval_set["one"] = make_sample("one", {"ab cd ab"});    // fertility 1.0
    eval_set["two"] = make_sample("two", {"abcd abcd"});   // 2 tokens per word
    FertilityReport report = evaluate(model, eval_set);

    CHECK(report.fertility.at("one") == doctest::Approx(1.0));
    CHECK(report.fertility.at("two") == doctest::Approx(2.0));
    CHECK(report.f_min == doctest::Approx(1.0));
    CHECK(report.f_max == doctest::Approx(2.0));
    CHECK(report.f_range == doctest::Approx(1.0));
    CHECK(report.average == doctest::Approx(1.5));
}

TEST_CASE("evaluate does not depend on the thread count") {
    TokenizerModel model = char_model({"ab cd ef"});
    std::map<LanguageId, SampledCorpus> eval_set;
    for (int i = 0; i < 6; ++i) {
        std::string lang = "lang" + std::to_string(i);
        eval_set[lang] = make_sample(lang, {"ab cd", "ef ab", "cd cd cd"});
    }
    FertilityReport a = evaluate(model, eval_set, 1);
    FertilityReport b = evaluate(model, eval_set, 4);
    CHECK(a.fertility == b.fertility);
}

TEST_CASE("evaluate surfaces per-language failures") {
    TokenizerModel model = char_model({"ab cd"});
    std::map<LanguageId, SampledCorpus> eval_set;
    eval_set["good"] = make_sample("good", {"ab cd"});
    eval_set["empty"] = make_sample("empty", {"  "});
    CHECK_THROWS_AS(evaluate(model, eval_set), Error);
}

TEST_CASE("parity divides by the reference fertility") {
    FertilityReport report;
    report.fertility = {{"en", 1.5}, {"hi", 3.0}, {"ta", 4.5}};
    report.derive();
    ParityReport p = parity(report, "en");
    CHECK(p.reference == "en");
    CHECK(p.parity.at("en") == doctest::Approx(1.0));
    CHECK(p.parity.at("hi") == doctest::Approx(2.0));
    CHECK(p.parity.at("ta") == doctest::Approx(3.0));
    CHECK_THROWS_AS(parity(report, "xx"), UnknownLanguageError);
}

TEST_CASE("recomputed parity matches the frozen fixture within 0.02") {
    FertilityReport report;
    for (const auto& [lang, f] : kFertilityFixture) report.fertility[lang] = f;
    report.derive();
    ParityReport p = parity(report, "english");
    for (const auto& [lang, expected] : kParityFixture) {
        CHECK(std::abs(p.parity.at(lang) - expected) <= 0.02);
    }
    // The fixture's reported mean fertility was rounded to 1.97.
    CHECK(report.average == doctest::Approx(1.965625));
    CHECK(std::abs(report.average - 1.97) <= 0.005);
}

TEST_CASE("reports roundtrip through JSON") {
    FertilityReport report;
    report.iteration = 3;
    report.fertility = {{"en", 1.47}, {"hi", 1.43}, {"ta", 2.35}};
    report.derive();
    ParityReport p = parity(report, "en");

    FertilityReport back = report_from_json(report_to_json(report, &p));
    CHECK(back.iteration == 3);
    REQUIRE(back.fertility.size() == 3);
    for (const auto& [lang, f] : report.fertility) {
        CHECK(back.fertility.at(lang) == doctest::Approx(f).epsilon(1e-9));
    }
    CHECK(back.f_range == doctest::Approx(report.f_range).epsilon(1e-9));
}

TEST_CASE("reports roundtrip through CSV") {
    FertilityReport report;
    report.fertility = {{"en", 1.47}, {"hi", 1.43}, {"ta", 2.35}};
    report.derive();

    std::string csv = report_to_csv(report);
    // Header, three language rows, one trailing average row.
    CHECK(csv.find("language,fertility") == 0);
    CHECK(csv.find("average,") != std::string::npos);

    FertilityReport back = report_from_csv(csv);
    REQUIRE(back.fertility.size() == 3);
    for (const auto& [lang, f] : report.fertility) {
        CHECK(back.fertility.at(lang) == doctest::Approx(f).epsilon(1e-9));
    }

    ParityReport p = parity(report, "en");
    std::string with_parity = report_to_csv(report, &p);
    CHECK(with_parity.find("language,fertility,parity") == 0);
    FertilityReport back2 = report_from_csv(with_parity);
    CHECK(back2.fertility.size() == 3);
    CHECK_THROWS_AS(report_from_csv("bogus\n1,2\n"), ParseError);
}
