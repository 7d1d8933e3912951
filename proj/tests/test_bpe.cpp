#include <doctest.h>

#include <adaptmix/bpe.hpp>
#include <adaptmix/errors.hpp>
#include <adaptmix/rng.hpp>
#include <adaptmix/unicode.hpp>
#include <fstream>
#include <string>
#include <vector>

#include "testutil.hpp"

using namespace adaptmix;
using namespace testutil;

namespace {

SampledCorpus make_sample(std::vector<std::string> docs) {
    SampledCorpus s;
    s.language = "test";
    s.documents = std::move(docs);
    for (const auto& d : s.documents) s.character_count += uni::count_codepoints(d);
    return s;
}

// Seeds from the documents, then trains with room for `extra` new tokens.
TokenizerModel quick_train(const std::vector<std::string>& docs, std::uint32_t extra,
                           const TrainOptions& options = {},
                           PreTokenizerConfig pretok = {}) {
    std::vector<SampledCorpus> corpora = {make_sample(docs)};
    Vocabulary seed = seed_alphabet(corpora, {}, 1u << 20);
    return train_bpe(corpora, seed.assigned + extra, pretok, std::move(seed), options);
}

std::vector<std::pair<std::string, std::string>> merge_contents(
    const TokenizerModel& model) {
    std::vector<std::pair<std::string, std::string>> out;
    for (const MergeRule& m : model.merges) {
        out.emplace_back(model.vocab.contents[m.left], model.vocab.contents[m.right]);
    }
    return out;
}

}  // namespace

TEST_CASE("seeded vocabulary layout: specials, bytes, alphabet, reserved tail") {
    auto corpora = std::vector<SampledCorpus>{make_sample({"ab", "ba"})};
    Vocabulary v = seed_alphabet(corpora, {}, 300, {"<s>", "</s>"});

    // 2 specials + 256 bytes + {a, b} = 260 assigned, 40 reserved.
    CHECK(v.specials.size() == 2);
    CHECK(v.assigned == 260);
    CHECK(v.target_size == 300);
    CHECK(v.reserved_slots() == 40);

    CHECK(v.kind(0) == TokenKind::Special);
    CHECK(v.byte_id(0x61) == 2 + 0x61);
    CHECK(v.kind(v.byte_id(0x61)) == TokenKind::Byte);
    CHECK(v.contents[v.byte_id(0x61)] == "a");

    REQUIRE(v.alphabet == std::vector<char32_t>{U'a', U'b'});
    CHECK(v.contents[258] == "a");
    CHECK(v.contents[259] == "b");
    CHECK(v.kind(258) == TokenKind::Character);
    CHECK(v.char_to_id.at(U'a') == 258);
    CHECK(v.kind(260) == TokenKind::Reserved);
    CHECK(v.kind(299) == TokenKind::Reserved);
}

TEST_CASE("seeding rejects vocabularies too small for the mandatory tokens") {
    auto corpora = std::vector<SampledCorpus>{make_sample({"ab"})};
    try {
        seed_alphabet(corpora, {}, 259, {"<s>", "</s>"});
        FAIL("expected SizingError");
    } catch (const SizingError& e) {
        std::string what = e.what();
        CHECK(what.find("259") != std::string::npos);
        CHECK(what.find("260") != std::string::npos);
    }
}

TEST_CASE("seeding includes extra characters absent from the corpus") {
    auto corpora = std::vector<SampledCorpus>{make_sample({"ab"})};
    Vocabulary v = seed_alphabet(corpora, {U'z', 0x0915}, 1u << 12);
    CHECK(v.char_to_id.count(U'z') == 1);
    CHECK(v.char_to_id.count(0x0915) == 1);
    // Alphabet stays sorted by code point.
    CHECK(std::is_sorted(v.alphabet.begin(), v.alphabet.end()));
}

TEST_CASE("default specials are stable") {
    const auto& specials = default_special_tokens();
    REQUIRE(specials.size() == 5);
    CHECK(specials[0] == "<pad>");
    CHECK(specials[1] == "<s>");
    CHECK(specials[2] == "</s>");
    CHECK(specials[3] == "<inst>");
    CHECK(specials[4] == "</inst>");
}

TEST_CASE("the most frequent pair merges first") {
    // "aaab aaab": (a,a) occurs 4 times (overlaps count), (a,b) twice.
    TokenizerModel model = quick_train({"aaab aaab"}, 1);
    REQUIRE(model.merges.size() == 1);
    CHECK(model.vocab.contents[model.merges[0].left] == "a");
    CHECK(model.vocab.contents[model.merges[0].right] == "a");
    CHECK(model.vocab.contents[model.merges[0].result] == "aa");
    CHECK(model.merges[0].rank == 0);
}

TEST_CASE("training stops when no pair clears the frequency floor") {
    // A single "ab" has one pair with count 1; the default floor is 2.
    TokenizerModel floor2 = quick_train({"ab"}, 4);
    CHECK(floor2.merges.empty());

    TrainOptions relaxed;
    relaxed.min_frequency = 1;
    TokenizerModel floor1 = quick_train({"ab"}, 4, relaxed);
    REQUIRE(floor1.merges.size() == 1);
    CHECK(floor1.vocab.contents[floor1.merges[0].result] == "ab");
}

TEST_CASE("digit splitting blocks merges across digits") {
    // Every segment of "a1a1" is a single symbol, so no pair ever forms.
    TokenizerModel model = quick_train({"a1a1 a1a1"}, 4);
    CHECK(model.merges.empty());
}

TEST_CASE("equal counts break ties toward the smaller pair") {
    // (x,y) and (q,r) both occur twice; (q,r) sorts first.
    TokenizerModel model = quick_train({"xy xy qr qr"}, 2);
    auto merges = merge_contents(model);
    REQUIRE(merges.size() == 2);
    CHECK(merges[0] == std::pair<std::string, std::string>("q", "r"));
    CHECK(merges[1] == std::pair<std::string, std::string>("x", "y"));
}

TEST_CASE("encoding applies merges lowest rank first, leftmost on ties") {
    TokenizerModel model = quick_train({"aaab aaab"}, 1);
    // One merge (a,a): "aaa" becomes [aa, a], never [a, aa].
    std::vector<TokenId> ids = encode(model, "aaa");
    TokenId aa = model.vocab.content_to_id.at("aa");
    TokenId a = model.vocab.char_to_id.at(U'a');
    CHECK(ids == std::vector<TokenId>{aa, a});
    CHECK(decode(model, ids) == "aaa");
}

TEST_CASE("characters outside the alphabet fall back to byte tokens") {
    TokenizerModel model = quick_train({"aaab aaab"}, 1);
    std::vector<TokenId> ids = encode(model, "az");
    REQUIRE(ids.size() == 2);
    CHECK(ids[0] == model.vocab.char_to_id.at(U'a'));
    CHECK(ids[1] == model.vocab.byte_id(0x7A));
    CHECK(decode(model, ids) == "az");

    // Multi-byte characters decompose into one byte token per byte.
    std::vector<TokenId> accent = encode(model, "é");
    REQUIRE(accent.size() == 2);
    CHECK(accent[0] == model.vocab.byte_id(0xC3));
    CHECK(accent[1] == model.vocab.byte_id(0xA9));
    CHECK(decode(model, accent) == "é");
}

TEST_CASE("encode/decode roundtrips arbitrary byte strings") {
    TokenizerModel model = quick_train({"the quick brown fox the quick"}, 8);
    SplitMix64 rng(0xfeed);
    for (int round = 0; round < 200; ++round) {
        std::string text;
        std::uint64_t len = rng.next_below(80);
        for (std::uint64_t i = 0; i < len; ++i) {
            text.push_back(static_cast<char>(rng.next_below(256)));
        }
        CHECK(decode(model, encode(model, text)) == text);
    }
}

TEST_CASE("segment-aware encoding keeps the segment kinds") {
    TokenizerModel model = quick_train({"ab 12 ab"}, 2);
    auto segments = encode_segments(model, "ab 12");
    REQUIRE(segments.size() == 4);  // "ab", " ", "1", "2"
    CHECK(segments[0].kind == SegmentKind::Word);
    CHECK(segments[1].kind == SegmentKind::Whitespace);
    CHECK(segments[2].kind == SegmentKind::Digit);
    CHECK(segments[3].kind == SegmentKind::Digit);
    std::vector<TokenId> flat;
    for (const auto& seg : segments) flat.insert(flat.end(), seg.ids.begin(), seg.ids.end());
    CHECK(flat == encode(model, "ab 12"));
}

TEST_CASE("special and reserved ids decode as empty by default") {
    TokenizerModel model = quick_train({"aaab aaab"}, 5);
    CHECK(decode(model, {0}) == "");
    CHECK(decode(model, {0}, true) == "<pad>");

    REQUIRE(model.vocab.reserved_slots() > 0);
    TokenId reserved = model.vocab.assigned;
    CHECK(decode(model, {reserved}) == "");

    CHECK_THROWS_AS(decode(model, {model.vocab.target_size}), DecodeError);
}

TEST_CASE("models survive a save/load roundtrip") {
    TempDir tmp;
    PreTokenizerConfig pretok;
    pretok.strategy = PretokStrategy::PT1;
    pretok.diacritic_subset = default_diacritic_subset();
    TokenizerModel model =
        quick_train({"नमस्ते दुनिया नमस्ते", "hello world hello"}, 12, {}, pretok);

    auto path = tmp.path() / "model.json";
    save_model(model, path);
    TokenizerModel loaded = load_model(path);

    CHECK(model_to_json(loaded) == model_to_json(model));
    const char* probes[] = {"hello", "नमस्ते", "a1b2", "   ", "mixed नमस्ते text"};
    for (const char* probe : probes) {
        CHECK(encode(loaded, probe) == encode(model, probe));
    }
    CHECK(loaded.vocab.target_size == model.vocab.target_size);
    CHECK(loaded.merges.size() == model.merges.size());
    CHECK(loaded.pretok.strategy == PretokStrategy::PT1);
    CHECK(loaded.pretok.diacritic_subset == model.pretok.diacritic_subset);
}

TEST_CASE("loading rejects truncated or tampered model files") {
    TempDir tmp;
    TokenizerModel model = quick_train({"aaab aaab"}, 2);
    auto path = tmp.path() / "model.json";
    save_model(model, path);

    std::string json = model_to_json(model);
    write_file(tmp.path() / "truncated.json", json.substr(0, json.size() / 2));
    CHECK_THROWS_AS(load_model(tmp.path() / "truncated.json"), ParseError);

    std::string wrong_version = json;
    auto at = wrong_version.find("\"version\": 1");
    REQUIRE(at != std::string::npos);
    wrong_version.replace(at, 12, "\"version\": 2");
    write_file(tmp.path() / "v2.json", wrong_version);
    CHECK_THROWS_AS(load_model(tmp.path() / "v2.json"), ParseError);

    CHECK_THROWS_AS(load_model(tmp.path() / "missing.json"), Error);
}

TEST_CASE("training matches the from-scratch reference trainer") {
    SplitMix64 rng(0x0bce);
    const char pool[] = "aabbccdd  ";
    for (int round = 0; round < 8; ++round) {
        std::vector<std::string> docs;
        int doc_count = 2 + static_cast<int>(rng.next_below(3));
        for (int d = 0; d < doc_count; ++d) {
            std::string doc;
            std::uint64_t len = 20 + rng.next_below(100);
            for (std::uint64_t i = 0; i < len; ++i) {
                doc.push_back(pool[rng.next_below(sizeof(pool) - 1)]);
            }
            docs.push_back(std::move(doc));
        }
        TrainOptions options;
        options.min_frequency = 1 + static_cast<std::uint32_t>(rng.next_below(2));
        std::uint32_t extra = 3 + static_cast<std::uint32_t>(rng.next_below(20));

        PreTokenizerConfig pretok;
        TokenizerModel model = quick_train(docs, extra, options, pretok);
        auto expected = oracle_bpe_merges(docs, pretok, extra, options.min_frequency);
        CHECK(merge_contents(model) == expected);
    }
}

TEST_CASE("results are identical across thread counts") {
    std::vector<std::string> docs;
    SplitMix64 rng(0x7777);
    const char pool[] = "abcdefgh ";
    for (int d = 0; d < 6; ++d) {
        std::string doc;
        for (int i = 0; i < 400; ++i) doc.push_back(pool[rng.next_below(sizeof(pool) - 1)]);
        docs.push_back(std::move(doc));
    }
    TrainOptions one;
    one.threads = 1;
    TrainOptions four;
    four.threads = 4;
    TokenizerModel a = quick_train(docs, 40, one);
    TokenizerModel b = quick_train(docs, 40, four);
    CHECK(model_to_json(a) == model_to_json(b));
}

TEST_CASE("larger vocabularies extend rather than rewrite the merge list") {
    std::vector<std::string> docs = {"the cat sat on the mat the cat sat",
                                     "a cat and a mat and a cat"};
    TokenizerModel small = quick_train(docs, 6);
    TokenizerModel large = quick_train(docs, 14);
    auto small_merges = merge_contents(small);
    auto large_merges = merge_contents(large);
    REQUIRE(small_merges.size() <= large_merges.size());
    for (std::size_t i = 0; i < small_merges.size(); ++i) {
        CHECK(large_merges[i] == small_merges[i]);
    }
}
