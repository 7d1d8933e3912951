#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "adaptmix/corpus.hpp"
#include "adaptmix/pretokenizer.hpp"

namespace adaptmix {

using TokenId = std::uint32_t;

enum class TokenKind : std::uint8_t { Special, Byte, Character, Merged, Reserved };

// Dense id space, laid out as: specials, the 256 byte-fallback tokens, seeded
// single-character tokens (sorted by code point), merge results in rank order,
// then reserved (unassigned) ids padding the vocabulary to target_size.
struct Vocabulary {
    // contents[id] holds the bytes the token contributes when decoded: "" for
    // specials and reserved ids, the raw byte for byte tokens, UTF-8 otherwise.
    std::vector<std::string> contents;
    std::vector<TokenKind> kinds;
    std::vector<std::string> specials;
    std::vector<char32_t> alphabet;  // sorted ascending
    std::uint32_t target_size = 0;
    std::uint32_t assigned = 0;  // ids actually in use; the tail is reserved

    // Character and Merged token contents only (byte tokens deliberately
    // excluded so 'a'-the-character and 0x61-the-byte stay distinct ids).
    std::unordered_map<std::string, TokenId> content_to_id;
    std::unordered_map<char32_t, TokenId> char_to_id;

    std::uint32_t size() const { return target_size; }
    std::uint32_t reserved_slots() const { return target_size - assigned; }
    TokenId byte_id(unsigned char b) const {
        return static_cast<TokenId>(specials.size()) + b;
    }
    TokenKind kind(TokenId id) const {
        return id < assigned ? kinds[id] : TokenKind::Reserved;
    }
};

struct MergeRule {
    TokenId left;
    TokenId right;
    TokenId result;
    std::uint32_t rank;
};

struct TrainOptions {
    std::uint32_t min_frequency = 2;
    int threads = 0;  // 0 = use hardware concurrency; never affects results
};

struct TokenizerModel {
    Vocabulary vocab;
    std::vector<MergeRule> merges;
    PreTokenizerConfig pretok;

    // (left id << 32 | right id) -> (rank, result id); rebuilt after load.
    std::unordered_map<std::uint64_t, std::pair<std::uint32_t, TokenId>> pair_lookup;
};

const std::vector<std::string>& default_special_tokens();

// Vocabulary holding the special tokens, all 256 byte tokens, every distinct
// character of the corpora, and extra_chars. Throws SizingError when
// target_size cannot hold that mandatory set.
Vocabulary seed_alphabet(const std::vector<SampledCorpus>& corpora,
                         const std::vector<char32_t>& extra_chars,
                         std::uint32_t target_size,
                         const std::vector<std::string>& specials = default_special_tokens());

// Greedy BPE: repeatedly merges the most frequent adjacent token pair within
// pre-token segments until the vocabulary is full or no pair occurs at least
// min_frequency times. Equal frequencies break lexicographically ascending on
// (left content, right content). Deterministic, including across thread counts.
TokenizerModel train_bpe(const std::vector<SampledCorpus>& corpora,
                         std::uint32_t target_size,
                         const PreTokenizerConfig& pretok, Vocabulary seed_vocab,
                         const TrainOptions& options = {});

// Pretokenizes, maps characters to seeded tokens (byte fallback otherwise),
// and applies merges lowest rank first, leftmost occurrence first on ties.
// Total over arbitrary bytes.
std::vector<TokenId> encode(const TokenizerModel& model, std::string_view text);

struct EncodedSegment {
    SegmentKind kind;
    std::vector<TokenId> ids;
};
std::vector<EncodedSegment> encode_segments(const TokenizerModel& model,
                                            std::string_view text);

// Concatenates token contents. Specials render as "" unless
// render_special_names is set; reserved ids decode as "". Ids at or beyond
// the vocabulary size raise DecodeError.
std::string decode(const TokenizerModel& model, const std::vector<TokenId>& ids,
                   bool render_special_names = false);

// Single JSON document; load(save(m)) encodes identically to m on all inputs.
void save_model(const TokenizerModel& model, const std::filesystem::path& path);
TokenizerModel load_model(const std::filesystem::path& path);
std::string model_to_json(const TokenizerModel& model);
TokenizerModel model_from_json(const std::string& text);

}  // namespace adaptmix
