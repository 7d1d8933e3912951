#include "adaptmix/bpe.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <queue>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_set>

#include <json.hpp>

#include "adaptmix/errors.hpp"
#include "adaptmix/unicode.hpp"
#include "adaptmix/version.hpp"

namespace adaptmix {
namespace {

std::uint64_t pair_key(TokenId l, TokenId r) {
    return (static_cast<std::uint64_t>(l) << 32) | r;
}

std::string byte_literal(unsigned char b) {
    static const char* hex = "0123456789ABCDEF";
    std::string s = "<0x";
    s += hex[b >> 4];
    s += hex[b & 0xF];
    s += '>';
    return s;
}

// True for "<0xHH>" in either hex case.
bool is_byte_literal(std::string_view s, unsigned char* value = nullptr) {
    if (s.size() != 6 || s[0] != '<' || s[1] != '0' || s[2] != 'x' || s[5] != '>') {
        return false;
    }
    unsigned v = 0;
    for (std::size_t i = 3; i <= 4; ++i) {
        char c = s[i];
        if (c >= '0' && c <= '9') {
            v = v * 16 + static_cast<unsigned>(c - '0');
        } else if (c >= 'A' && c <= 'F') {
            v = v * 16 + static_cast<unsigned>(c - 'A' + 10);
        } else if (c >= 'a' && c <= 'f') {
            v = v * 16 + static_cast<unsigned>(c - 'a' + 10);
        } else {
            return false;
        }
    }
    if (value) *value = static_cast<unsigned char>(v);
    return true;
}

std::string codepoint_literal(char32_t cp) {
    std::ostringstream out;
    out << "U+" << std::uppercase << std::hex;
    out.width(4);
    out.fill('0');
    out << static_cast<std::uint32_t>(cp);
    return out.str();
}

char32_t parse_codepoint_literal(const std::string& s) {
    if (s.size() < 3 || s[0] != 'U' || s[1] != '+') {
        throw ParseError("expected \"U+XXXX\", got \"" + s + "\"");
    }
    char32_t cp = 0;
    for (std::size_t i = 2; i < s.size(); ++i) {
        char c = s[i];
        int d;
        if (c >= '0' && c <= '9') {
            d = c - '0';
        } else if (c >= 'A' && c <= 'F') {
            d = c - 'A' + 10;
        } else if (c >= 'a' && c <= 'f') {
            d = c - 'a' + 10;
        } else {
            throw ParseError("bad hex digit in \"" + s + "\"");
        }
        cp = cp * 16 + static_cast<char32_t>(d);
        if (cp > uni::kMaxCodepoint) {
            throw ParseError("code point out of range in \"" + s + "\"");
        }
    }
    return cp;
}

// Vocabulary with specials, byte tokens and the given alphabet laid out in the
// canonical id order. `alphabet` must be sorted and deduplicated.
Vocabulary make_vocabulary(const std::vector<std::string>& specials,
                           std::vector<char32_t> alphabet, std::uint32_t target_size) {
    std::unordered_set<std::string> seen;
    for (const auto& s : specials) {
        if (s.empty()) throw Error("special tokens must be non-empty");
        if (!seen.insert(s).second) {
            throw Error("duplicate special token '" + s + "'");
        }
    }
    std::uint64_t mandatory =
        specials.size() + 256 + alphabet.size();
    if (mandatory > target_size) {
        throw SizingError(static_cast<std::int64_t>(target_size),
                          static_cast<std::int64_t>(mandatory));
    }

    Vocabulary v;
    v.specials = specials;
    v.alphabet = std::move(alphabet);
    v.target_size = target_size;
    v.contents.reserve(mandatory);
    v.kinds.reserve(mandatory);
    for (const auto& s : specials) {
        (void)s;
        v.contents.emplace_back();  // specials decode as "" by default
        v.kinds.push_back(TokenKind::Special);
    }
    for (unsigned b = 0; b < 256; ++b) {
        v.contents.push_back(std::string(1, static_cast<char>(b)));
        v.kinds.push_back(TokenKind::Byte);
    }
    for (char32_t cp : v.alphabet) {
        TokenId id = static_cast<TokenId>(v.contents.size());
        v.contents.push_back(uni::to_utf8(cp));
        v.kinds.push_back(TokenKind::Character);
        v.content_to_id.emplace(v.contents.back(), id);
        v.char_to_id.emplace(cp, id);
    }
    v.assigned = static_cast<std::uint32_t>(v.contents.size());
    return v;
}

// Maps one pre-token segment to its initial symbol sequence: seeded character
// tokens where available, byte fallback otherwise (also for invalid bytes).
void segment_to_symbols(const Vocabulary& v, std::string_view seg,
                        std::vector<TokenId>& out) {
    std::size_t pos = 0;
    while (pos < seg.size()) {
        uni::Utf8Decode d = uni::decode_utf8(seg, pos);
        if (d.ok) {
            auto it = v.char_to_id.find(d.cp);
            if (it != v.char_to_id.end()) {
                out.push_back(it->second);
                pos += d.length;
                continue;
            }
        }
        for (int i = 0; i < d.length; ++i) {
            out.push_back(v.byte_id(static_cast<unsigned char>(seg[pos + i])));
        }
        pos += d.length;
    }
}

int resolve_threads(int requested) {
    if (requested > 0) return std::min(requested, 64);
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(std::min(hw, 16u));
}

// A merge may not produce a token whose content collides with the reserved
// serial forms (special names, byte literals) or is not valid UTF-8 — the
// last can only happen when byte tokens for characters outside the seeded
// alphabet take part in training.
bool content_mergeable(const std::string& content,
                       const std::unordered_set<std::string>& special_names) {
    if (is_byte_literal(content)) return false;
    if (special_names.count(content)) return false;
    return uni::validate_utf8(content);
}

void replace_pair_occurrences(std::vector<TokenId>& syms, TokenId l, TokenId r,
                              TokenId n) {
    std::size_t out = 0, i = 0;
    while (i < syms.size()) {
        if (i + 1 < syms.size() && syms[i] == l && syms[i + 1] == r) {
            syms[out++] = n;
            i += 2;
        } else {
            syms[out++] = syms[i++];
        }
    }
    syms.resize(out);
}

struct HeapEntry {
    std::uint64_t count;
    TokenId left;
    TokenId right;
};

}  // namespace

const std::vector<std::string>& default_special_tokens() {
    static const std::vector<std::string> specials = {"<pad>", "<s>", "</s>",
                                                      "<inst>", "</inst>"};
    return specials;
}

Vocabulary seed_alphabet(const std::vector<SampledCorpus>& corpora,
                         const std::vector<char32_t>& extra_chars,
                         std::uint32_t target_size,
                         const std::vector<std::string>& specials) {
    std::set<char32_t> chars(extra_chars.begin(), extra_chars.end());
    for (const auto& corpus : corpora) {
        for (const auto& doc : corpus.documents) {
            std::size_t pos = 0;
            while (pos < doc.size()) {
                uni::Utf8Decode d = uni::decode_utf8(doc, pos);
                if (d.ok) chars.insert(d.cp);
                pos += d.length;
            }
        }
    }
    return make_vocabulary(specials, std::vector<char32_t>(chars.begin(), chars.end()),
                           target_size);
}

TokenizerModel train_bpe(const std::vector<SampledCorpus>& corpora,
                         std::uint32_t target_size,
                         const PreTokenizerConfig& pretok, Vocabulary seed_vocab,
                         const TrainOptions& options) {
    pretok.validate();

    std::uint32_t mandatory = seed_vocab.assigned;
    if (target_size < mandatory) {
        throw SizingError(static_cast<std::int64_t>(target_size),
                          static_cast<std::int64_t>(mandatory));
    }
    seed_vocab.target_size = target_size;

    std::vector<const std::string*> docs;
    for (const auto& corpus : corpora) {
        for (const auto& doc : corpus.documents) docs.push_back(&doc);
    }
    if (docs.empty()) {
        throw Error("training corpus is empty");
    }

    // Segment frequency counting, parallel over document shards. Integer sums
    // make the result independent of the shard count.
    std::unordered_map<std::string, std::uint64_t> seg_counts;
    int threads = resolve_threads(options.threads);
    if (threads <= 1 || docs.size() < 64) {
        for (const std::string* doc : docs) {
            for (auto& seg : pretokenize(*doc, pretok)) {
                seg_counts[std::move(seg.text)] += 1;
            }
        }
    } else {
        std::vector<std::unordered_map<std::string, std::uint64_t>> local(
            static_cast<std::size_t>(threads));
        std::vector<std::thread> workers;
        std::size_t chunk = (docs.size() + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            std::size_t begin = t * chunk;
            std::size_t end = std::min(docs.size(), begin + chunk);
            if (begin >= end) break;
            workers.emplace_back([&, t, begin, end] {
                for (std::size_t i = begin; i < end; ++i) {
                    for (auto& seg : pretokenize(*docs[i], pretok)) {
                        local[t][std::move(seg.text)] += 1;
                    }
                }
            });
        }
        for (auto& w : workers) w.join();
        for (auto& m : local) {
            for (auto& [text, count] : m) seg_counts[text] += count;
        }
    }
    if (seg_counts.empty()) {
        throw Error("training corpus is empty");
    }

    TokenizerModel model;
    model.vocab = std::move(seed_vocab);
    model.pretok = pretok;
    Vocabulary& vocab = model.vocab;

    std::unordered_set<std::string> special_names(vocab.specials.begin(),
                                                  vocab.specials.end());

    // Unique segments in lexicographic order; single-symbol segments can never
    // host a merge and are dropped.
    struct Word {
        std::vector<TokenId> syms;
        std::uint64_t count;
    };
    std::vector<std::pair<std::string, std::uint64_t>> unique_segments(
        seg_counts.begin(), seg_counts.end());
    std::sort(unique_segments.begin(), unique_segments.end());
    seg_counts.clear();

    std::vector<Word> words;
    words.reserve(unique_segments.size());
    for (auto& [text, count] : unique_segments) {
        Word w;
        w.count = count;
        segment_to_symbols(vocab, text, w.syms);
        if (w.syms.size() >= 2) words.push_back(std::move(w));
    }
    unique_segments.clear();
    unique_segments.shrink_to_fit();

    std::unordered_map<std::uint64_t, std::uint64_t> counts;
    std::unordered_map<std::uint64_t, std::unordered_set<std::uint32_t>> where;
    for (std::uint32_t wi = 0; wi < words.size(); ++wi) {
        const Word& w = words[wi];
        for (std::size_t i = 0; i + 1 < w.syms.size(); ++i) {
            std::uint64_t k = pair_key(w.syms[i], w.syms[i + 1]);
            counts[k] += w.count;
            where[k].insert(wi);
        }
    }

    // Max-heap on (count, lexicographically smallest content pair). Lazy
    // entries: a popped entry is acted on only if it matches the live count.
    auto worse = [&vocab](const HeapEntry& a, const HeapEntry& b) {
        if (a.count != b.count) return a.count < b.count;
        if (vocab.contents[a.left] != vocab.contents[b.left]) {
            return vocab.contents[a.left] > vocab.contents[b.left];
        }
        return vocab.contents[a.right] > vocab.contents[b.right];
    };
    std::priority_queue<HeapEntry, std::vector<HeapEntry>, decltype(worse)> heap(worse);
    for (const auto& [k, c] : counts) {
        if (c >= options.min_frequency) {
            heap.push({c, static_cast<TokenId>(k >> 32),
                       static_cast<TokenId>(k & 0xFFFFFFFF)});
        }
    }

    std::unordered_set<std::uint64_t> banned;
    std::uint32_t next_rank = 0;

    while (vocab.assigned < vocab.target_size && !heap.empty()) {
        HeapEntry top = heap.top();
        heap.pop();
        std::uint64_t key = pair_key(top.left, top.right);
        auto live_it = counts.find(key);
        std::uint64_t live = live_it == counts.end() ? 0 : live_it->second;
        if (live != top.count || live < options.min_frequency) continue;
        if (banned.count(key)) continue;

        TokenId l = top.left, r = top.right;
        std::string content = vocab.contents[l] + vocab.contents[r];
        if (!content_mergeable(content, special_names)) {
            banned.insert(key);
            continue;
        }

        // Resolve the result id. A pair can reappear after its first merge
        // when a later merge re-materializes the adjacency; replay it with the
        // original result instead of appending a duplicate rule.
        bool replay = model.pair_lookup.count(key) != 0;
        TokenId result;
        if (replay) {
            result = model.pair_lookup[key].second;
        } else {
            auto existing = vocab.content_to_id.find(content);
            if (existing != vocab.content_to_id.end()) {
                result = existing->second;
            } else {
                result = vocab.assigned;
                vocab.contents.push_back(content);
                vocab.kinds.push_back(TokenKind::Merged);
                vocab.content_to_id.emplace(content, result);
                vocab.assigned += 1;
            }
            model.merges.push_back({l, r, result, next_rank});
            model.pair_lookup[key] = {next_rank, result};
            ++next_rank;
        }

        // Replace occurrences word by word, collecting count deltas so each
        // changed pair is pushed once at its final value.
        std::unordered_map<std::uint64_t, std::int64_t> delta;
        auto affected = where[key];
        for (std::uint32_t wi : affected) {
            Word& w = words[wi];
            std::unordered_set<std::uint64_t> old_pairs, new_pairs;
            for (std::size_t i = 0; i + 1 < w.syms.size(); ++i) {
                std::uint64_t k = pair_key(w.syms[i], w.syms[i + 1]);
                delta[k] -= static_cast<std::int64_t>(w.count);
                old_pairs.insert(k);
            }
            replace_pair_occurrences(w.syms, l, r, result);
            for (std::size_t i = 0; i + 1 < w.syms.size(); ++i) {
                std::uint64_t k = pair_key(w.syms[i], w.syms[i + 1]);
                delta[k] += static_cast<std::int64_t>(w.count);
                new_pairs.insert(k);
            }
            for (std::uint64_t k : old_pairs) {
                if (!new_pairs.count(k)) where[k].erase(wi);
            }
            for (std::uint64_t k : new_pairs) {
                if (!old_pairs.count(k)) where[k].insert(wi);
            }
        }
        for (const auto& [k, d] : delta) {
            if (d == 0) continue;
            std::int64_t updated = static_cast<std::int64_t>(counts[k]) + d;
            if (updated <= 0) {
                counts.erase(k);
                where.erase(k);
                continue;
            }
            counts[k] = static_cast<std::uint64_t>(updated);
            if (static_cast<std::uint64_t>(updated) >= options.min_frequency &&
                !banned.count(k)) {
                heap.push({static_cast<std::uint64_t>(updated),
                           static_cast<TokenId>(k >> 32),
                           static_cast<TokenId>(k & 0xFFFFFFFF)});
            }
        }
    }

    return model;
}

std::vector<EncodedSegment> encode_segments(const TokenizerModel& model,
                                            std::string_view text) {
    std::vector<EncodedSegment> out;
    std::vector<TokenId> syms;
    for (const auto& seg : pretokenize(text, model.pretok)) {
        syms.clear();
        segment_to_symbols(model.vocab, seg.text, syms);

        EncodedSegment encoded;
        encoded.kind = seg.kind;
        if (syms.size() < 2 || model.pair_lookup.empty()) {
            encoded.ids = syms;
            out.push_back(std::move(encoded));
            continue;
        }

        // Merge the lowest-ranked bigram first; leftmost wins rank ties.
        struct Cand {
            std::uint32_t rank;
            std::uint32_t left_pos;
            std::uint32_t right_pos;
            TokenId left;
            TokenId right;
        };
        auto worse = [](const Cand& a, const Cand& b) {
            if (a.rank != b.rank) return a.rank > b.rank;
            return a.left_pos > b.left_pos;
        };
        std::priority_queue<Cand, std::vector<Cand>, decltype(worse)> queue(worse);

        std::vector<TokenId> ids(syms.begin(), syms.end());
        std::vector<std::int32_t> prev(ids.size()), next(ids.size());
        std::vector<bool> alive(ids.size(), true);
        for (std::size_t i = 0; i < ids.size(); ++i) {
            prev[i] = static_cast<std::int32_t>(i) - 1;
            next[i] = i + 1 < ids.size() ? static_cast<std::int32_t>(i + 1) : -1;
        }
        auto push_candidate = [&](std::int32_t lp, std::int32_t rp) {
            if (lp < 0 || rp < 0) return;
            auto it = model.pair_lookup.find(pair_key(ids[lp], ids[rp]));
            if (it == model.pair_lookup.end()) return;
            queue.push({it->second.first, static_cast<std::uint32_t>(lp),
                        static_cast<std::uint32_t>(rp), ids[lp], ids[rp]});
        };
        for (std::size_t i = 0; i + 1 < ids.size(); ++i) {
            push_candidate(static_cast<std::int32_t>(i), static_cast<std::int32_t>(i + 1));
        }
        while (!queue.empty()) {
            Cand c = queue.top();
            queue.pop();
            std::int32_t lp = static_cast<std::int32_t>(c.left_pos);
            std::int32_t rp = static_cast<std::int32_t>(c.right_pos);
            if (!alive[lp] || !alive[rp] || next[lp] != rp || ids[lp] != c.left ||
                ids[rp] != c.right) {
                continue;  // one side already merged away
            }
            ids[lp] = model.pair_lookup.at(pair_key(c.left, c.right)).second;
            alive[rp] = false;
            next[lp] = next[rp];
            if (next[rp] >= 0) prev[next[rp]] = lp;
            push_candidate(prev[lp], lp);
            push_candidate(lp, next[lp]);
        }
        for (std::int32_t i = 0; i >= 0; i = next[i]) {
            if (alive[i]) encoded.ids.push_back(ids[i]);
        }
        out.push_back(std::move(encoded));
    }
    return out;
}

std::vector<TokenId> encode(const TokenizerModel& model, std::string_view text) {
    std::vector<TokenId> out;
    for (auto& seg : encode_segments(model, text)) {
        out.insert(out.end(), seg.ids.begin(), seg.ids.end());
    }
    return out;
}

std::string decode(const TokenizerModel& model, const std::vector<TokenId>& ids,
                   bool render_special_names) {
    std::string out;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        TokenId id = ids[i];
        if (id >= model.vocab.target_size) {
            throw DecodeError(static_cast<std::int64_t>(id), i);
        }
        if (id >= model.vocab.assigned) continue;  // reserved slot: empty
        if (model.vocab.kinds[id] == TokenKind::Special) {
            if (render_special_names) out += model.vocab.specials[id];
            continue;
        }
        out += model.vocab.contents[id];
    }
    return out;
}

std::string model_to_json(const TokenizerModel& model) {
    const Vocabulary& v = model.vocab;
    nlohmann::ordered_json doc;
    doc["version"] = kModelFormatVersion;
    doc["vocab_size"] = v.target_size;
    doc["specials"] = v.specials;
    nlohmann::ordered_json alphabet = nlohmann::ordered_json::array();
    for (char32_t cp : v.alphabet) alphabet.push_back(uni::to_utf8(cp));
    doc["alphabet"] = std::move(alphabet);

    auto serial = [&v](TokenId id) -> std::string {
        if (v.kinds[id] == TokenKind::Byte) {
            return byte_literal(static_cast<unsigned char>(v.contents[id][0]));
        }
        return v.contents[id];
    };
    nlohmann::ordered_json merges = nlohmann::ordered_json::array();
    for (const MergeRule& m : model.merges) {
        merges.push_back({serial(m.left), serial(m.right)});
    }
    doc["merges"] = std::move(merges);

    nlohmann::ordered_json pretok;
    pretok["strategy"] = strategy_name(model.pretok.strategy);
    nlohmann::ordered_json subset = nlohmann::ordered_json::array();
    for (char32_t cp : model.pretok.diacritic_subset) {
        subset.push_back(codepoint_literal(cp));
    }
    pretok["diacritic_subset"] = std::move(subset);
    pretok["digit_split"] = model.pretok.digit_split;
    pretok["whitespace_group_max"] = model.pretok.whitespace_group_max;
    pretok["split_on_newline"] = model.pretok.split_on_newline;
    doc["pretok"] = std::move(pretok);

    return doc.dump(1) + "\n";
}

TokenizerModel model_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("model JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("model JSON: expected an object");
    for (const char* field : {"version", "vocab_size", "specials", "alphabet",
                              "merges", "pretok"}) {
        if (!doc.contains(field)) {
            throw ParseError(std::string("model JSON: missing field '") + field + "'");
        }
    }
    if (!doc["version"].is_number_integer() ||
        doc["version"].get<int>() != kModelFormatVersion) {
        throw ParseError("model JSON: unsupported version " + doc["version"].dump() +
                         " (expected " + std::to_string(kModelFormatVersion) + ")");
    }

    std::vector<std::string> specials;
    for (const auto& s : doc["specials"]) {
        if (!s.is_string()) throw ParseError("model JSON: specials must be strings");
        specials.push_back(s.get<std::string>());
    }
    std::vector<char32_t> alphabet;
    for (const auto& a : doc["alphabet"]) {
        if (!a.is_string()) throw ParseError("model JSON: alphabet must be strings");
        std::string s = a.get<std::string>();
        uni::Utf8Decode d = uni::decode_utf8(s, 0);
        if (!d.ok || static_cast<std::size_t>(d.length) != s.size()) {
            throw ParseError("model JSON: alphabet entry '" + s +
                             "' is not a single character");
        }
        alphabet.push_back(d.cp);
    }
    std::sort(alphabet.begin(), alphabet.end());
    alphabet.erase(std::unique(alphabet.begin(), alphabet.end()), alphabet.end());

    std::uint64_t vocab_size = 0;
    if (!doc["vocab_size"].is_number_unsigned() ||
        (vocab_size = doc["vocab_size"].get<std::uint64_t>()) >
            std::numeric_limits<std::uint32_t>::max()) {
        throw ParseError("model JSON: vocab_size must be an unsigned 32-bit integer");
    }

    TokenizerModel model;
    try {
        model.vocab = make_vocabulary(specials, std::move(alphabet),
                                      static_cast<std::uint32_t>(vocab_size));
    } catch (const SizingError& e) {
        throw ParseError(std::string("model JSON: ") + e.what());
    }
    Vocabulary& v = model.vocab;

    auto resolve = [&v](const std::string& s) -> TokenId {
        unsigned char b;
        if (is_byte_literal(s, &b)) return v.byte_id(b);
        auto it = v.content_to_id.find(s);
        if (it == v.content_to_id.end()) {
            throw ParseError("model JSON: merge references unknown token '" + s + "'");
        }
        return it->second;
    };

    if (!doc["merges"].is_array()) throw ParseError("model JSON: merges must be an array");
    std::uint32_t rank = 0;
    for (const auto& entry : doc["merges"]) {
        if (!entry.is_array() || entry.size() != 2 || !entry[0].is_string() ||
            !entry[1].is_string()) {
            throw ParseError("model JSON: merge " + std::to_string(rank) +
                             " must be a [left, right] string pair");
        }
        TokenId l = resolve(entry[0].get<std::string>());
        TokenId r = resolve(entry[1].get<std::string>());
        std::string content = v.contents[l] + v.contents[r];
        TokenId result;
        auto existing = v.content_to_id.find(content);
        if (existing != v.content_to_id.end()) {
            result = existing->second;
        } else {
            if (v.assigned >= v.target_size) {
                throw ParseError("model JSON: merge list exceeds vocab_size");
            }
            result = v.assigned;
            v.contents.push_back(content);
            v.kinds.push_back(TokenKind::Merged);
            v.content_to_id.emplace(content, result);
            v.assigned += 1;
        }
        model.merges.push_back({l, r, result, rank});
        model.pair_lookup.emplace(pair_key(l, r), std::make_pair(rank, result));
        ++rank;
    }

    const auto& pt = doc["pretok"];
    if (!pt.is_object()) throw ParseError("model JSON: pretok must be an object");
    for (const char* field : {"strategy", "diacritic_subset", "digit_split",
                              "whitespace_group_max", "split_on_newline"}) {
        if (!pt.contains(field)) {
            throw ParseError(std::string("model JSON: pretok missing field '") + field +
                             "'");
        }
    }
    model.pretok.strategy = strategy_from_name(pt["strategy"].get<std::string>());
    model.pretok.diacritic_subset.clear();
    for (const auto& s : pt["diacritic_subset"]) {
        model.pretok.diacritic_subset.push_back(
            parse_codepoint_literal(s.get<std::string>()));
    }
    std::sort(model.pretok.diacritic_subset.begin(), model.pretok.diacritic_subset.end());
    model.pretok.digit_split = pt["digit_split"].get<bool>();
    model.pretok.whitespace_group_max = pt["whitespace_group_max"].get<int>();
    model.pretok.split_on_newline = pt["split_on_newline"].get<bool>();
    model.pretok.validate();

    return model;
}

void save_model(const TokenizerModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write model file: " + path.string());
    out << model_to_json(model);
    if (!out) throw Error("write failure: " + path.string());
}

TokenizerModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read model file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return model_from_json(buf.str());
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

}  // namespace adaptmix
