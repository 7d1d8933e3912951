// Microbenchmarks for the hot paths: pre-tokenization, encoding, training,
// and fertility evaluation. Run with --benchmark_filter=<regex> to narrow.

#include <benchmark/benchmark.h>

#include <adaptmix/bpe.hpp>
#include <adaptmix/corpus.hpp>
#include <adaptmix/metrics.hpp>
#include <adaptmix/pretokenizer.hpp>
#include <adaptmix/rng.hpp>
#include <adaptmix/unicode.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace {

using namespace adaptmix;

// Mixed-script text with digits, marks, and whitespace runs — roughly the
// shape of the corpora the toolkit ingests.
std::string make_text(std::size_t target_bytes, std::uint64_t seed) {
    static const std::vector<std::string> words = {
        "नमस्ते", "दुनिया", "कैसे",   "हैं",     "मलयालम", "ഭാഷ",
        "தமிழ்",  "மொழி",  "hello", "world", "quick",  "brown",
        "fox",   "12345", "09876", "क्या",    "कर्म",     "पुस्तक",
    };
    SplitMix64 rng(seed);
    std::string text;
    while (text.size() < target_bytes) {
        text += words[rng.next_below(words.size())];
        if (rng.next_below(8) == 0) text += '\n';
        text.append(1 + rng.next_below(3), ' ');
    }
    return text;
}

PreTokenizerConfig pretok_for(int strategy) {
    PreTokenizerConfig config;
    config.strategy = static_cast<PretokStrategy>(strategy);
    if (config.strategy == PretokStrategy::PT1) {
        config.diacritic_subset = default_diacritic_subset();
    }
    return config;
}

std::vector<SampledCorpus> training_corpora(std::size_t bytes_per_doc) {
    SampledCorpus sample;
    sample.language = "bench";
    for (int d = 0; d < 8; ++d) {
        sample.documents.push_back(make_text(bytes_per_doc, 1000 + d));
    }
    return {sample};
}

const TokenizerModel& bench_model() {
    static const TokenizerModel model = [] {
        auto corpora = training_corpora(16 * 1024);
        Vocabulary seed = seed_alphabet(corpora, {}, 2048);
        return train_bpe(corpora, 2048, pretok_for(1), std::move(seed), {});
    }();
    return model;
}

void BM_Pretokenize(benchmark::State& state) {
    PreTokenizerConfig config = pretok_for(static_cast<int>(state.range(0)));
    std::string text = make_text(64 * 1024, 7);
    for (auto _ : state) {
        benchmark::DoNotOptimize(pretokenize(text, config));
    }
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_Pretokenize)->Arg(0)->Arg(1)->Arg(2);

void BM_Encode(benchmark::State& state) {
    const TokenizerModel& model = bench_model();
    std::string text = make_text(64 * 1024, 11);
    std::size_t tokens = encode(model, text).size();
    for (auto _ : state) {
        benchmark::DoNotOptimize(encode(model, text));
    }
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(text.size()));
    state.counters["tokens"] = static_cast<double>(tokens);
}
BENCHMARK(BM_Encode);

void BM_Train(benchmark::State& state) {
    auto corpora = training_corpora(static_cast<std::size_t>(state.range(0)));
    std::uint64_t chars = 0;
    for (const auto& doc : corpora[0].documents) chars += uni::count_codepoints(doc);
    for (auto _ : state) {
        Vocabulary seed = seed_alphabet(corpora, {}, 1024);
        benchmark::DoNotOptimize(
            train_bpe(corpora, 1024, pretok_for(0), std::move(seed), {}));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(chars));
}
BENCHMARK(BM_Train)->Arg(4 * 1024)->Arg(32 * 1024)->Unit(benchmark::kMillisecond);

void BM_Fertility(benchmark::State& state) {
    const TokenizerModel& model = bench_model();
    SampledCorpus eval;
    eval.language = "bench";
    for (int d = 0; d < 4; ++d) eval.documents.push_back(make_text(16 * 1024, 2000 + d));
    for (const auto& doc : eval.documents) {
        eval.character_count += uni::count_codepoints(doc);
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(fertility(model, eval));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                            static_cast<std::int64_t>(eval.character_count));
}
BENCHMARK(BM_Fertility);

}  // namespace

int main(int argc, char** argv) {
    benchmark::Initialize(&argc, argv);
    if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
    benchmark::RunSpecifiedBenchmarks();
    return 0;
}
