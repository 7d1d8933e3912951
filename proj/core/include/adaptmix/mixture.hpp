#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "adaptmix/bpe.hpp"
#include "adaptmix/corpus.hpp"
#include "adaptmix/metrics.hpp"
#include "adaptmix/pretokenizer.hpp"

namespace adaptmix {

// "fixed" keeps the target fertility at config.f_best; "dynamic-min" tracks
// the best observed fertility each iteration, which is known to starve the
// best-performing language and exists only as a regression scenario.
enum class FBestMode { Fixed, DynamicMin };

struct AdaptMixConfig {
    double f_best = 1.0;
    double epsilon = 1e-3;  // floor added to deficits so no language reaches zero
    double mu = 0.5;        // EMA smoothing factor in (0, 1]
    std::uint64_t budget_chars = 0;  // total characters per iteration (T)
    int iterations = 20;
    FBestMode f_best_mode = FBestMode::Fixed;
    std::uint64_t base_seed = 0;
    std::string fixed_corpus_dir;  // optional extra corpus outside the budget

    void validate() const;  // throws Error on invariant violations
};

struct MixtureState {
    std::uint64_t iteration = 0;
    std::map<LanguageId, double> proportions;        // on the simplex
    std::map<LanguageId, std::uint64_t> allocations;  // sums exactly to T
};

struct TrajectoryEntry {
    MixtureState state;
    FertilityReport report;
};

struct Trajectory {
    std::vector<TrajectoryEntry> entries;
};

// Per-language deficit: (f_l - f_best) / f_range, clamped at zero in fixed
// mode (a language already at or below target has nothing to gain). Requires
// f_range > 0; the zero-range case takes fallback_step instead.
std::map<LanguageId, double> compute_deficits(const FertilityReport& report,
                                              const AdaptMixConfig& config);

// w_l = delta_l + epsilon, normalized to a probability distribution.
std::map<LanguageId, double> target_proportions(
    const std::map<LanguageId, double>& deficits, double epsilon);

// m_l = (1 - mu) * m_prev_l + mu * t_l, renormalized when the sum drifts from
// 1 by more than 1e-12.
std::map<LanguageId, double> ema_update(const std::map<LanguageId, double>& m_prev,
                                        const std::map<LanguageId, double>& target,
                                        double mu);

// C_l = round(m_l * T), repaired by largest remainder (lexicographic language
// tie-break) until the sum is exactly T.
std::map<LanguageId, std::uint64_t> allocate_budget(
    const std::map<LanguageId, double>& proportions, std::uint64_t total);

// Zero fertility range: keep the previous mixture, renormalized.
MixtureState fallback_step(const MixtureState& prev, std::uint64_t total);

// One feedback update: deficits -> targets -> EMA -> allocation, or the
// fallback when the report's fertility range is zero.
MixtureState step(const MixtureState& prev, const FertilityReport& report,
                  const AdaptMixConfig& config);

MixtureState uniform_mixture(const std::vector<LanguageId>& langs,
                             std::uint64_t total);

struct OptimizeOptions {
    std::uint32_t vocab_size = 4096;
    PreTokenizerConfig pretok;
    std::vector<std::string> specials = default_special_tokens();
    TrainOptions train_options;
    bool early_stop = false;         // stop when the mixture settles
    double early_stop_delta = 1e-4;  // max per-language proportion change
    // Called after each iteration with the recorded entry and that iteration's
    // model; used for trajectory flushing and model retention.
    std::function<void(const TrajectoryEntry&, const TokenizerModel&)> on_iteration;
};

// The full loop: iteration 0 samples uniformly; every iteration samples per
// the current allocations (seed = base_seed + iteration), trains a tokenizer,
// evaluates fertility, and steps the mixture. Errors carry the iteration index.
Trajectory optimize(const CorpusStore& store,
                    const std::map<LanguageId, SampledCorpus>& eval_set,
                    const AdaptMixConfig& config, const OptimizeOptions& options);

// Config file {f_best, epsilon, mu, budget_chars, iterations, f_best_mode,
// base_seed, fixed_corpus_dir?}; unknown keys are rejected.
AdaptMixConfig adaptmix_config_from_json(const std::string& text);
AdaptMixConfig load_adaptmix_config(const std::filesystem::path& path);
std::string adaptmix_config_to_json(const AdaptMixConfig& config);

// JSON list of {iteration, proportions, allocations, fertility, f_range,
// average}; stable key order, byte-identical across reruns.
std::string trajectory_to_json(const Trajectory& trajectory);
Trajectory trajectory_from_json(const std::string& text);

// Long-format CSV: iteration,language,fertility,proportion.
std::string trajectory_to_plot_csv(const Trajectory& trajectory);

const char* f_best_mode_name(FBestMode mode);
FBestMode f_best_mode_from_name(std::string_view name);  // "fixed"|"dynamic-min"

}  // namespace adaptmix
