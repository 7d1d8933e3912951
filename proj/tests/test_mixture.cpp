#include <doctest.h>

#include <adaptmix/corpus.hpp>
#include <adaptmix/errors.hpp>
#include <adaptmix/mixture.hpp>
#include <adaptmix/rng.hpp>
#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "testutil.hpp"

using namespace adaptmix;
using namespace testutil;

namespace {

FertilityReport make_report(std::map<LanguageId, double> fertility,
                            std::uint64_t iteration = 0) {
    FertilityReport report;
    report.iteration = iteration;
    report.fertility = std::move(fertility);
    report.derive();
    return report;
}

AdaptMixConfig base_config() {
    AdaptMixConfig config;
    config.f_best = 1.0;
    config.epsilon = 1e-3;
    config.mu = 0.5;
    config.budget_chars = 1000;
    config.iterations = 1;
    return config;
}

}  // namespace

TEST_CASE("deficits are fertility excess over target, scaled by the range") {
    AdaptMixConfig config = base_config();
    auto deficits = compute_deficits(make_report({{"a", 3.0}, {"b", 1.5}}), config);
    // range = 1.5; (3 - 1)/1.5 = 4/3, (1.5 - 1)/1.5 = 1/3.
    CHECK(deficits.at("a") == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
    CHECK(deficits.at("b") == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    // A language exactly at the target has zero deficit.
    auto at_target = compute_deficits(make_report({{"a", 1.0}, {"b", 2.0}}), config);
    CHECK(at_target.at("a") == doctest::Approx(0.0));

    // Below-target fertility clamps to zero rather than going negative; the
    // range is still f_max - f_min = 1.5, so b carries (2 - 1)/1.5.
    auto below = compute_deficits(make_report({{"a", 0.5}, {"b", 2.0}}), config);
    CHECK(below.at("a") == doctest::Approx(0.0));
    CHECK(below.at("b") == doctest::Approx(2.0 / 3.0).epsilon(1e-12));

    // Equal fertilities are the fallback condition, not a deficit computation.
    CHECK_THROWS_AS(compute_deficits(make_report({{"a", 2.0}, {"b", 2.0}}), config),
                    Error);
}

TEST_CASE("dynamic-min mode measures deficits against the current minimum") {
    AdaptMixConfig config = base_config();
    config.f_best_mode = FBestMode::DynamicMin;
    auto deficits = compute_deficits(make_report({{"a", 3.0}, {"b", 1.5}}), config);
    // f_best = f_min = 1.5: deficits (3-1.5)/1.5 = 1 and 0.
    CHECK(deficits.at("a") == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(deficits.at("b") == doctest::Approx(0.0));
}

TEST_CASE("target proportions add the floor and normalize") {
    std::map<LanguageId, double> deficits = {{"a", 4.0 / 3.0}, {"b", 1.0 / 3.0}};
    auto t = target_proportions(deficits, 1e-3);
    // w = {4/3 + 1/1000, 1/3 + 1/1000} = {4003/3000, 1003/3000}; sum 5006/3000.
    CHECK(t.at("a") == doctest::Approx(4003.0 / 5006.0).epsilon(1e-12));
    CHECK(t.at("b") == doctest::Approx(1003.0 / 5006.0).epsilon(1e-12));
    CHECK(std::abs(t.at("a") - 0.7997) <= 1e-4);
    CHECK(std::abs(t.at("b") - 0.2003) <= 1e-4);
    CHECK(t.at("a") + t.at("b") == doctest::Approx(1.0).epsilon(1e-12));

    // Equal deficits give a uniform target regardless of the floor.
    auto uniform = target_proportions({{"a", 0.7}, {"b", 0.7}, {"c", 0.7}}, 1e-3);
    CHECK(uniform.at("a") == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(uniform.at("c") == doctest::Approx(1.0 / 3.0).epsilon(1e-12));

    // The floor keeps a zero-deficit language in the mixture:
    // w = {0.001, 0.501}, sum 0.502.
    auto floored = target_proportions({{"a", 0.0}, {"b", 0.5}}, 1e-3);
    CHECK(floored.at("a") == doctest::Approx(0.001 / 0.502).epsilon(1e-12));
    CHECK(floored.at("a") > 0.0);
}

TEST_CASE("the moving average blends previous and target mixtures") {
    std::map<LanguageId, double> prev = {{"a", 0.5}, {"b", 0.5}};
    std::map<LanguageId, double> target = {{"a", 0.8}, {"b", 0.2}};

    auto half = ema_update(prev, target, 0.5);
    CHECK(half.at("a") == doctest::Approx(0.65).epsilon(1e-12));
    CHECK(half.at("b") == doctest::Approx(0.35).epsilon(1e-12));

    auto all = ema_update(prev, target, 1.0);
    CHECK(all.at("a") == doctest::Approx(0.8).epsilon(1e-12));

    auto none = ema_update(prev, target, 0.0);
    CHECK(none.at("a") == doctest::Approx(0.5).epsilon(1e-12));

    // Per-coordinate contraction: |m - t| = (1 - mu) |m_prev - t|.
    auto m = ema_update(prev, target, 0.25);
    for (const auto& [lang, value] : m) {
        CHECK(std::abs(value - target.at(lang)) ==
              doctest::Approx(0.75 * std::abs(prev.at(lang) - target.at(lang)))
                  .epsilon(1e-12));
    }
}

TEST_CASE("budget allocation rounds and repairs to an exact total") {
    auto simple = allocate_budget({{"a", 0.65}, {"b", 0.35}}, 1000);
    CHECK(simple.at("a") == 650);
    CHECK(simple.at("b") == 350);

    // Thirds of 100: repair hands the extra unit to the lexicographically
    // first language.
    auto thirds = allocate_budget({{"a", 1.0 / 3.0}, {"b", 1.0 / 3.0}, {"c", 1.0 / 3.0}},
                                  100);
    CHECK(thirds.at("a") == 34);
    CHECK(thirds.at("b") == 33);
    CHECK(thirds.at("c") == 33);

    auto zero = allocate_budget({{"a", 0.7}, {"b", 0.3}}, 0);
    CHECK(zero.at("a") == 0);
    CHECK(zero.at("b") == 0);
}

TEST_CASE("budget allocation sums exactly for random mixtures") {
    SplitMix64 rng(0xa110c);
    for (int round = 0; round < 200; ++round) {
        int n = 2 + static_cast<int>(rng.next_below(7));
        std::map<LanguageId, double> m;
        double sum = 0.0;
        for (int i = 0; i < n; ++i) {
            double w = rng.next_double() + 1e-9;
            m["lang" + std::to_string(i)] = w;
            sum += w;
        }
        for (auto& [lang, w] : m) w /= sum;
        std::uint64_t total = rng.next_below(200000);
        auto alloc = allocate_budget(m, total);
        std::uint64_t got = 0;
        for (const auto& [lang, c] : alloc) got += c;
        CHECK(got == total);
    }
}

TEST_CASE("the fallback keeps the previous mixture, renormalized") {
    MixtureState prev;
    prev.iteration = 4;
    prev.proportions = {{"a", 0.6}, {"b", 0.4}};
    MixtureState next = fallback_step(prev, 1000);
    CHECK(next.proportions.at("a") == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(next.allocations.at("a") == 600);
    CHECK(next.iteration == 5);

    MixtureState degenerate;
    degenerate.proportions = {{"a", 0.2}, {"b", 0.2}};
    MixtureState fixed = fallback_step(degenerate, 10);
    CHECK(fixed.proportions.at("a") == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(fixed.proportions.at("b") == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("a full step chains deficits, targets, smoothing, and allocation") {
    AdaptMixConfig config = base_config();
    MixtureState prev;
    prev.proportions = {{"a", 0.5}, {"b", 0.5}};
    prev.allocations = {{"a", 500}, {"b", 500}};
    FertilityReport report = make_report({{"a", 3.0}, {"b", 1.5}});

    MixtureState next = step(prev, report, config);
    double t_a = 4003.0 / 5006.0;
    CHECK(next.proportions.at("a") == doctest::Approx(0.5 * 0.5 + 0.5 * t_a).epsilon(1e-12));
    CHECK(std::abs(next.proportions.at("a") - 0.6499) <= 1e-4);
    CHECK(std::abs(next.proportions.at("b") - 0.3501) <= 1e-4);
    CHECK(next.allocations.at("a") == 650);
    CHECK(next.allocations.at("b") == 350);
    CHECK(next.iteration == prev.iteration + 1);

    // Zero range takes the fallback branch.
    MixtureState flat = step(prev, make_report({{"a", 2.0}, {"b", 2.0}}), config);
    CHECK(flat.proportions.at("a") == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(flat.allocations.at("a") == 500);

    // Mismatched language sets are a caller error.
    CHECK_THROWS_AS(step(prev, make_report({{"a", 3.0}, {"c", 1.5}}), config), Error);
}

TEST_CASE("the composed step equals the one-line update rule") {
    SplitMix64 rng(0xe9e9);
    for (int round = 0; round < 200; ++round) {
        int n = 2 + static_cast<int>(rng.next_below(6));
        AdaptMixConfig config = base_config();
        config.epsilon = 1e-4 + rng.next_double() * 0.01;
        config.mu = 0.05 + rng.next_double() * 0.95;
        config.budget_chars = 1 + rng.next_below(1000000);
        if (rng.next_below(2) == 0) config.f_best_mode = FBestMode::DynamicMin;

        std::map<LanguageId, double> fertility;
        MixtureState prev;
        double prev_sum = 0.0;
        for (int i = 0; i < n; ++i) {
            std::string lang = "lang" + std::to_string(i);
            fertility[lang] = 1.0 + rng.next_double() * 9.0;
            double w = rng.next_double() + 1e-6;
            prev.proportions[lang] = w;
            prev_sum += w;
        }
        for (auto& [lang, w] : prev.proportions) w /= prev_sum;
        FertilityReport report = make_report(fertility);
        if (!(report.f_range > 0.0)) continue;

        MixtureState next = step(prev, report, config);

        // Direct evaluation of the consolidated update:
        // m_l = (1-mu) m_prev_l + mu (delta_l + eps) / sum_k (delta_k + eps).
        double f_best = config.f_best_mode == FBestMode::DynamicMin
                            ? report.f_min
                            : config.f_best;
        double wsum = 0.0;
        for (const auto& [lang, f] : fertility) {
            double d = (f - f_best) / report.f_range;
            if (config.f_best_mode == FBestMode::Fixed && d < 0.0) d = 0.0;
            wsum += d + config.epsilon;
        }
        double total = 0.0;
        for (const auto& [lang, f] : fertility) {
            double d = (f - f_best) / report.f_range;
            if (config.f_best_mode == FBestMode::Fixed && d < 0.0) d = 0.0;
            double direct = (1.0 - config.mu) * prev.proportions.at(lang) +
                            config.mu * (d + config.epsilon) / wsum;
            CHECK(std::abs(next.proportions.at(lang) - direct) <= 1e-12);
            total += next.proportions.at(lang);
        }
        // Simplex preservation.
        CHECK(std::abs(total - 1.0) <= 1e-9);
        for (const auto& [lang, m] : next.proportions) CHECK(m > 0.0);
    }
}

TEST_CASE("higher fertility always earns a higher target") {
    SplitMix64 rng(0x0cde);
    for (int round = 0; round < 50; ++round) {
        std::map<LanguageId, double> fertility;
        for (int i = 0; i < 5; ++i) {
            fertility["lang" + std::to_string(i)] = 1.0 + rng.next_double() * 5.0;
        }
        FertilityReport report = make_report(fertility);
        if (!(report.f_range > 0.0)) continue;
        AdaptMixConfig config = base_config();
        auto t = target_proportions(compute_deficits(report, config), config.epsilon);
        for (const auto& [la, fa] : fertility) {
            for (const auto& [lb, fb] : fertility) {
                if (fa > fb) CHECK(t.at(la) > t.at(lb));
            }
        }
    }
}

TEST_CASE("a mixture already at its target is a fixed point") {
    AdaptMixConfig config = base_config();
    FertilityReport report = make_report({{"a", 2.0}, {"b", 1.2}, {"c", 3.0}});
    auto t = target_proportions(compute_deficits(report, config), config.epsilon);

    MixtureState prev;
    prev.proportions = t;
    MixtureState next = step(prev, report, config);
    for (const auto& [lang, m] : t) {
        CHECK(next.proportions.at(lang) == doctest::Approx(m).epsilon(1e-12));
    }
}

TEST_CASE("uniform mixtures split the budget evenly") {
    MixtureState state = uniform_mixture({"a", "b", "c"}, 100);
    CHECK(state.iteration == 0);
    CHECK(state.proportions.at("b") == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    std::uint64_t total = 0;
    for (const auto& [lang, c] : state.allocations) total += c;
    CHECK(total == 100);
    CHECK_THROWS_AS(uniform_mixture({}, 100), Error);
    CHECK_THROWS_AS(uniform_mixture({"a", "a"}, 100), Error);
}

TEST_CASE("config invariants are enforced") {
    AdaptMixConfig config = base_config();
    CHECK_NOTHROW(config.validate());

    AdaptMixConfig bad = config;
    bad.epsilon = 0.0;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = config;
    bad.mu = 0.0;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = config;
    bad.mu = 1.5;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = config;
    bad.budget_chars = 0;
    CHECK_THROWS_AS(bad.validate(), Error);
    bad = config;
    bad.iterations = 0;
    CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("config files parse, reject unknown keys, and roundtrip") {
    std::string json = R"({
        "f_best": 1.0,
        "epsilon": 0.001,
        "mu": 0.5,
        "budget_chars": 200000,
        "iterations": 10,
        "f_best_mode": "dynamic-min",
        "base_seed": 42
    })";
    AdaptMixConfig config = adaptmix_config_from_json(json);
    CHECK(config.budget_chars == 200000);
    CHECK(config.iterations == 10);
    CHECK(config.f_best_mode == FBestMode::DynamicMin);
    CHECK(config.base_seed == 42);

    AdaptMixConfig back = adaptmix_config_from_json(adaptmix_config_to_json(config));
    CHECK(back.budget_chars == config.budget_chars);
    CHECK(back.f_best_mode == config.f_best_mode);
    CHECK(back.epsilon == doctest::Approx(config.epsilon).epsilon(1e-12));

    CHECK_THROWS_AS(adaptmix_config_from_json(R"({"budget_chars": 1, "typo": 2})"),
                    ParseError);
    CHECK_THROWS_AS(adaptmix_config_from_json(R"({"iterations": 5})"), ParseError);
    CHECK_THROWS_AS(adaptmix_config_from_json("not json"), ParseError);
    CHECK(f_best_mode_from_name("fixed") == FBestMode::Fixed);
    CHECK_THROWS_AS(f_best_mode_from_name("other"), Error);
}

TEST_CASE("a single-iteration run records only the uniform mixture") {
    TempDir tmp;
    write_corpus(tmp.path(), {{"ee", {"aa bb cc dd aa bb", "cc dd aa bb cc dd"}},
                              {"hh", {"pq rs tu vw pq rs", "tu vw pq rs tu vw"}}});
    CorpusStore store = ingest(tmp.path());
    std::map<LanguageId, SampledCorpus> eval_set;
    eval_set["ee"] = sample_characters(store, "ee", 30, 999);
    eval_set["hh"] = sample_characters(store, "hh", 30, 999);

    AdaptMixConfig config = base_config();
    config.budget_chars = 24;
    config.iterations = 1;
    OptimizeOptions options;
    options.vocab_size = 300;

    Trajectory trajectory = optimize(store, eval_set, config, options);
    REQUIRE(trajectory.entries.size() == 1);
    CHECK(trajectory.entries[0].state.proportions.at("ee") ==
          doctest::Approx(0.5).epsilon(1e-12));
    CHECK(trajectory.entries[0].report.fertility.count("ee") == 1);
    CHECK(trajectory.entries[0].report.fertility.count("hh") == 1);
}

TEST_CASE("identical languages stay uniform across iterations") {
    TempDir tmp;
    std::vector<std::string> docs = {"aa bb cc dd aa bb cc", "dd aa bb cc dd aa bb"};
    write_corpus(tmp.path(), {{"l1", docs}, {"l2", docs}});
    CorpusStore store = ingest(tmp.path());
    std::map<LanguageId, SampledCorpus> eval_set;
    eval_set["l1"] = sample_characters(store, "l1", 30, 7);
    eval_set["l2"] = sample_characters(store, "l2", 30, 7);
    // Identical documents make the samples identical too.
    REQUIRE(eval_set["l1"].documents == eval_set["l2"].documents);

    AdaptMixConfig config = base_config();
    config.budget_chars = 24;
    config.iterations = 4;
    OptimizeOptions options;
    options.vocab_size = 300;

    Trajectory trajectory = optimize(store, eval_set, config, options);
    REQUIRE(trajectory.entries.size() == 4);
    for (const auto& entry : trajectory.entries) {
        CHECK(std::abs(entry.state.proportions.at("l1") - 0.5) <= 1e-9);
        CHECK(std::abs(entry.state.proportions.at("l2") - 0.5) <= 1e-9);
    }
}

TEST_CASE("errors inside the loop carry the iteration index") {
    TempDir tmp;
    write_corpus(tmp.path(), {{"l1", {"aa bb cc"}}, {"l2", {"dd ee ff"}}});
    CorpusStore store = ingest(tmp.path());
    std::map<LanguageId, SampledCorpus> eval_set;
    eval_set["l1"] = sample_characters(store, "l1", 8, 7);
    eval_set["l2"] = sample_characters(store, "l2", 8, 7);

    AdaptMixConfig config = base_config();
    config.budget_chars = 16;
    OptimizeOptions options;
    options.vocab_size = 261;  // below the mandatory minimum: 5 + 256 + alphabet

    try {
        optimize(store, eval_set, config, options);
        FAIL("expected Error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("iteration 0") != std::string::npos);
    }
}

TEST_CASE("a fixed rider corpus joins training without consuming budget") {
    TempDir tmp;
    write_corpus(tmp.path() / "main", {{"l1", {"aa bb cc dd"}}, {"l2", {"ee ff gg hh"}}});
    write_corpus(tmp.path() / "code", {{"code", {"x += 1; y += 2;"}}});
    CorpusStore store = ingest(tmp.path() / "main");
    std::map<LanguageId, SampledCorpus> eval_set;
    eval_set["l1"] = sample_characters(store, "l1", 8, 7);
    eval_set["l2"] = sample_characters(store, "l2", 8, 7);

    AdaptMixConfig config = base_config();
    config.budget_chars = 16;
    config.iterations = 1;
    config.fixed_corpus_dir = (tmp.path() / "code").string();
    OptimizeOptions options;
    options.vocab_size = 300;

    std::vector<TokenizerModel> models;
    options.on_iteration = [&models](const TrajectoryEntry&, const TokenizerModel& m) {
        models.push_back(m);
    };
    optimize(store, eval_set, config, options);
    REQUIRE(models.size() == 1);
    // '+' and ';' only occur in the rider corpus, yet land in the alphabet.
    CHECK(models[0].vocab.char_to_id.count(U'+') == 1);
    CHECK(models[0].vocab.char_to_id.count(U';') == 1);
}

TEST_CASE("trajectories roundtrip through JSON with stable bytes") {
    Trajectory trajectory;
    for (int n = 0; n < 3; ++n) {
        TrajectoryEntry entry;
        entry.state.iteration = static_cast<std::uint64_t>(n);
        entry.state.proportions = {{"a", 0.5 + 0.1 * n}, {"b", 0.5 - 0.1 * n}};
        entry.state.allocations = {{"a", 500 + 100u * n}, {"b", 500 - 100u * n}};
        entry.report = make_report({{"a", 2.0 + n}, {"b", 1.5}}, n);
        trajectory.entries.push_back(entry);
    }

    std::string json = trajectory_to_json(trajectory);
    Trajectory back = trajectory_from_json(json);
    REQUIRE(back.entries.size() == 3);
    CHECK(trajectory_to_json(back) == json);
    CHECK(back.entries[2].state.allocations.at("a") == 700);
    CHECK(back.entries[2].report.fertility.at("a") == doctest::Approx(4.0));

    std::string csv = trajectory_to_plot_csv(trajectory);
    CHECK(csv.find("iteration,language,fertility,proportion") == 0);
    // One row per (iteration, language) pair plus the header line.
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
}
