#include "adaptmix/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "adaptmix/errors.hpp"

namespace adaptmix {
namespace {

void require_same_languages(const std::map<LanguageId, double>& a,
                            const std::map<LanguageId, double>& b,
                            const char* what) {
    if (a.size() == b.size() &&
        std::equal(a.begin(), a.end(), b.begin(),
                   [](const auto& x, const auto& y) { return x.first == y.first; })) {
        return;
    }
    throw Error(std::string("language sets differ between ") + what);
}

}  // namespace

void AdaptMixConfig::validate() const {
    if (!(epsilon > 0.0)) throw Error("epsilon must be positive");
    if (!(mu > 0.0) || mu > 1.0) throw Error("mu must be in (0, 1]");
    if (budget_chars == 0) throw Error("budget_chars must be positive");
    if (iterations < 1) throw Error("iterations must be at least 1");
    if (!std::isfinite(f_best)) throw Error("f_best must be finite");
}

std::map<LanguageId, double> compute_deficits(const FertilityReport& report,
                                              const AdaptMixConfig& config) {
    if (!(report.f_range > 0.0)) {
        throw Error("fertility range is zero; the fallback step applies");
    }
    double f_best = config.f_best_mode == FBestMode::DynamicMin ? report.f_min
                                                                : config.f_best;
    std::map<LanguageId, double> deficits;
    for (const auto& [lang, f] : report.fertility) {
        double d = (f - f_best) / report.f_range;
        if (config.f_best_mode == FBestMode::Fixed && d < 0.0) {
            d = 0.0;  // already at or past the target; no extra budget needed
        }
        deficits[lang] = d;
    }
    return deficits;
}

std::map<LanguageId, double> target_proportions(
    const std::map<LanguageId, double>& deficits, double epsilon) {
    double sum = 0.0;
    for (const auto& [lang, d] : deficits) {
        if (!std::isfinite(d)) throw Error("deficit of '" + lang + "' is not finite");
        sum += d + epsilon;
    }
    if (!(sum > 0.0)) {
        throw Error("deficit weights sum to zero; cannot normalize");
    }
    std::map<LanguageId, double> targets;
    for (const auto& [lang, d] : deficits) {
        targets[lang] = (d + epsilon) / sum;
    }
    return targets;
}

std::map<LanguageId, double> ema_update(const std::map<LanguageId, double>& m_prev,
                                        const std::map<LanguageId, double>& target,
                                        double mu) {
    require_same_languages(m_prev, target, "previous mixture and targets");
    std::map<LanguageId, double> mixed;
    double sum = 0.0;
    auto t_it = target.begin();
    for (const auto& [lang, prev] : m_prev) {
        double v = (1.0 - mu) * prev + mu * t_it->second;
        mixed[lang] = v;
        sum += v;
        ++t_it;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        for (auto& [lang, v] : mixed) v /= sum;
    }
    return mixed;
}

std::map<LanguageId, std::uint64_t> allocate_budget(
    const std::map<LanguageId, double>& proportions, std::uint64_t total) {
    std::map<LanguageId, std::uint64_t> alloc;
    std::vector<std::pair<LanguageId, double>> residues;  // x - round(x)
    std::int64_t assigned = 0;
    for (const auto& [lang, m] : proportions) {
        double x = m * static_cast<double>(total);
        auto c = static_cast<std::int64_t>(std::llround(x));
        if (c < 0) c = 0;
        alloc[lang] = static_cast<std::uint64_t>(c);
        residues.emplace_back(lang, x - static_cast<double>(c));
        assigned += c;
    }
    std::int64_t diff = static_cast<std::int64_t>(total) - assigned;
    if (diff > 0) {
        // Under-assigned: raise the largest residues first.
        std::sort(residues.begin(), residues.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        std::size_t i = 0;
        while (diff > 0) {
            alloc[residues[i].first] += 1;
            --diff;
            i = (i + 1) % residues.size();
        }
    } else if (diff < 0) {
        // Over-assigned: lower the smallest residues first.
        std::sort(residues.begin(), residues.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second < b.second;
            return a.first < b.first;
        });
        std::size_t i = 0;
        while (diff < 0) {
            auto& c = alloc[residues[i].first];
            if (c > 0) {
                c -= 1;
                ++diff;
            }
            i = (i + 1) % residues.size();
        }
    }
    return alloc;
}

MixtureState fallback_step(const MixtureState& prev, std::uint64_t total) {
    double sum = 0.0;
    for (const auto& [lang, m] : prev.proportions) sum += m;
    if (!(sum > 0.0)) {
        throw Error("previous mixture sums to zero; cannot renormalize");
    }
    MixtureState next;
    next.iteration = prev.iteration + 1;
    for (const auto& [lang, m] : prev.proportions) {
        next.proportions[lang] = m / sum;
    }
    next.allocations = allocate_budget(next.proportions, total);
    return next;
}

MixtureState step(const MixtureState& prev, const FertilityReport& report,
                  const AdaptMixConfig& config) {
    config.validate();
    require_same_languages(prev.proportions, report.fertility,
                           "mixture state and fertility report");
    if (!(report.f_range > 0.0)) {
        return fallback_step(prev, config.budget_chars);
    }
    auto deficits = compute_deficits(report, config);
    auto targets = target_proportions(deficits, config.epsilon);
    auto mixed = ema_update(prev.proportions, targets, config.mu);
    MixtureState next;
    next.iteration = prev.iteration + 1;
    next.proportions = std::move(mixed);
    next.allocations = allocate_budget(next.proportions, config.budget_chars);
    return next;
}

MixtureState uniform_mixture(const std::vector<LanguageId>& langs,
                             std::uint64_t total) {
    if (langs.empty()) throw Error("cannot build a mixture over zero languages");
    MixtureState state;
    double share = 1.0 / static_cast<double>(langs.size());
    for (const auto& lang : langs) state.proportions[lang] = share;
    if (state.proportions.size() != langs.size()) {
        throw Error("duplicate language in mixture");
    }
    state.allocations = allocate_budget(state.proportions, total);
    return state;
}

Trajectory optimize(const CorpusStore& store,
                    const std::map<LanguageId, SampledCorpus>& eval_set,
                    const AdaptMixConfig& config, const OptimizeOptions& options) {
    config.validate();
    options.pretok.validate();

    std::vector<LanguageId> langs = store.languages();
    if (langs.size() < 2) {
        throw Error("mixture optimization needs at least 2 languages");
    }
    for (const auto& lang : langs) {
        if (eval_set.find(lang) == eval_set.end()) {
            throw Error("evaluation set is missing language '" + lang + "'");
        }
    }
    for (const auto& [lang, corpus] : eval_set) {
        if (!store.has_language(lang)) {
            throw Error("evaluation set names unknown language '" + lang + "'");
        }
    }

    // The optional code/math corpus rides along every iteration outside the
    // character budget.
    std::vector<SampledCorpus> fixed_corpora;
    if (!config.fixed_corpus_dir.empty()) {
        CorpusStore fixed = ingest(config.fixed_corpus_dir);
        for (const auto& [lang, docs] : fixed.documents) {
            SampledCorpus c;
            c.language = lang;
            c.documents = docs;
            c.character_count = fixed.totals.at(lang).characters;
            fixed_corpora.push_back(std::move(c));
        }
    }

    Trajectory trajectory;
    MixtureState state = uniform_mixture(langs, config.budget_chars);

    for (int n = 0; n < config.iterations; ++n) {
        TrajectoryEntry entry;
        TokenizerModel model;
        try {
            std::vector<SampledCorpus> corpora;
            corpora.reserve(langs.size() + fixed_corpora.size());
            for (const auto& lang : langs) {
                corpora.push_back(sample_characters(
                    store, lang, state.allocations.at(lang),
                    config.base_seed + static_cast<std::uint64_t>(n)));
            }
            for (const auto& fixed : fixed_corpora) corpora.push_back(fixed);

            Vocabulary seed = seed_alphabet(corpora, {}, options.vocab_size,
                                            options.specials);
            model = train_bpe(corpora, options.vocab_size, options.pretok,
                              std::move(seed), options.train_options);
            entry.report = evaluate(model, eval_set, options.train_options.threads);
            entry.report.iteration = static_cast<std::uint64_t>(n);
        } catch (const std::exception& e) {
            throw Error("iteration " + std::to_string(n) + ": " + e.what());
        }
        entry.state = state;
        trajectory.entries.push_back(entry);
        if (options.on_iteration) options.on_iteration(entry, model);

        if (n + 1 >= config.iterations) break;
        MixtureState next = step(state, entry.report, config);
        if (options.early_stop) {
            double max_delta = 0.0;
            for (const auto& [lang, m] : next.proportions) {
                max_delta = std::max(max_delta,
                                     std::abs(m - state.proportions.at(lang)));
            }
            if (max_delta < options.early_stop_delta) break;
        }
        state = std::move(next);
    }
    return trajectory;
}

AdaptMixConfig adaptmix_config_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("optimizer config JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("optimizer config JSON: expected an object");

    static const char* known[] = {"f_best",     "epsilon",     "mu",
                                  "budget_chars", "iterations",  "f_best_mode",
                                  "base_seed",  "fixed_corpus_dir"};
    for (const auto& [key, value] : doc.items()) {
        if (std::find_if(std::begin(known), std::end(known),
                         [&key](const char* k) { return key == k; }) == std::end(known)) {
            throw ParseError("optimizer config JSON: unknown key '" + key + "'");
        }
    }
    if (!doc.contains("budget_chars")) {
        throw ParseError("optimizer config JSON: missing required key 'budget_chars'");
    }

    AdaptMixConfig config;
    try {
        if (doc.contains("f_best")) config.f_best = doc["f_best"].get<double>();
        if (doc.contains("epsilon")) config.epsilon = doc["epsilon"].get<double>();
        if (doc.contains("mu")) config.mu = doc["mu"].get<double>();
        config.budget_chars = doc["budget_chars"].get<std::uint64_t>();
        if (doc.contains("iterations")) config.iterations = doc["iterations"].get<int>();
        if (doc.contains("f_best_mode")) {
            config.f_best_mode = f_best_mode_from_name(
                doc["f_best_mode"].get<std::string>());
        }
        if (doc.contains("base_seed")) {
            config.base_seed = doc["base_seed"].get<std::uint64_t>();
        }
        if (doc.contains("fixed_corpus_dir")) {
            config.fixed_corpus_dir = doc["fixed_corpus_dir"].get<std::string>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("optimizer config JSON: ") + e.what());
    }
    config.validate();
    return config;
}

AdaptMixConfig load_adaptmix_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read config file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return adaptmix_config_from_json(buf.str());
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    } catch (const Error& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

std::string adaptmix_config_to_json(const AdaptMixConfig& config) {
    nlohmann::ordered_json doc;
    doc["f_best"] = config.f_best;
    doc["epsilon"] = config.epsilon;
    doc["mu"] = config.mu;
    doc["budget_chars"] = config.budget_chars;
    doc["iterations"] = config.iterations;
    doc["f_best_mode"] = f_best_mode_name(config.f_best_mode);
    doc["base_seed"] = config.base_seed;
    if (!config.fixed_corpus_dir.empty()) {
        doc["fixed_corpus_dir"] = config.fixed_corpus_dir;
    }
    return doc.dump(2) + "\n";
}

std::string trajectory_to_json(const Trajectory& trajectory) {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const auto& entry : trajectory.entries) {
        nlohmann::ordered_json row;
        row["iteration"] = entry.state.iteration;
        nlohmann::ordered_json proportions = nlohmann::ordered_json::object();
        for (const auto& [lang, m] : entry.state.proportions) proportions[lang] = m;
        row["proportions"] = std::move(proportions);
        nlohmann::ordered_json allocations = nlohmann::ordered_json::object();
        for (const auto& [lang, c] : entry.state.allocations) allocations[lang] = c;
        row["allocations"] = std::move(allocations);
        nlohmann::ordered_json fertility = nlohmann::ordered_json::object();
        for (const auto& [lang, f] : entry.report.fertility) fertility[lang] = f;
        row["fertility"] = std::move(fertility);
        row["f_range"] = entry.report.f_range;
        row["average"] = entry.report.average;
        out.push_back(std::move(row));
    }
    return out.dump(2) + "\n";
}

Trajectory trajectory_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("trajectory JSON: ") + e.what());
    }
    if (!doc.is_array()) throw ParseError("trajectory JSON: expected an array");
    Trajectory trajectory;
    for (const auto& row : doc) {
        for (const char* field :
             {"iteration", "proportions", "allocations", "fertility", "f_range",
              "average"}) {
            if (!row.contains(field)) {
                throw ParseError(std::string("trajectory JSON: row missing '") + field +
                                 "'");
            }
        }
        TrajectoryEntry entry;
        entry.state.iteration = row["iteration"].get<std::uint64_t>();
        entry.report.iteration = entry.state.iteration;
        for (const auto& [lang, m] : row["proportions"].items()) {
            entry.state.proportions[lang] = m.get<double>();
        }
        for (const auto& [lang, c] : row["allocations"].items()) {
            entry.state.allocations[lang] = c.get<std::uint64_t>();
        }
        for (const auto& [lang, f] : row["fertility"].items()) {
            entry.report.fertility[lang] = f.get<double>();
        }
        entry.report.derive();
        trajectory.entries.push_back(std::move(entry));
    }
    return trajectory;
}

std::string trajectory_to_plot_csv(const Trajectory& trajectory) {
    std::ostringstream out;
    out << "iteration,language,fertility,proportion\n";
    out << std::setprecision(10);
    for (const auto& entry : trajectory.entries) {
        for (const auto& [lang, f] : entry.report.fertility) {
            out << entry.state.iteration << "," << lang << "," << f << ","
                << entry.state.proportions.at(lang) << "\n";
        }
    }
    return std::move(out).str();
}

const char* f_best_mode_name(FBestMode mode) {
    return mode == FBestMode::DynamicMin ? "dynamic-min" : "fixed";
}

FBestMode f_best_mode_from_name(std::string_view name) {
    if (name == "fixed") return FBestMode::Fixed;
    if (name == "dynamic-min") return FBestMode::DynamicMin;
    throw ParseError("unknown f_best_mode '" + std::string(name) +
                     "' (expected fixed or dynamic-min)");
}

}  // namespace adaptmix
