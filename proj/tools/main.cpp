// adaptmix command-line tool: corpus ingestion, tokenizer training, fertility
// evaluation, and mixture optimization as reproducible subcommands.

#include <CLI11.hpp>
#include <adaptmix/bpe.hpp>
#include <adaptmix/corpus.hpp>
#include <adaptmix/errors.hpp>
#include <adaptmix/metrics.hpp>
#include <adaptmix/mixture.hpp>
#include <adaptmix/pretokenizer.hpp>
#include <adaptmix/version.hpp>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace adaptmix;

namespace {

int resolve_threads_flag(int flag_value) {
    if (flag_value > 0) return flag_value;
    if (const char* env = std::getenv("ADAPTMIX_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 0;  // modules fall back to hardware concurrency
}

std::string fnv1a_hex(std::string_view data) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0') << h;
    return std::move(out).str();
}

std::string iso_utc_now() {
    std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_text_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
    if (!out) throw Error("write failed for " + path.string());
}

// Reproduction record dropped next to every run's primary output.
void write_manifest(const fs::path& primary_out, const std::string& command,
                    const std::vector<std::string>& argv_copy,
                    const std::string& config_hash, std::uint64_t base_seed,
                    const std::string& started_at,
                    const std::vector<std::string>& outputs) {
    nlohmann::ordered_json doc;
    doc["tool"] = "adaptmix";
    doc["version"] = kVersion;
    doc["command"] = command;
    doc["argv"] = argv_copy;
    doc["config_hash"] = config_hash;
    doc["base_seed"] = base_seed;
    doc["started_at"] = started_at;
    doc["finished_at"] = iso_utc_now();
    doc["outputs"] = outputs;
    fs::path path = primary_out;
    path += ".manifest.json";
    write_text_file(path, doc.dump(2) + "\n");
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "adaptmix: warning: " << w << "\n";
}

// Shared pre-tokenizer flags for train and optimize.
struct PretokFlags {
    std::string strategy = "pt0";
    std::string subset_file;
    bool no_digit_split = false;
    bool no_newline_split = false;
    int whitespace_group_max = 4;

    void attach(CLI::App* cmd) {
        cmd->add_option("--pretok", strategy,
                        "Pre-tokenization strategy: pt0, pt1, or pt2")
            ->default_val("pt0");
        cmd->add_option("--diacritic-subset", subset_file,
                        "JSON file of \"U+XXXX\" code points separated under pt1");
        cmd->add_flag("--no-digit-split", no_digit_split,
                      "Keep digits inside word segments");
        cmd->add_flag("--no-newline-split", no_newline_split,
                      "Treat newlines as ordinary whitespace");
        cmd->add_option("--whitespace-group-max", whitespace_group_max,
                        "Longest whitespace run kept as one segment")
            ->default_val(4);
    }

    PreTokenizerConfig build() const {
        PreTokenizerConfig config;
        config.strategy = strategy_from_name(strategy);
        if (config.strategy == PretokStrategy::PT1) {
            config.diacritic_subset = subset_file.empty()
                                          ? default_diacritic_subset()
                                          : load_diacritic_subset(subset_file);
        } else if (!subset_file.empty()) {
            throw Error("--diacritic-subset only applies to --pretok pt1");
        }
        config.digit_split = !no_digit_split;
        config.split_on_newline = !no_newline_split;
        config.whitespace_group_max = whitespace_group_max;
        config.validate();
        return config;
    }
};

// Full language documents, or seeded samples when a budget is given.
std::map<LanguageId, SampledCorpus> corpus_per_language(const CorpusStore& store,
                                                        std::uint64_t budget,
                                                        std::uint64_t seed) {
    std::map<LanguageId, SampledCorpus> out;
    for (const auto& lang : store.languages()) {
        if (budget > 0) {
            out[lang] = sample_characters(store, lang, budget, seed);
        } else {
            SampledCorpus c;
            c.language = lang;
            c.documents = store.documents.at(lang);
            c.character_count = store.totals.at(lang).characters;
            out[lang] = std::move(c);
        }
    }
    return out;
}

struct IngestStatsArgs {
    std::string corpus_dir;
    std::string out_file;
};

int cmd_ingest_stats(const IngestStatsArgs& args,
                     const std::vector<std::string>& argv_copy) {
    std::string started = iso_utc_now();
    std::vector<std::string> warnings;
    CorpusStore store = ingest(args.corpus_dir, &warnings);
    print_warnings(warnings);
    std::string json = stats_to_json(store);
    if (args.out_file.empty()) {
        std::cout << json;
    } else {
        write_text_file(args.out_file, json);
        write_manifest(args.out_file, "ingest-stats", argv_copy, fnv1a_hex(json), 0,
                       started, {args.out_file});
    }
    return 0;
}

struct TrainArgs {
    std::string corpus_dir;
    std::uint32_t vocab_size = 0;
    PretokFlags pretok;
    std::uint32_t min_frequency = 2;
    std::uint64_t budget_chars = 0;  // per language; 0 = whole corpus
    std::uint64_t seed = 0;
    int threads = 0;
    std::string out_file;
    std::string stats_file;
};

int cmd_train(const TrainArgs& args, const std::vector<std::string>& argv_copy) {
    std::string started = iso_utc_now();
    auto t0 = std::chrono::steady_clock::now();

    std::vector<std::string> warnings;
    CorpusStore store = ingest(args.corpus_dir, &warnings);
    print_warnings(warnings);

    std::vector<SampledCorpus> corpora;
    for (auto& [lang, corpus] : corpus_per_language(store, args.budget_chars, args.seed)) {
        corpora.push_back(std::move(corpus));
    }

    PreTokenizerConfig pretok = args.pretok.build();
    TrainOptions options;
    options.min_frequency = args.min_frequency;
    options.threads = resolve_threads_flag(args.threads);

    Vocabulary seed_vocab = seed_alphabet(corpora, {}, args.vocab_size);
    TokenizerModel model =
        train_bpe(corpora, args.vocab_size, pretok, std::move(seed_vocab), options);
    save_model(model, args.out_file);

    double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                         .count();
    nlohmann::ordered_json stats;
    stats["elapsed_seconds"] = elapsed;
    stats["vocab_size"] = model.vocab.target_size;
    nlohmann::ordered_json composition;
    composition["specials"] = model.vocab.specials.size();
    composition["bytes"] = 256;
    composition["characters"] = model.vocab.alphabet.size();
    composition["merges"] = model.merges.size();
    composition["reserved"] = model.vocab.reserved_slots();
    stats["composition"] = std::move(composition);
    nlohmann::ordered_json langs = nlohmann::ordered_json::object();
    for (const auto& corpus : corpora) langs[corpus.language] = corpus.character_count;
    stats["training_characters"] = std::move(langs);

    std::vector<std::string> outputs = {args.out_file};
    if (!args.stats_file.empty()) {
        write_text_file(args.stats_file, stats.dump(2) + "\n");
        outputs.push_back(args.stats_file);
    } else {
        std::cout << stats.dump(2) << "\n";
    }
    write_manifest(args.out_file, "train", argv_copy,
                   fnv1a_hex(model_to_json(model)), args.seed, started, outputs);
    return 0;
}

struct EvalArgs {
    std::string model_file;
    std::string corpus_dir;
    std::uint64_t budget_chars = 0;
    std::uint64_t seed = 0;
    std::string parity_ref;
    int threads = 0;
    std::string csv_file;
    std::string json_file;
};

int cmd_eval(const EvalArgs& args, const std::vector<std::string>& argv_copy) {
    std::string started = iso_utc_now();
    TokenizerModel model = load_model(args.model_file);

    std::vector<std::string> warnings;
    CorpusStore store = ingest(args.corpus_dir, &warnings);
    print_warnings(warnings);
    auto eval_set = corpus_per_language(store, args.budget_chars, args.seed);

    FertilityReport report = evaluate(model, eval_set, resolve_threads_flag(args.threads));
    ParityReport parity_report;
    const ParityReport* parity_ptr = nullptr;
    if (!args.parity_ref.empty()) {
        parity_report = parity(report, args.parity_ref);
        parity_ptr = &parity_report;
    }

    std::string csv = report_to_csv(report, parity_ptr);
    std::string json = report_to_json(report, parity_ptr);
    std::vector<std::string> outputs;
    if (!args.csv_file.empty()) {
        write_text_file(args.csv_file, csv);
        outputs.push_back(args.csv_file);
    }
    if (!args.json_file.empty()) {
        write_text_file(args.json_file, json);
        outputs.push_back(args.json_file);
    }
    if (outputs.empty()) {
        std::cout << csv;
    } else {
        write_manifest(outputs.front(), "eval", argv_copy, fnv1a_hex(csv), args.seed,
                       started, outputs);
    }
    return 0;
}

struct OptimizeArgs {
    std::string corpus_dir;
    std::string eval_corpus_dir;
    std::uint64_t eval_budget = 0;
    std::string config_file;
    std::string f_best_mode_override;
    std::uint32_t vocab_size = 4096;
    PretokFlags pretok;
    std::uint32_t min_frequency = 2;
    int threads = 0;
    std::string out_file;
    std::string keep_models_dir;
    std::string plot_file;
};

int cmd_optimize(const OptimizeArgs& args, const std::vector<std::string>& argv_copy) {
    std::string started = iso_utc_now();

    std::string config_text;
    {
        std::ifstream in(args.config_file, std::ios::binary);
        if (!in) throw Error("cannot read config file: " + args.config_file);
        std::ostringstream buf;
        buf << in.rdbuf();
        config_text = std::move(buf).str();
    }
    AdaptMixConfig config = adaptmix_config_from_json(config_text);
    if (!args.f_best_mode_override.empty()) {
        config.f_best_mode = f_best_mode_from_name(args.f_best_mode_override);
    }

    std::vector<std::string> warnings;
    CorpusStore store = ingest(args.corpus_dir, &warnings);
    print_warnings(warnings);

    std::map<LanguageId, SampledCorpus> eval_set;
    if (args.eval_corpus_dir.empty()) {
        eval_set = corpus_per_language(store, args.eval_budget, config.base_seed);
    } else {
        CorpusStore eval_store = ingest(args.eval_corpus_dir, &warnings);
        print_warnings(warnings);
        eval_set = corpus_per_language(eval_store, args.eval_budget, config.base_seed);
    }

    OptimizeOptions options;
    options.vocab_size = args.vocab_size;
    options.pretok = args.pretok.build();
    options.train_options.min_frequency = args.min_frequency;
    options.train_options.threads = resolve_threads_flag(args.threads);

    if (!args.keep_models_dir.empty()) fs::create_directories(args.keep_models_dir);

    // Flush the partial trajectory after every iteration so an aborted run
    // still leaves its completed prefix on disk.
    Trajectory partial;
    std::uint64_t model_index = 0;
    options.on_iteration = [&](const TrajectoryEntry& entry, const TokenizerModel& model) {
        partial.entries.push_back(entry);
        write_text_file(args.out_file, trajectory_to_json(partial));
        if (!args.plot_file.empty()) {
            write_text_file(args.plot_file, trajectory_to_plot_csv(partial));
        }
        if (!args.keep_models_dir.empty()) {
            std::ostringstream name;
            name << "model_" << std::setw(4) << std::setfill('0') << model_index
                 << ".json";
            save_model(model, fs::path(args.keep_models_dir) / name.str());
        }
        ++model_index;
    };

    Trajectory trajectory = optimize(store, eval_set, config, options);

    std::string json = trajectory_to_json(trajectory);
    write_text_file(args.out_file, json);
    std::vector<std::string> outputs = {args.out_file};
    if (!args.plot_file.empty()) {
        write_text_file(args.plot_file, trajectory_to_plot_csv(trajectory));
        outputs.push_back(args.plot_file);
    }
    if (!args.keep_models_dir.empty()) outputs.push_back(args.keep_models_dir);
    write_manifest(args.out_file, "optimize", argv_copy, fnv1a_hex(config_text),
                   config.base_seed, started, outputs);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> argv_copy(argv, argv + argc);

    CLI::App app{"Tokenizer training and data-mixture optimization toolkit"};
    app.set_version_flag("--version", std::string("adaptmix ") + kVersion);
    app.require_subcommand(1);

    IngestStatsArgs ingest_args;
    auto* ingest_cmd = app.add_subcommand(
        "ingest-stats", "Read a corpus tree and report per-language totals");
    ingest_cmd->add_option("--corpus", ingest_args.corpus_dir, "Corpus root directory")
        ->required();
    ingest_cmd->add_option("--out", ingest_args.out_file,
                           "Stats JSON path (stdout when omitted)");

    TrainArgs train_args;
    auto* train_cmd =
        app.add_subcommand("train", "Train a byte-level BPE tokenizer on a corpus");
    train_cmd->add_option("--corpus", train_args.corpus_dir, "Corpus root directory")
        ->required();
    train_cmd->add_option("--vocab-size", train_args.vocab_size, "Total vocabulary size")
        ->required();
    train_args.pretok.attach(train_cmd);
    train_cmd->add_option("--min-frequency", train_args.min_frequency,
                          "Lowest pair count that may merge")
        ->default_val(2);
    train_cmd->add_option("--budget-chars", train_args.budget_chars,
                          "Per-language training characters (0 = whole corpus)");
    train_cmd->add_option("--seed", train_args.seed, "Sampling seed");
    train_cmd->add_option("--threads", train_args.threads,
                          "Worker threads (ADAPTMIX_THREADS, then hardware, when 0)");
    train_cmd->add_option("--out", train_args.out_file, "Model JSON path")->required();
    train_cmd->add_option("--stats", train_args.stats_file,
                          "Training stats JSON path (stdout when omitted)");

    EvalArgs eval_args;
    auto* eval_cmd = app.add_subcommand(
        "eval", "Measure per-language fertility of a trained tokenizer");
    eval_cmd->add_option("--model", eval_args.model_file, "Model JSON path")->required();
    eval_cmd->add_option("--corpus", eval_args.corpus_dir, "Evaluation corpus root")
        ->required();
    eval_cmd->add_option("--budget-chars", eval_args.budget_chars,
                         "Per-language evaluation characters (0 = whole corpus)");
    eval_cmd->add_option("--seed", eval_args.seed, "Sampling seed");
    eval_cmd->add_option("--parity-ref", eval_args.parity_ref,
                         "Reference language for a parity column");
    eval_cmd->add_option("--threads", eval_args.threads,
                         "Worker threads (ADAPTMIX_THREADS, then hardware, when 0)");
    eval_cmd->add_option("--csv", eval_args.csv_file, "Report CSV path");
    eval_cmd->add_option("--json", eval_args.json_file, "Report JSON path");

    OptimizeArgs optimize_args;
    auto* optimize_cmd = app.add_subcommand(
        "optimize", "Iteratively re-weight the training mixture by fertility");
    optimize_cmd->add_option("--corpus", optimize_args.corpus_dir, "Corpus root directory")
        ->required();
    optimize_cmd->add_option("--eval-corpus", optimize_args.eval_corpus_dir,
                             "Held-out evaluation corpus (training corpus when omitted)");
    optimize_cmd->add_option("--eval-budget", optimize_args.eval_budget,
                             "Per-language evaluation characters (0 = whole corpus)");
    optimize_cmd->add_option("--config", optimize_args.config_file,
                             "Optimizer config JSON")
        ->required();
    optimize_cmd->add_option("--f-best-mode", optimize_args.f_best_mode_override,
                             "Override the config's target mode: fixed or dynamic-min");
    optimize_cmd->add_option("--vocab-size", optimize_args.vocab_size,
                             "Vocabulary size for each iteration's tokenizer")
        ->default_val(4096);
    optimize_args.pretok.attach(optimize_cmd);
    optimize_cmd->add_option("--min-frequency", optimize_args.min_frequency,
                             "Lowest pair count that may merge")
        ->default_val(2);
    optimize_cmd->add_option("--threads", optimize_args.threads,
                             "Worker threads (ADAPTMIX_THREADS, then hardware, when 0)");
    optimize_cmd->add_option("--out", optimize_args.out_file, "Trajectory JSON path")
        ->required();
    optimize_cmd->add_option("--keep-models", optimize_args.keep_models_dir,
                             "Directory receiving each iteration's model");
    optimize_cmd->add_option("--emit-plot-data", optimize_args.plot_file,
                             "Long-format CSV path: iteration,language,fertility,proportion");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;  // flag misuse
    }

    try {
        if (*ingest_cmd) return cmd_ingest_stats(ingest_args, argv_copy);
        if (*train_cmd) return cmd_train(train_args, argv_copy);
        if (*eval_cmd) return cmd_eval(eval_args, argv_copy);
        if (*optimize_cmd) return cmd_optimize(optimize_args, argv_copy);
    } catch (const std::exception& e) {
        std::cerr << "adaptmix: error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
