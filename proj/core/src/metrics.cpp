#include "adaptmix/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "adaptmix/errors.hpp"

namespace adaptmix {
namespace {

std::string format_double(double v) {
    std::ostringstream out;
    out << std::setprecision(10) << v;
    return out.str();
}

int resolve_threads(int requested) {
    if (requested > 0) return std::min(requested, 64);
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(std::min(hw, 16u));
}

}  // namespace

void FertilityReport::derive() {
    f_min = 0.0;
    f_max = 0.0;
    f_range = 0.0;
    average = 0.0;
    if (fertility.empty()) return;
    double sum = 0.0;
    bool first = true;
    for (const auto& [lang, f] : fertility) {
        if (first) {
            f_min = f_max = f;
            first = false;
        } else {
            f_min = std::min(f_min, f);
            f_max = std::max(f_max, f);
        }
        sum += f;
    }
    f_range = f_max - f_min;
    average = sum / static_cast<double>(fertility.size());
}

double fertility(const TokenizerModel& model, const SampledCorpus& eval_corpus) {
    std::uint64_t tokens = 0;
    std::uint64_t words = 0;
    for (const auto& doc : eval_corpus.documents) {
        for (const auto& seg : encode_segments(model, doc)) {
            if (seg.kind == SegmentKind::Whitespace || seg.kind == SegmentKind::Newline) {
                continue;  // separator tokens are not part of any word
            }
            tokens += seg.ids.size();
        }
        words += count_words(doc);
    }
    if (words == 0) {
        throw Error("eval corpus for language '" + eval_corpus.language +
                    "' contains no words");
    }
    return static_cast<double>(tokens) / static_cast<double>(words);
}

FertilityReport evaluate(const TokenizerModel& model,
                         const std::map<LanguageId, SampledCorpus>& eval_set,
                         int threads) {
    if (eval_set.empty()) {
        throw Error("evaluation set is empty");
    }
    std::vector<const SampledCorpus*> corpora;
    std::vector<LanguageId> langs;
    for (const auto& [lang, corpus] : eval_set) {
        langs.push_back(lang);
        corpora.push_back(&corpus);
    }

    std::vector<double> values(langs.size(), 0.0);
    std::vector<std::string> failures(langs.size());
    int workers = std::min<int>(resolve_threads(threads),
                                static_cast<int>(langs.size()));
    if (workers <= 1) {
        for (std::size_t i = 0; i < langs.size(); ++i) {
            values[i] = fertility(model, *corpora[i]);
        }
    } else {
        std::vector<std::thread> pool;
        std::size_t chunk = (langs.size() + workers - 1) / workers;
        for (int t = 0; t < workers; ++t) {
            std::size_t begin = t * chunk;
            std::size_t end = std::min(langs.size(), begin + chunk);
            if (begin >= end) break;
            pool.emplace_back([&, begin, end] {
                for (std::size_t i = begin; i < end; ++i) {
                    try {
                        values[i] = fertility(model, *corpora[i]);
                    } catch (const std::exception& e) {
                        failures[i] = e.what();
                    }
                }
            });
        }
        for (auto& t : pool) t.join();
        for (const auto& f : failures) {
            if (!f.empty()) throw Error(f);
        }
    }

    FertilityReport report;
    for (std::size_t i = 0; i < langs.size(); ++i) {
        report.fertility[langs[i]] = values[i];
    }
    report.derive();
    return report;
}

ParityReport parity(const FertilityReport& report, const LanguageId& reference) {
    auto it = report.fertility.find(reference);
    if (it == report.fertility.end()) {
        throw UnknownLanguageError(reference);
    }
    double f_ref = it->second;
    if (!(f_ref > 0.0)) {
        throw Error("reference language '" + reference + "' has non-positive fertility");
    }
    ParityReport out;
    out.reference = reference;
    for (const auto& [lang, f] : report.fertility) {
        out.parity[lang] = f / f_ref;
    }
    return out;
}

std::string report_to_csv(const FertilityReport& report,
                          const ParityReport* parity_report) {
    std::ostringstream out;
    out << "language,fertility";
    if (parity_report) out << ",parity";
    out << "\n";
    double parity_sum = 0.0;
    for (const auto& [lang, f] : report.fertility) {
        out << lang << "," << format_double(f);
        if (parity_report) {
            double p = parity_report->parity.at(lang);
            parity_sum += p;
            out << "," << format_double(p);
        }
        out << "\n";
    }
    out << "average," << format_double(report.average);
    if (parity_report && !report.fertility.empty()) {
        out << "," << format_double(parity_sum / static_cast<double>(report.fertility.size()));
    }
    out << "\n";
    return std::move(out).str();
}

std::string report_to_json(const FertilityReport& report,
                           const ParityReport* parity_report) {
    nlohmann::ordered_json doc;
    doc["iteration"] = report.iteration;
    nlohmann::ordered_json fert = nlohmann::ordered_json::object();
    for (const auto& [lang, f] : report.fertility) fert[lang] = f;
    doc["fertility"] = std::move(fert);
    doc["f_min"] = report.f_min;
    doc["f_max"] = report.f_max;
    doc["f_range"] = report.f_range;
    doc["average"] = report.average;
    if (parity_report) {
        nlohmann::ordered_json par;
        par["reference"] = parity_report->reference;
        nlohmann::ordered_json values = nlohmann::ordered_json::object();
        for (const auto& [lang, p] : parity_report->parity) values[lang] = p;
        par["values"] = std::move(values);
        doc["parity"] = std::move(par);
    }
    return doc.dump(2) + "\n";
}

FertilityReport report_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("fertility report JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("fertility") || !doc["fertility"].is_object()) {
        throw ParseError("fertility report JSON: missing 'fertility' object");
    }
    FertilityReport report;
    if (doc.contains("iteration")) {
        report.iteration = doc["iteration"].get<std::uint64_t>();
    }
    for (const auto& [lang, f] : doc["fertility"].items()) {
        if (!f.is_number()) {
            throw ParseError("fertility report JSON: fertility of '" + lang +
                             "' must be a number");
        }
        report.fertility[lang] = f.get<double>();
    }
    report.derive();
    return report;
}

FertilityReport report_from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line.rfind("language,fertility", 0) != 0) {
        throw ParseError("fertility report CSV: missing 'language,fertility' header");
    }
    FertilityReport report;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::size_t comma = line.find(',');
        if (comma == std::string::npos) {
            throw ParseError("fertility report CSV: malformed row '" + line + "'");
        }
        std::string lang = line.substr(0, comma);
        std::string rest = line.substr(comma + 1);
        std::size_t next = rest.find(',');
        if (next != std::string::npos) rest = rest.substr(0, next);
        if (lang == "average") continue;  // derived, recomputed below
        try {
            report.fertility[lang] = std::stod(rest);
        } catch (const std::exception&) {
            throw ParseError("fertility report CSV: bad number in row '" + line + "'");
        }
    }
    report.derive();
    return report;
}

}  // namespace adaptmix
