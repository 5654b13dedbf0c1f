// Copyright (C) 2026 The ICU Authors
// SPDX-License-Identifier: Apache-2.0

#include "icu/evaluator.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

namespace icu {

double accuracy(std::span<const LabeledItem> predictions, std::span<const LabeledItem> golds) {
    if (predictions.size() != golds.size()) {
        fail(ErrorCode::LengthMismatch, std::to_string(predictions.size()) + " predictions vs " +
                                            std::to_string(golds.size()) + " gold items");
    }
    if (golds.empty()) {
        fail(ErrorCode::PreconditionViolation, "accuracy of an empty evaluation set is undefined");
    }
    std::size_t correct = 0;
    for (std::size_t i = 0; i < golds.size(); ++i) {
        if (predictions[i].example_id != golds[i].example_id) {
            fail(ErrorCode::IdMismatch, "position " + std::to_string(i) + ": prediction '" +
                                            predictions[i].example_id + "' vs gold '" + golds[i].example_id + "'");
        }
        if (predictions[i].verdict == golds[i].verdict) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(golds.size());
}

double macro_average(const std::map<LanguageCode, double>& per_language) {
    if (per_language.empty()) fail(ErrorCode::EmptyMap, "macro average over no languages");
    double sum = 0.0;
    for (const auto& [lang, acc] : per_language) sum += acc;
    return sum / static_cast<double>(per_language.size());
}

std::map<LanguageCode, double> score_predictions(std::span<const PredictionRecord> predictions,
                                                 std::span<const TaskExample> golds) {
    std::unordered_map<std::string, const PredictionRecord*> by_id;
    std::map<LanguageCode, std::size_t> predicted_per_language;
    for (const auto& p : predictions) {
        if (!by_id.emplace(p.example_id, &p).second) {
            fail(ErrorCode::IdMismatch, "duplicate prediction for '" + p.example_id + "'");
        }
        ++predicted_per_language[p.language];
    }

    std::map<LanguageCode, std::pair<std::vector<LabeledItem>, std::vector<LabeledItem>>> grouped;
    for (const auto& g : golds) {
        auto it = by_id.find(g.example_id);
        if (it == by_id.end()) fail(ErrorCode::IdMismatch, "no prediction for gold example '" + g.example_id + "'");
        const PredictionRecord& p = *it->second;
        if (p.language != g.language) {
            fail(ErrorCode::IdMismatch, "prediction '" + p.example_id + "' is " + std::string(p.language.str()) +
                                            ", gold is " + std::string(g.language.str()));
        }
        auto& [preds, gold_items] = grouped[g.language];
        preds.push_back({p.example_id, p.predicted});
        gold_items.push_back({g.example_id, g.gold});
    }

    std::map<LanguageCode, double> out;
    for (const auto& [lang, items] : grouped) {
        if (predicted_per_language[lang] != items.second.size()) {
            fail(ErrorCode::LengthMismatch, std::string(lang.str()) + ": " +
                                                std::to_string(predicted_per_language[lang]) + " predictions vs " +
                                                std::to_string(items.second.size()) + " gold examples");
        }
        out.emplace(lang, accuracy(items.first, items.second));
    }
    for (const auto& [lang, count] : predicted_per_language) {
        if (!grouped.count(lang)) {
            fail(ErrorCode::LengthMismatch, std::string(lang.str()) + ": " + std::to_string(count) +
                                                " predictions without gold examples");
        }
    }
    return out;
}

EvalReport make_report(Task task, std::map<LanguageCode, double> per_language, std::optional<FrameId> frame,
                       std::optional<int> shots, nlohmann::json metadata) {
    EvalReport r;
    r.task = task;
    r.macro_avg = macro_average(per_language);
    r.per_language = std::move(per_language);
    r.frame = frame;
    r.shots = shots;
    r.metadata = std::move(metadata);
    return r;
}

EvalReport evaluate(Task task, const PerLanguageExamples& tests, const CaptionSource& captions, NLIBackend& nli,
                    std::optional<FrameId> frame, const EvalOptions& options,
                    std::vector<PredictionRecord>* predictions_out) {
    std::map<LanguageCode, double> per_language;
    for (const auto& [lang, examples] : tests) {
        for (const auto& ex : examples) {
            if (ex.task != task) {
                fail(ErrorCode::PreconditionViolation, "example '" + ex.example_id + "' belongs to another task");
            }
        }
        auto preds = predict_all(examples, captions, nli, frame, options.marvl, options.workers);
        const auto scored = score_predictions(preds, examples);
        per_language.emplace(lang, scored.at(lang));
        if (predictions_out) {
            predictions_out->insert(predictions_out->end(), preds.begin(), preds.end());
        }
    }
    return make_report(task, std::move(per_language), frame, std::nullopt);
}

std::string_view to_string(SweepAxis axis) { return axis == SweepAxis::Shots ? "shots" : "frame"; }

void SweepResult::validate() const {
    std::set<int> seen;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const int v = points[i].value;
        if (axis == SweepAxis::Shots) {
            if (v < 0 || (i > 0 && v <= points[i - 1].value)) {
                fail(ErrorCode::PreconditionViolation, "shot axis must be non-negative and strictly increasing");
            }
        } else {
            static_cast<void>(FrameId{v});
            if (!seen.insert(v).second) {
                fail(ErrorCode::PreconditionViolation, "frame " + std::to_string(v) + " repeated in sweep");
            }
        }
        if (i > 0) {
            const auto& a = points[0].per_language;
            const auto& b = points[i].per_language;
            const bool same = a.size() == b.size() &&
                              std::equal(a.begin(), a.end(), b.begin(),
                                         [](const auto& x, const auto& y) { return x.first == y.first; });
            if (!same) fail(ErrorCode::PreconditionViolation, "sweep points cover different languages");
        }
    }
}

SweepResult sweep_frames(const PerLanguageExamples& tests, const CaptionSource& captions, std::span<const FrameId> frames,
                         NLIBackend& nli, const EvalOptions& options) {
    SweepResult result;
    result.axis = SweepAxis::Frames;
    for (FrameId frame : frames) {
        const EvalReport r = evaluate(Task::MARVL, tests, captions, nli, frame, options);
        result.points.push_back(SweepPoint{frame.value(), r.per_language, r.macro_avg});
    }
    result.validate();
    return result;
}

BestFrames best_frame(const SweepResult& sweep) {
    if (sweep.points.empty()) fail(ErrorCode::EmptySweep, "best_frame over an empty sweep");
    if (sweep.axis != SweepAxis::Frames) {
        fail(ErrorCode::PreconditionViolation, "best_frame needs a frame sweep");
    }
    // Points are visited in ascending frame order so strict '>' keeps the lowest id on ties.
    std::vector<const SweepPoint*> ordered;
    for (const auto& p : sweep.points) ordered.push_back(&p);
    std::sort(ordered.begin(), ordered.end(), [](const auto* a, const auto* b) { return a->value < b->value; });

    BestFrames best;
    const SweepPoint* overall = ordered.front();
    std::map<LanguageCode, const SweepPoint*> per_language;
    for (const SweepPoint* p : ordered) {
        if (p->macro_avg > overall->macro_avg) overall = p;
        for (const auto& [lang, acc] : p->per_language) {
            auto [it, inserted] = per_language.emplace(lang, p);
            if (!inserted && acc > it->second->per_language.at(lang)) it->second = p;
        }
    }
    best.overall = FrameId(overall->value);
    for (const auto& [lang, p] : per_language) best.per_language.emplace(lang, FrameId(p->value));
    return best;
}

EvalReport best_frame_report(const SweepResult& sweep, nlohmann::json metadata) {
    const BestFrames best = best_frame(sweep);
    std::map<LanguageCode, double> per_language;
    nlohmann::json chosen = nlohmann::json::object();
    for (const auto& [lang, frame] : best.per_language) {
        for (const auto& p : sweep.points) {
            if (p.value == frame.value()) per_language.emplace(lang, p.per_language.at(lang));
        }
        chosen[std::string(lang.str())] = frame.value();
    }
    metadata["best_frames"] = chosen;
    metadata["best_frame_overall"] = best.overall.value();
    return make_report(Task::MARVL, std::move(per_language), std::nullopt, std::nullopt, std::move(metadata));
}

SweepResult sweep_shots(std::span<const int> shot_list, const std::map<LanguageCode, FewShotSplit>& splits,
                        const PerLanguageExamples& tests, const std::shared_ptr<NLIBackend>& base,
                        const CaptionSource& captions, const FewShotConfig& config, const EvalOptions& options,
                        std::vector<FewShotRun>* runs) {
    for (std::size_t i = 0; i < shot_list.size(); ++i) {
        if (shot_list[i] < 0 || (i > 0 && shot_list[i] <= shot_list[i - 1])) {
            fail(ErrorCode::UsageError, "shot list must be non-negative and strictly increasing");
        }
    }
    for (const auto& [lang, examples] : tests) {
        auto it = splits.find(lang);
        if (it == splits.end()) {
            fail(ErrorCode::NotEnoughShots, "no few-shot split for " + std::string(lang.str()));
        }
        if (!shot_list.empty() && static_cast<std::size_t>(shot_list.back()) > it->second.shot_images.size()) {
            fail(ErrorCode::NotEnoughShots, std::string(lang.str()) + " has " +
                                                std::to_string(it->second.shot_images.size()) + " shots, sweep needs " +
                                                std::to_string(shot_list.back()));
        }
    }

    SweepResult result;
    result.axis = SweepAxis::Shots;
    for (int n : shot_list) {
        std::map<LanguageCode, double> per_language;
        for (const auto& [lang, examples] : tests) {
            auto outcome = run_fewshot(lang, static_cast<std::size_t>(n), splits.at(lang), base, captions, config);
            const PerLanguageExamples single{{lang, examples}};
            const EvalReport r = evaluate(Task::XVNLI, single, captions, *outcome.nli, std::nullopt, options);
            per_language.emplace(lang, r.per_language.at(lang));
            if (runs) runs->push_back(outcome.run);
        }
        const double avg = macro_average(per_language);
        result.points.push_back(SweepPoint{n, std::move(per_language), avg});
    }
    result.validate();
    return result;
}

ReportFormat parse_report_format(std::string_view text) {
    if (text == "json") return ReportFormat::Json;
    if (text == "csv") return ReportFormat::Csv;
    fail(ErrorCode::UsageError, "unknown report format '" + std::string(text) + "'");
}

nlohmann::json to_json(const SweepResult& sweep) {
    nlohmann::json points = nlohmann::json::array();
    for (const auto& p : sweep.points) {
        nlohmann::json per_language = nlohmann::json::object();
        for (const auto& [lang, acc] : p.per_language) per_language[std::string(lang.str())] = acc;
        points.push_back({{"value", p.value}, {"per_language", per_language}, {"macro_avg", p.macro_avg}});
    }
    return {{"axis", to_string(sweep.axis)}, {"points", points}, {"metadata", sweep.metadata}};
}

std::string render_report(const EvalReport& report, ReportFormat format) {
    if (format == ReportFormat::Json) return nlohmann::json(report).dump(2) + "\n";
    std::ostringstream out;
    out << "task,frame,shots";
    for (const auto& [lang, acc] : report.per_language) out << ',' << lang.str();
    out << ",avg\n" << to_string(report.task) << ',';
    if (report.frame) out << report.frame->value();
    out << ',';
    if (report.shots) out << *report.shots;
    for (const auto& [lang, acc] : report.per_language) out << ',' << format_double(acc);
    out << ',' << format_double(report.macro_avg) << '\n';
    return out.str();
}

std::string render_report(const SweepResult& sweep, ReportFormat format) {
    sweep.validate();
    if (format == ReportFormat::Json) return to_json(sweep).dump(2) + "\n";
    std::ostringstream out;
    out << to_string(sweep.axis);
    if (!sweep.points.empty()) {
        for (const auto& [lang, acc] : sweep.points.front().per_language) out << ',' << lang.str();
    }
    out << ",avg\n";
    for (const auto& p : sweep.points) {
        out << p.value;
        for (const auto& [lang, acc] : p.per_language) out << ',' << format_double(acc);
        out << ',' << format_double(p.macro_avg) << '\n';
    }
    return out.str();
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::IoFailure, "cannot write " + path.string());
    out << content;
    out.flush();
    if (!out) fail(ErrorCode::IoFailure, "short write to " + path.string());
}

ReferenceRow row(std::string model, std::initializer_list<std::pair<LanguageCode, double>> values, double avg) {
    ReferenceRow r{std::move(model), {}, avg};
    for (const auto& [lang, v] : values) r.percent.emplace(lang, v);
    return r;
}

} // namespace

void emit_report(const EvalReport& report, ReportFormat format, const std::filesystem::path& path) {
    write_file(path, render_report(report, format));
}

void emit_report(const SweepResult& sweep, ReportFormat format, const std::filesystem::path& path) {
    write_file(path, render_report(sweep, format));
}

const std::vector<ReferenceRow>& reference_rows(ReferenceTable table) {
    using L = LanguageCode;
    static const std::vector<ReferenceRow> kXvnliZero{
        row("mUNITER", {{L::ARB, 46.73}, {L::SPA, 56.96}, {L::FRA, 59.36}, {L::RUS, 51.72}}, 53.69),
        row("xUNITER", {{L::ARB, 51.98}, {L::SPA, 58.94}, {L::FRA, 63.32}, {L::RUS, 59.71}}, 58.49),
        row("UC2", {{L::ARB, 56.19}, {L::SPA, 57.47}, {L::FRA, 69.67}, {L::RUS, 64.86}}, 62.05),
        row("M3P", {{L::ARB, 55.24}, {L::SPA, 58.85}, {L::FRA, 56.36}, {L::RUS, 62.54}}, 58.25),
        row("ICU (published)", {{L::ARB, 58.00}, {L::SPA, 61.04}, {L::FRA, 63.21}, {L::RUS, 61.39}}, 60.91),
    };
    static const std::vector<ReferenceRow> kMarvlZero{
        row("mUNITER", {{L::IND, 54.79}, {L::SWA, 51.17}, {L::TAM, 52.66}, {L::TUR, 54.66}, {L::CMN, 55.34}}, 53.72),
        row("xUNITER", {{L::IND, 55.14}, {L::SWA, 55.51}, {L::TAM, 53.06}, {L::TUR, 56.19}, {L::CMN, 53.06}}, 54.59),
        row("UC2", {{L::IND, 56.74}, {L::SWA, 52.62}, {L::TAM, 60.47}, {L::TUR, 56.70}, {L::CMN, 59.88}}, 57.28),
        row("M3P", {{L::IND, 56.47}, {L::SWA, 55.69}, {L::TAM, 56.04}, {L::TUR, 56.78}, {L::CMN, 55.04}}, 56.00),
        row("ICU (published)", {{L::IND, 56.91}, {L::SWA, 55.60}, {L::TAM, 57.89}, {L::TUR, 58.31}, {L::CMN, 56.92}},
            57.13),
    };
    static const std::vector<ReferenceRow> kXvnliMax{
        row("mUNITER", {{L::ARB, 46.91}, {L::SPA, 57.73}, {L::FRA, 59.36}, {L::RUS, 51.80}}, 53.95),
        row("xUNITER", {{L::ARB, 54.04}, {L::SPA, 60.22}, {L::FRA, 64.52}, {L::RUS, 63.40}}, 60.55),
        row("UC2", {{L::ARB, 56.87}, {L::SPA, 62.80}, {L::FRA, 69.76}, {L::RUS, 65.29}}, 63.68),
        row("M3P", {{L::ARB, 56.01}, {L::SPA, 60.40}, {L::FRA, 58.59}, {L::RUS, 62.46}}, 59.37),
        row("ICU (published)", {{L::ARB, 60.70}, {L::SPA, 64.61}, {L::FRA, 62.61}, {L::RUS, 65.57}}, 63.37),
    };
    switch (table) {
    case ReferenceTable::XvnliZeroShot: return kXvnliZero;
    case ReferenceTable::MarvlZeroShot: return kMarvlZero;
    case ReferenceTable::XvnliMaxShot: return kXvnliMax;
    }
    return kXvnliZero;
}

std::string render_comparison(ReferenceTable table, std::span<const EvalReport> runs) {
    const auto& rows = reference_rows(table);
    std::vector<LanguageCode> langs;
    for (const auto& [lang, v] : rows.front().percent) langs.push_back(lang);

    auto cell = [](double percent) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", percent);
        return std::string(buf);
    };

    std::ostringstream out;
    out << "| Model |";
    for (auto l : langs) out << ' ' << l.str() << " |";
    out << " avg |\n|---|";
    for (std::size_t i = 0; i < langs.size(); ++i) out << "---|";
    out << "---|\n";
    for (const auto& r : rows) {
        out << "| " << r.model << " |";
        for (auto l : langs) out << ' ' << cell(r.percent.at(l)) << " |";
        out << ' ' << cell(r.avg_percent) << " |\n";
    }
    for (std::size_t i = 0; i < runs.size(); ++i) {
        out << "| this run" << (runs.size() > 1 ? " #" + std::to_string(i + 1) : std::string{}) << " |";
        for (auto l : langs) {
            auto it = runs[i].per_language.find(l);
            out << ' ' << (it == runs[i].per_language.end() ? std::string("-") : format_percent(it->second)) << " |";
        }
        out << ' ' << format_percent(runs[i].macro_avg) << " |\n";
    }
    return out.str();
}

} // namespace icu
