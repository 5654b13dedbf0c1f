// Copyright (C) 2026 The ICU Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "icu/caption_store.hpp"
#include "icu/dataset_ingest.hpp"
#include "icu/fewshot_trainer.hpp"
#include "icu/task_adapters.hpp"
#include "icu/types.hpp"

namespace icu {

struct LabeledItem {
    std::string example_id;
    Verdict verdict;
};

/// Fraction of exact verdict matches. Items are aligned position by position;
/// lengths must agree (LengthMismatch) and ids must match pairwise (IdMismatch).
/// Empty input is a PreconditionViolation.
double accuracy(std::span<const LabeledItem> predictions, std::span<const LabeledItem> golds);

/// Unweighted mean over languages. Throws EmptyMap.
double macro_average(const std::map<LanguageCode, double>& per_language);

using PerLanguageExamples = std::map<LanguageCode, std::vector<TaskExample>>;

/// Per-language accuracy of prediction records against gold examples. Every gold
/// example needs a prediction with the same id (IdMismatch) and the counts per
/// language must agree (LengthMismatch).
std::map<LanguageCode, double> score_predictions(std::span<const PredictionRecord> predictions,
                                                 std::span<const TaskExample> golds);

EvalReport make_report(Task task, std::map<LanguageCode, double> per_language, std::optional<FrameId> frame,
                       std::optional<int> shots, nlohmann::json metadata = nlohmann::json::object());

struct EvalOptions {
    MarvlOptions marvl;
    int workers = 1;
};

/// Predicts every language's test set with one NLI backend and scores it.
EvalReport evaluate(Task task, const PerLanguageExamples& tests, const CaptionSource& captions, NLIBackend& nli,
                    std::optional<FrameId> frame, const EvalOptions& options = {},
                    std::vector<PredictionRecord>* predictions_out = nullptr);

enum class SweepAxis { Shots, Frames };

std::string_view to_string(SweepAxis axis);

struct SweepPoint {
    int value = 0;
    std::map<LanguageCode, double> per_language;
    double macro_avg = 0.0;

    friend bool operator==(const SweepPoint&, const SweepPoint&) = default;
};

struct SweepResult {
    SweepAxis axis = SweepAxis::Shots;
    std::vector<SweepPoint> points;
    nlohmann::json metadata = nlohmann::json::object();

    /// Shots strictly increasing; frames unique and within 0..5; every point
    /// covers the same languages.
    void validate() const;
};

/// One point per frame over MaRVL test sets, same NLI backend for all frames.
SweepResult sweep_frames(const PerLanguageExamples& tests, const CaptionSource& captions, std::span<const FrameId> frames,
                         NLIBackend& nli, const EvalOptions& options = {});

struct BestFrames {
    std::map<LanguageCode, FrameId> per_language;
    FrameId overall{0};
};

/// Argmax accuracy per language and by macro average; ties go to the lower frame id.
BestFrames best_frame(const SweepResult& sweep);

/// Zero-shot MaRVL report that takes each language's accuracy at its best frame.
EvalReport best_frame_report(const SweepResult& sweep, nlohmann::json metadata = nlohmann::json::object());

/// For each shot count: per-language run_fewshot from the pristine base, then
/// evaluation on the fixed test split. The n = 0 point is the zero-shot evaluation.
SweepResult sweep_shots(std::span<const int> shot_list, const std::map<LanguageCode, FewShotSplit>& splits,
                        const PerLanguageExamples& tests, const std::shared_ptr<NLIBackend>& base,
                        const CaptionSource& captions, const FewShotConfig& config, const EvalOptions& options = {},
                        std::vector<FewShotRun>* runs = nullptr);

enum class ReportFormat { Json, Csv };

ReportFormat parse_report_format(std::string_view text);

nlohmann::json to_json(const SweepResult& sweep);

/// Serializations used by emit_report; exposed for byte-level checks.
std::string render_report(const EvalReport& report, ReportFormat format);
std::string render_report(const SweepResult& sweep, ReportFormat format);

/// Writes the rendered report to `path` (IoFailure on error).
void emit_report(const EvalReport& report, ReportFormat format, const std::filesystem::path& path);
void emit_report(const SweepResult& sweep, ReportFormat format, const std::filesystem::path& path);

/// Published accuracy rows (percentages) used as comparison constants.
struct ReferenceRow {
    std::string model;
    std::map<LanguageCode, double> percent;
    double avg_percent = 0.0;
};

enum class ReferenceTable { XvnliZeroShot, MarvlZeroShot, XvnliMaxShot };

const std::vector<ReferenceRow>& reference_rows(ReferenceTable table);

/// Markdown comparison of published rows against the given run reports.
std::string render_comparison(ReferenceTable table, std::span<const EvalReport> runs);

} // namespace icu
