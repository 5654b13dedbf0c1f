// Copyright (C) 2026 The ICU Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "icu/backends.hpp"
#include "icu/caption_store.hpp"
#include "icu/types.hpp"

namespace icu {

/// Reduction of a 3-way NLI distribution to a MaRVL true/false verdict.
enum class MarvlMapping {
    EntailVsContradiction,  // true iff P(e) > P(c); neutral ignored
    EntailmentArgmax,       // true iff entailment is the canonical argmax
    EntailVsRest,           // true iff P(e) > P(n) + P(c)
};

std::string_view to_string(MarvlMapping mapping);
MarvlMapping parse_marvl_mapping(std::string_view text);

/// Exact ties resolve to false under every mapping.
bool marvl_verdict(const NLIDistribution& distribution, MarvlMapping mapping);

struct MarvlOptions {
    MarvlMapping mapping = MarvlMapping::EntailVsContradiction;
    bool normalize_captions = true;
};

struct XVNLIPrediction {
    std::string example_id;
    NLILabel predicted;
    NLIDistribution distribution;
    std::string premise_used;
};

struct MaRVLPrediction {
    std::string example_id;
    bool predicted;
    NLIDistribution distribution;
    std::string premise_used;
    FrameId frame;
};

/// Caption as premise, target-language hypothesis as-is; label is the canonical argmax.
XVNLIPrediction predict_xvnli(const TaskExample& example, const Caption& caption, NLIBackend& nli);

/// Frames the (left, right) captions into one English premise and reduces the
/// NLI output to a verdict.
MaRVLPrediction predict_marvl(const TaskExample& example, const Caption& left, const Caption& right, FrameId frame,
                              NLIBackend& nli, const MarvlOptions& options = {});

/// One line of predictions.jsonl.
struct PredictionRecord {
    std::string example_id;
    Task task = Task::XVNLI;
    LanguageCode language = LanguageCode::ENG;
    Verdict predicted = NLILabel::Entailment;
    NLIDistribution distribution = NLIDistribution::uniform();
    std::string premise_used;
    std::optional<FrameId> frame;
};

PredictionRecord to_record(const TaskExample& example, const XVNLIPrediction& p);
PredictionRecord to_record(const TaskExample& example, const MaRVLPrediction& p);
nlohmann::json to_json(const PredictionRecord& record);
PredictionRecord prediction_from_json(const nlohmann::json& j);

/// Runs the task adapter over every example, fetching captions through `captions`.
/// MaRVL requires `frame`. Output order equals input order for any worker count.
std::vector<PredictionRecord> predict_all(std::span<const TaskExample> examples, const CaptionSource& captions,
                                          NLIBackend& nli, std::optional<FrameId> frame,
                                          const MarvlOptions& options = {}, int workers = 1);

} // namespace icu
