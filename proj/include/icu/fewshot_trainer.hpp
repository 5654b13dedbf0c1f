// Copyright (C) 2026 The ICU Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "icu/backends.hpp"
#include "icu/caption_store.hpp"
#include "icu/dataset_ingest.hpp"

namespace icu {

struct FewShotRun {
    LanguageCode language = LanguageCode::ENG;
    std::size_t num_shots = 0;
    FewShotConfig config;
    std::string base_nli_id;
    std::string tuned_nli_id;
    std::size_t training_triples = 0;
    std::uint64_t captioner_calls_building = 0;
    std::uint64_t captioner_calls_fine_tune = 0;
};

void to_json(nlohmann::json& j, const FewShotRun& run);

/// (caption, hypothesis, gold) per XVNLI sample, in input order. Captions come
/// from the cache; misses are generated once and cached.
std::vector<TrainingTriple> build_training_triples(std::span<const TaskExample> samples, const CaptionSource& captions);

struct FewShotOutcome {
    std::shared_ptr<NLIBackend> nli;
    FewShotRun run;
};

/// Adapts a fresh copy of `base` to one language using the first `num_shots`
/// shots. The captioner is only used while building triples; the base backend
/// is never modified. num_shots == 0 returns `base` itself.
FewShotOutcome run_fewshot(LanguageCode language, std::size_t num_shots, const FewShotSplit& split,
                           const std::shared_ptr<NLIBackend>& base, const CaptionSource& captions,
                           const FewShotConfig& config);

} // namespace icu
