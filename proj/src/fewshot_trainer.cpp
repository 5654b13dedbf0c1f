// Copyright (C) 2026 The ICU Authors
// SPDX-License-Identifier: Apache-2.0

#include "icu/fewshot_trainer.hpp"

namespace icu {

void to_json(nlohmann::json& j, const FewShotRun& run) {
    j = {{"language", run.language},
         {"num_shots", run.num_shots},
         {"config", run.config},
         {"base_nli_id", run.base_nli_id},
         {"tuned_nli_id", run.tuned_nli_id},
         {"training_triples", run.training_triples},
         {"captioner_calls_building", run.captioner_calls_building},
         {"captioner_calls_fine_tune", run.captioner_calls_fine_tune}};
}

std::vector<TrainingTriple> build_training_triples(std::span<const TaskExample> samples, const CaptionSource& captions) {
    std::vector<TrainingTriple> triples;
    triples.reserve(samples.size());
    for (const auto& ex : samples) {
        ex.validate();
        if (ex.task != Task::XVNLI) {
            fail(ErrorCode::PreconditionViolation, "few-shot training takes XVNLI samples only ('" + ex.example_id + "')");
        }
        if (ex.language != samples.front().language) {
            fail(ErrorCode::LanguageMismatch, "few-shot samples mix " + std::string(samples.front().language.str()) +
                                                  " and " + std::string(ex.language.str()));
        }
        const Caption caption = captions.caption_for(ex.images[0]);
        triples.push_back(TrainingTriple{caption.text, ex.hypothesis_text, std::get<NLILabel>(ex.gold)});
    }
    return triples;
}

FewShotOutcome run_fewshot(LanguageCode language, std::size_t num_shots, const FewShotSplit& split,
                           const std::shared_ptr<NLIBackend>& base, const CaptionSource& captions,
                           const FewShotConfig& config) {
    config.validate();
    if (split.language != language) {
        fail(ErrorCode::LanguageMismatch, "few-shot split is " + std::string(split.language.str()) + ", run is " +
                                              std::string(language.str()));
    }

    FewShotRun run;
    run.language = language;
    run.num_shots = num_shots;
    run.config = config;
    run.base_nli_id = base->backend_id();
    run.tuned_nli_id = run.base_nli_id;
    if (num_shots == 0) {
        take_shots(split, 0);
        return {base, run};
    }
    if (!base->tunable()) {
        fail(ErrorCode::NotTunable, base->backend_id() + " is configured read-only");
    }

    const FewShotSplit shots = take_shots(split, num_shots);
    const std::uint64_t before_build = captions.backend.invocation_count();
    const auto triples = build_training_triples(shots.samples, captions);
    const std::uint64_t before_tune = captions.backend.invocation_count();
    run.captioner_calls_building = before_tune - before_build;
    run.training_triples = triples.size();
    if (triples.empty()) {
        fail(ErrorCode::TrainingFailure, std::to_string(num_shots) + " shots yielded no training samples");
    }

    auto tuned = base->fine_tune(triples, config);
    run.captioner_calls_fine_tune = captions.backend.invocation_count() - before_tune;
    run.tuned_nli_id = tuned->backend_id();
    return {std::move(tuned), run};
}

} // namespace icu
