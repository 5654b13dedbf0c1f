// Copyright (C) 2026 The ICU Authors
// SPDX-License-Identifier: Apache-2.0

#include "icu/task_adapters.hpp"

#include <atomic>
#include <exception>
#include <thread>

#include "icu/frame_engine.hpp"

namespace icu {

namespace {

void require_same_image(const Caption& caption, const ImageRef& image, std::string_view example_id) {
    if (caption.image.dataset_id != image.dataset_id || caption.image.image_id != image.image_id) {
        fail(ErrorCode::PreconditionViolation,
             "caption for image '" + caption.image.image_id + "' does not belong to example '" +
                 std::string(example_id) + "' (expects '" + image.image_id + "')");
    }
}

} // namespace

std::string_view to_string(MarvlMapping mapping) {
    switch (mapping) {
    case MarvlMapping::EntailVsContradiction: return "entail-vs-contradiction";
    case MarvlMapping::EntailmentArgmax: return "entailment-argmax";
    case MarvlMapping::EntailVsRest: return "entail-vs-rest";
    }
    return "?";
}

MarvlMapping parse_marvl_mapping(std::string_view text) {
    for (auto m : {MarvlMapping::EntailVsContradiction, MarvlMapping::EntailmentArgmax, MarvlMapping::EntailVsRest}) {
        if (text == to_string(m)) return m;
    }
    fail(ErrorCode::InvalidConfig, "unknown MaRVL mapping '" + std::string(text) + "'");
}

bool marvl_verdict(const NLIDistribution& d, MarvlMapping mapping) {
    const double e = d[NLILabel::Entailment];
    const double n = d[NLILabel::Neutral];
    const double c = d[NLILabel::Contradiction];
    switch (mapping) {
    case MarvlMapping::EntailVsContradiction: return e > c;
    case MarvlMapping::EntailmentArgmax: return e > n && e > c;
    case MarvlMapping::EntailVsRest: return e > n + c;
    }
    return false;
}

XVNLIPrediction predict_xvnli(const TaskExample& example, const Caption& caption, NLIBackend& nli) {
    example.validate();
    if (example.task != Task::XVNLI) {
        fail(ErrorCode::PreconditionViolation, "predict_xvnli given a non-XVNLI example '" + example.example_id + "'");
    }
    require_same_image(caption, example.images[0], example.example_id);
    NLIDistribution d = nli.score(caption.text, example.hypothesis_text);
    return XVNLIPrediction{example.example_id, d.argmax(), d, caption.text};
}

MaRVLPrediction predict_marvl(const TaskExample& example, const Caption& left, const Caption& right, FrameId frame,
                              NLIBackend& nli, const MarvlOptions& options) {
    example.validate();
    if (example.task != Task::MARVL) {
        fail(ErrorCode::PreconditionViolation, "predict_marvl given a non-MaRVL example '" + example.example_id + "'");
    }
    require_same_image(left, example.images[0], example.example_id);
    require_same_image(right, example.images[1], example.example_id);
    const std::string premise = options.normalize_captions
                                    ? render(frame, normalize_caption(left.text), normalize_caption(right.text))
                                    : render(frame, left.text, right.text);
    NLIDistribution d = nli.score(premise, example.hypothesis_text);
    return MaRVLPrediction{example.example_id, marvl_verdict(d, options.mapping), d, premise, frame};
}

PredictionRecord to_record(const TaskExample& example, const XVNLIPrediction& p) {
    return PredictionRecord{p.example_id, Task::XVNLI, example.language, p.predicted, p.distribution, p.premise_used,
                            std::nullopt};
}

PredictionRecord to_record(const TaskExample& example, const MaRVLPrediction& p) {
    return PredictionRecord{p.example_id, Task::MARVL, example.language, p.predicted, p.distribution, p.premise_used,
                            p.frame};
}

nlohmann::json to_json(const PredictionRecord& r) {
    nlohmann::json j = {{"example_id", r.example_id},
                        {"task", r.task},
                        {"language", r.language},
                        {"predicted", verdict_to_json(r.predicted)},
                        {"distribution", r.distribution},
                        {"premise_used", r.premise_used}};
    if (r.frame) j["frame"] = r.frame->value();
    return j;
}

PredictionRecord prediction_from_json(const nlohmann::json& j) {
    PredictionRecord r;
    r.example_id = j.at("example_id").get<std::string>();
    r.task = j.at("task").get<Task>();
    r.language = j.at("language").get<LanguageCode>();
    const auto& p = j.at("predicted");
    if (r.task == Task::MARVL) {
        if (!p.is_boolean()) fail(ErrorCode::LabelDomainError, "MaRVL prediction must be boolean");
        r.predicted = p.get<bool>();
    } else {
        r.predicted = parse_label(p.get<std::string>());
    }
    r.distribution = distribution_from_json(j.at("distribution"));
    r.premise_used = j.value("premise_used", std::string{});
    if (j.contains("frame") && !j["frame"].is_null()) r.frame = FrameId(j["frame"].get<int>());
    return r;
}

std::vector<PredictionRecord> predict_all(std::span<const TaskExample> examples, const CaptionSource& captions,
                                          NLIBackend& nli, std::optional<FrameId> frame, const MarvlOptions& options,
                                          int workers) {
    auto predict_one = [&](const TaskExample& ex) -> PredictionRecord {
        ex.validate();
        if (ex.task == Task::XVNLI) {
            return to_record(ex, predict_xvnli(ex, captions.caption_for(ex.images[0]), nli));
        }
        if (!frame) fail(ErrorCode::UsageError, "MaRVL prediction needs a frame");
        const Caption left = captions.caption_for(ex.images[0]);
        const Caption right = captions.caption_for(ex.images[1]);
        return to_record(ex, predict_marvl(ex, left, right, *frame, nli, options));
    };

    std::vector<std::optional<PredictionRecord>> slots(examples.size());
    const std::size_t n_workers = std::max<std::size_t>(1, std::min<std::size_t>(workers > 0 ? workers : 1, examples.size()));
    if (n_workers <= 1) {
        for (std::size_t i = 0; i < examples.size(); ++i) slots[i] = predict_one(examples[i]);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr error;
        std::mutex error_mutex;
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < n_workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < examples.size(); i = next++) {
                    try {
                        slots[i] = predict_one(examples[i]);
                    } catch (...) {
                        std::lock_guard lock(error_mutex);
                        if (!error) error = std::current_exception();
                        next = examples.size();
                    }
                }
            });
        }
        pool.clear();
        if (error) std::rethrow_exception(error);
    }

    std::vector<PredictionRecord> out;
    out.reserve(slots.size());
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

} // namespace icu
