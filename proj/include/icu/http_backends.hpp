// Copyright (C) 2026 The ICU Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Adapters for real checkpoints served by an external model server.
//
// Wire protocol (JSON over HTTP POST, UTF-8):
//   /caption    {image_uri, image_id, dataset_id, checkpoint, device,
//                beam_size, ngram_diversity_window, max_length}
//               -> {text}
//   /score      {model, device, premise, hypothesis}
//               -> {scores: [entailment, neutral, contradiction]}
//   /fine_tune  {model, device, examples: [{premise, hypothesis, label}],
//                batch_size, learning_rate, epochs, seed}
//               -> {model, resolved?: {...}}
// Failures are non-2xx responses with {error, message}; error
// "image_unreadable" maps to ImageUnreadable, anything else to
// BackendFailure (or TrainingFailure on /fine_tune).

#include <chrono>
#include <string>

#include "icu/backends.hpp"

namespace icu {

inline constexpr std::string_view kDefaultCaptionCheckpoint = "OFA-Sys/ofa-large-caption";
inline constexpr std::string_view kDefaultNliCheckpoint = "MoritzLaurer/mDeBERTa-v3-base-mnli-xnli";

struct HttpSettings {
    std::string endpoint;  // e.g. http://127.0.0.1:8765
    std::string checkpoint;
    std::string device = "cpu";
    std::chrono::seconds timeout{600};

    /// Reads endpoint (required), checkpoint, device and timeout_s.
    static HttpSettings from(const AdapterSettings& settings, std::string_view default_checkpoint);
};

class HttpCaptioner final : public CaptionerBackend {
public:
    static constexpr std::string_view kName = "http-captioner";

    explicit HttpCaptioner(HttpSettings settings);

    std::string backend_id() const override;

protected:
    std::string caption_text(const ImageRef& image, const DecodingConfig& config) override;

private:
    HttpSettings settings_;
};

class HttpNLI final : public NLIBackend {
public:
    static constexpr std::string_view kName = "http-nli";

    explicit HttpNLI(HttpSettings settings, bool tunable = true);

    std::string backend_id() const override;
    bool tunable() const override { return tunable_; }

    /// Hyperparameters the server reported for the last fine-tune that produced this backend.
    const nlohmann::json& resolved_training_settings() const { return resolved_; }

protected:
    NLIDistribution score_pair(const std::string& premise, const std::string& hypothesis) override;
    std::shared_ptr<NLIBackend> tune(std::span<const TrainingTriple> examples, const FewShotConfig& config) override;

private:
    HttpSettings settings_;
    bool tunable_;
    nlohmann::json resolved_ = nlohmann::json::object();
};

} // namespace icu
