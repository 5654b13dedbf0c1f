// Copyright (C) 2026 The ICU Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <utility>

#include <nlohmann/json.hpp>

#include "icu/types.hpp"

namespace icu {

/// Whether a backend accepts concurrent calls. Single-threaded backends are
/// serialized by the base class.
enum class Concurrency { ThreadSafe, SingleThreaded };

/// English image captioner (first pipeline stage).
///
/// Implementations must be deterministic: the same image and DecodingConfig
/// always yield the same text. Sampling-based decoding is not supported.
class CaptionerBackend {
public:
    virtual ~CaptionerBackend() = default;

    virtual std::string backend_id() const = 0;
    virtual Concurrency concurrency() const { return Concurrency::ThreadSafe; }

    /// Captions one image. Throws ImageUnreadable or BackendFailure; an empty
    /// caption from the implementation is reported as BackendFailure.
    Caption generate(const ImageRef& image, const DecodingConfig& config);

    /// Number of generate() calls that reached the implementation.
    std::uint64_t invocation_count() const { return invocations_.load(); }

protected:
    virtual std::string caption_text(const ImageRef& image, const DecodingConfig& config) = 0;

private:
    std::atomic<std::uint64_t> invocations_{0};
    std::mutex serial_;
};

struct TrainingTriple {
    std::string premise;
    std::string hypothesis;
    NLILabel label = NLILabel::Entailment;

    friend bool operator==(const TrainingTriple&, const TrainingTriple&) = default;
};

/// Cross-lingual NLI scorer (second pipeline stage).
class NLIBackend {
public:
    virtual ~NLIBackend() = default;

    virtual std::string backend_id() const = 0;
    virtual bool tunable() const = 0;
    virtual Concurrency concurrency() const { return Concurrency::ThreadSafe; }

    /// Scores (premise, hypothesis). Both must be non-empty after trimming
    /// (EmptyInput). The result is checked for normalization; a malformed
    /// distribution from the implementation becomes BackendFailure.
    NLIDistribution score(std::string_view premise, std::string_view hypothesis);

    /// Returns a tuned copy; this backend is left untouched. Requires tunable()
    /// (NotTunable), a non-empty example set and a valid config.
    std::shared_ptr<NLIBackend> fine_tune(std::span<const TrainingTriple> examples, const FewShotConfig& config);

    std::uint64_t score_count() const { return scores_.load(); }

protected:
    virtual NLIDistribution score_pair(const std::string& premise, const std::string& hypothesis) = 0;
    virtual std::shared_ptr<NLIBackend> tune(std::span<const TrainingTriple> examples, const FewShotConfig& config) = 0;

private:
    std::atomic<std::uint64_t> scores_{0};
    std::mutex serial_;
};

class StubCaptioner final : public CaptionerBackend {
public:
    static constexpr std::string_view kId = "stub-captioner";

    explicit StubCaptioner(std::map<std::string, std::string> fixtures = {});

    /// Reads a JSON object mapping image_id -> caption text.
    static std::map<std::string, std::string> load_fixtures(const std::filesystem::path& path);

    std::string backend_id() const override { return std::string(kId); }

protected:
    std::string caption_text(const ImageRef& image, const DecodingConfig& config) override;

private:
    std::map<std::string, std::string> fixtures_;
};

/// Records how a trainable stub consumed its training data.
struct TrainingLog {
    int batch_size = 0;
    double learning_rate = 0.0;
    int epochs = 0;
    std::int64_t seed = 0;
    std::size_t examples = 0;
    std::size_t steps = 0;  // optimizer steps: epochs * ceil(examples / batch_size)
};

/// Fixture-table NLI scorer. Hits are returned verbatim, misses get the uniform
/// distribution. When tunable, fine_tune memorizes its training pairs: each
/// pair's distribution becomes the learning-rate-weighted label frequency seen
/// over all epochs.
class StubNLI final : public NLIBackend {
public:
    static constexpr std::string_view kId = "stub-nli";

    using PairKey = std::pair<std::string, std::string>;
    using FixtureTable = std::map<PairKey, NLIDistribution>;

    explicit StubNLI(FixtureTable fixtures = {}, bool tunable = true, std::string id = std::string(kId));

    /// JSON: {"backend_id": ..., "tunable": ..., "entries": [{premise, hypothesis, scores}]}.
    /// "backend_id" and "tunable" are optional.
    static StubNLI load(const std::filesystem::path& path);
    static StubNLI from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
    void save(const std::filesystem::path& path) const;

    std::string backend_id() const override { return id_; }
    bool tunable() const override { return tunable_; }

    const FixtureTable& fixtures() const { return fixtures_; }
    const TrainingLog& training_log() const { return log_; }

protected:
    NLIDistribution score_pair(const std::string& premise, const std::string& hypothesis) override;
    std::shared_ptr<NLIBackend> tune(std::span<const TrainingTriple> examples, const FewShotConfig& config) override;

private:
    FixtureTable fixtures_;
    bool tunable_;
    std::string id_;
    TrainingLog log_;
};

/// Adapter settings from the namespaced [adapter.<name>] config section.
using AdapterSettings = std::map<std::string, std::string>;

/// Builds a captioner by configured name: "stub-captioner" or "http-captioner".
std::unique_ptr<CaptionerBackend> make_captioner(std::string_view name, const AdapterSettings& settings);

/// Builds an NLI scorer by configured name: "stub-nli" or "http-nli".
std::shared_ptr<NLIBackend> make_nli(std::string_view name, const AdapterSettings& settings);

/// Trims ASCII whitespace from both ends.
std::string_view trim(std::string_view text);

} // namespace icu
