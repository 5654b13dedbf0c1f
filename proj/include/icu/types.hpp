// Copyright (C) 2026 The ICU Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "icu/error.hpp"

namespace icu {

/// Languages handled by the pipeline. Declaration order is the canonical report order.
class LanguageCode {
public:
    enum Value : std::uint8_t { ENG, ARB, SPA, FRA, RUS, IND, SWA, TAM, TUR, CMN };

    static constexpr std::array<Value, 10> all{ENG, ARB, SPA, FRA, RUS, IND, SWA, TAM, TUR, CMN};

    constexpr LanguageCode() : value_(ENG) {}
    constexpr LanguageCode(Value v) : value_(v) {}

    /// Accepts the 3-letter tags case-insensitively; anything else throws InvalidLanguage.
    static LanguageCode parse(std::string_view text);

    constexpr Value value() const { return value_; }
    std::string_view str() const;

    friend constexpr auto operator<=>(LanguageCode, LanguageCode) = default;

private:
    Value value_;
};

enum class Task { XVNLI, MARVL };

std::string_view to_string(Task task);
Task parse_task(std::string_view text);

struct ImageRef {
    std::string dataset_id;
    std::string image_id;
    std::string uri;

    friend bool operator==(const ImageRef&, const ImageRef&) = default;
};

struct DecodingConfig {
    int beam_size = 5;
    int ngram_diversity_window = 3;
    int max_length = 32;

    void validate() const;
    friend bool operator==(const DecodingConfig&, const DecodingConfig&) = default;
};

/// Stable digest of a decoding configuration; independent of serialization field order.
std::string decoding_hash(const DecodingConfig& config);

struct Caption {
    ImageRef image;
    std::string text;
    std::string backend_id;
    std::string decoding_hash;

    friend bool operator==(const Caption&, const Caption&) = default;
};

class FrameId {
public:
    static constexpr int kCount = 6;

    /// Throws InvalidFrame outside [0, 5].
    explicit FrameId(int value);

    int value() const { return value_; }
    friend auto operator<=>(FrameId, FrameId) = default;

private:
    int value_;
};

enum class NLILabel : std::uint8_t { Entailment = 0, Neutral = 1, Contradiction = 2 };

inline constexpr std::array<NLILabel, 3> kCanonicalLabels{
    NLILabel::Entailment, NLILabel::Neutral, NLILabel::Contradiction};

inline constexpr std::size_t index_of(NLILabel label) { return static_cast<std::size_t>(label); }
NLILabel label_at(std::size_t index);
std::string_view to_string(NLILabel label);
/// Throws LabelDomainError for anything but the three canonical names.
NLILabel parse_label(std::string_view text);

/// Three-way score vector aligned to the canonical label order.
class NLIDistribution {
public:
    static constexpr double kTolerance = 1e-6;

    /// Validates: components in [0, 1], sum within 1e-6 of 1.
    explicit NLIDistribution(std::array<double, 3> scores);

    static NLIDistribution uniform();
    /// Scales non-negative raw scores to sum to one.
    static NLIDistribution normalized(std::array<double, 3> raw);
    static bool is_valid(const std::array<double, 3>& scores);

    const std::array<double, 3>& scores() const { return scores_; }
    double operator[](NLILabel label) const { return scores_[index_of(label)]; }

    /// Canonical-order argmax; ties go to the lowest index.
    NLILabel argmax() const;

    friend bool operator==(const NLIDistribution&, const NLIDistribution&) = default;

private:
    std::array<double, 3> scores_;
};

/// Gold or predicted outcome: 3-way label for XVNLI, truth value for MaRVL.
using Verdict = std::variant<NLILabel, bool>;

struct TaskExample {
    Task task = Task::XVNLI;
    LanguageCode language = LanguageCode::ENG;
    std::string hypothesis_text;
    std::vector<ImageRef> images;  // XVNLI: 1; MaRVL: left, right
    Verdict gold = NLILabel::Entailment;
    std::string example_id;

    /// Throws PreconditionViolation when image arity or gold kind disagrees with the task.
    void validate() const;
};

struct FewShotConfig {
    int batch_size = 8;
    double learning_rate = 1e-4;
    int epochs = 3;
    std::int64_t seed = 0;

    void validate() const;
    friend bool operator==(const FewShotConfig&, const FewShotConfig&) = default;
};

struct EvalReport {
    Task task = Task::XVNLI;
    std::map<LanguageCode, double> per_language;
    double macro_avg = 0.0;
    std::optional<FrameId> frame;
    std::optional<int> shots;
    nlohmann::json metadata = nlohmann::json::object();

    friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

/// Half-up rounding of a fraction to a percentage with two decimals, e.g. 0.57126 -> "57.13".
std::string format_percent(double fraction);

/// Shortest decimal text that round-trips to the same double.
std::string format_double(double value);

// JSON (snake_case field names)
void to_json(nlohmann::json& j, const LanguageCode& v);
void from_json(const nlohmann::json& j, LanguageCode& v);
void to_json(nlohmann::json& j, const Task& v);
void from_json(const nlohmann::json& j, Task& v);
void to_json(nlohmann::json& j, const ImageRef& v);
void from_json(const nlohmann::json& j, ImageRef& v);
void to_json(nlohmann::json& j, const DecodingConfig& v);
void from_json(const nlohmann::json& j, DecodingConfig& v);
void to_json(nlohmann::json& j, const Caption& v);
void from_json(const nlohmann::json& j, Caption& v);
void to_json(nlohmann::json& j, const NLILabel& v);
void from_json(const nlohmann::json& j, NLILabel& v);
void to_json(nlohmann::json& j, const NLIDistribution& v);
NLIDistribution distribution_from_json(const nlohmann::json& j);
void to_json(nlohmann::json& j, const TaskExample& v);
TaskExample task_example_from_json(const nlohmann::json& j);
void to_json(nlohmann::json& j, const FewShotConfig& v);
void from_json(const nlohmann::json& j, FewShotConfig& v);
void to_json(nlohmann::json& j, const EvalReport& v);
EvalReport eval_report_from_json(const nlohmann::json& j);
nlohmann::json verdict_to_json(const Verdict& v);

} // namespace icu
