// Copyright (C) 2026 The ICU Authors
// SPDX-License-Identifier: Apache-2.0

#include "icu/types.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "icu/digest.hpp"

namespace icu {

namespace {

constexpr std::array<std::string_view, 10> kLanguageNames{
    "ENG", "ARB", "SPA", "FRA", "RUS", "IND", "SWA", "TAM", "TUR", "CMN"};

std::string upper(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return out;
}

std::string lower(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

} // namespace

LanguageCode LanguageCode::parse(std::string_view text) {
    const std::string tag = upper(text);
    for (std::size_t i = 0; i < kLanguageNames.size(); ++i) {
        if (tag == kLanguageNames[i]) {
            return LanguageCode(all[i]);
        }
    }
    fail(ErrorCode::InvalidLanguage, "unknown language code '" + std::string(text) + "'");
}

std::string_view LanguageCode::str() const { return kLanguageNames[value_]; }

std::string_view to_string(Task task) {
    return task == Task::XVNLI ? "xvnli" : "marvl";
}

Task parse_task(std::string_view text) {
    const std::string t = lower(text);
    if (t == "xvnli") return Task::XVNLI;
    if (t == "marvl") return Task::MARVL;
    fail(ErrorCode::UsageError, "unknown task '" + std::string(text) + "' (expected xvnli or marvl)");
}

void DecodingConfig::validate() const {
    if (beam_size <= 0 || ngram_diversity_window <= 0 || max_length <= 0) {
        fail(ErrorCode::InvalidConfig,
             "decoding config fields must be positive (beam_size=" + std::to_string(beam_size) +
                 ", ngram_diversity_window=" + std::to_string(ngram_diversity_window) +
                 ", max_length=" + std::to_string(max_length) + ")");
    }
}

std::string decoding_hash(const DecodingConfig& config) {
    config.validate();
    return canonical_digest(nlohmann::json(config));
}

FrameId::FrameId(int value) : value_(value) {
    if (value < 0 || value >= kCount) {
        fail(ErrorCode::InvalidFrame, "frame id " + std::to_string(value) + " outside [0, 5]");
    }
}

NLILabel label_at(std::size_t index) {
    if (index >= kCanonicalLabels.size()) {
        fail(ErrorCode::LabelDomainError, "label index " + std::to_string(index) + " outside [0, 2]");
    }
    return kCanonicalLabels[index];
}

std::string_view to_string(NLILabel label) {
    switch (label) {
    case NLILabel::Entailment: return "entailment";
    case NLILabel::Neutral: return "neutral";
    case NLILabel::Contradiction: return "contradiction";
    }
    return "?";
}

NLILabel parse_label(std::string_view text) {
    for (NLILabel l : kCanonicalLabels) {
        if (text == to_string(l)) return l;
    }
    fail(ErrorCode::LabelDomainError, "label '" + std::string(text) + "' is not one of entailment/neutral/contradiction");
}

bool NLIDistribution::is_valid(const std::array<double, 3>& scores) {
    double sum = 0.0;
    for (double s : scores) {
        if (!std::isfinite(s) || s < 0.0 || s > 1.0) return false;
        sum += s;
    }
    return std::abs(sum - 1.0) <= kTolerance;
}

NLIDistribution::NLIDistribution(std::array<double, 3> scores) : scores_(scores) {
    if (!is_valid(scores_)) {
        fail(ErrorCode::PreconditionViolation,
             "invalid NLI distribution (" + format_double(scores[0]) + ", " + format_double(scores[1]) +
                 ", " + format_double(scores[2]) + ")");
    }
}

NLIDistribution NLIDistribution::uniform() {
    return NLIDistribution({1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0});
}

NLIDistribution NLIDistribution::normalized(std::array<double, 3> raw) {
    double sum = 0.0;
    for (double s : raw) {
        if (!std::isfinite(s) || s < 0.0) {
            fail(ErrorCode::PreconditionViolation, "raw NLI scores must be finite and non-negative");
        }
        sum += s;
    }
    if (sum <= 0.0) {
        fail(ErrorCode::PreconditionViolation, "raw NLI scores sum to zero");
    }
    for (double& s : raw) s /= sum;
    return NLIDistribution(raw);
}

NLILabel NLIDistribution::argmax() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores_.size(); ++i) {
        if (scores_[i] > scores_[best]) best = i;
    }
    return label_at(best);
}

void TaskExample::validate() const {
    if (task == Task::XVNLI) {
        if (images.size() != 1 || !std::holds_alternative<NLILabel>(gold)) {
            fail(ErrorCode::PreconditionViolation,
                 "XVNLI example '" + example_id + "' needs exactly one image and a 3-way gold label");
        }
    } else {
        if (images.size() != 2 || !std::holds_alternative<bool>(gold)) {
            fail(ErrorCode::PreconditionViolation,
                 "MaRVL example '" + example_id + "' needs exactly two images and a boolean gold label");
        }
    }
}

void FewShotConfig::validate() const {
    if (batch_size <= 0 || epochs <= 0 || !(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
        fail(ErrorCode::InvalidConfig,
             "few-shot config needs positive batch_size, learning_rate and epochs (batch_size=" +
                 std::to_string(batch_size) + ", learning_rate=" + format_double(learning_rate) +
                 ", epochs=" + std::to_string(epochs) + ")");
    }
}

std::string format_percent(double fraction) {
    // 1e-9 absorbs binary representation error so that e.g. 0.60705 rounds up.
    const double hundredths = std::floor(fraction * 10000.0 + 0.5 + 1e-9);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", hundredths / 100.0);
    return buf;
}

std::string format_double(double value) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc{}) return "nan";
    return std::string(buf, end);
}

void to_json(nlohmann::json& j, const LanguageCode& v) { j = std::string(v.str()); }
void from_json(const nlohmann::json& j, LanguageCode& v) { v = LanguageCode::parse(j.get<std::string>()); }

void to_json(nlohmann::json& j, const Task& v) { j = std::string(to_string(v)); }
void from_json(const nlohmann::json& j, Task& v) { v = parse_task(j.get<std::string>()); }

void to_json(nlohmann::json& j, const ImageRef& v) {
    j = {{"dataset_id", v.dataset_id}, {"image_id", v.image_id}, {"uri", v.uri}};
}
void from_json(const nlohmann::json& j, ImageRef& v) {
    v.dataset_id = j.at("dataset_id").get<std::string>();
    v.image_id = j.at("image_id").get<std::string>();
    v.uri = j.value("uri", std::string{});
}

void to_json(nlohmann::json& j, const DecodingConfig& v) {
    j = {{"beam_size", v.beam_size},
         {"ngram_diversity_window", v.ngram_diversity_window},
         {"max_length", v.max_length}};
}
void from_json(const nlohmann::json& j, DecodingConfig& v) {
    DecodingConfig d;
    d.beam_size = j.value("beam_size", d.beam_size);
    d.ngram_diversity_window = j.value("ngram_diversity_window", d.ngram_diversity_window);
    d.max_length = j.value("max_length", d.max_length);
    d.validate();
    v = d;
}

void to_json(nlohmann::json& j, const Caption& v) {
    j = {{"image", v.image}, {"text", v.text}, {"backend_id", v.backend_id}, {"decoding_hash", v.decoding_hash}};
}
void from_json(const nlohmann::json& j, Caption& v) {
    v.image = j.at("image").get<ImageRef>();
    v.text = j.at("text").get<std::string>();
    v.backend_id = j.at("backend_id").get<std::string>();
    v.decoding_hash = j.at("decoding_hash").get<std::string>();
}

void to_json(nlohmann::json& j, const NLILabel& v) { j = std::string(to_string(v)); }
void from_json(const nlohmann::json& j, NLILabel& v) { v = parse_label(j.get<std::string>()); }

void to_json(nlohmann::json& j, const NLIDistribution& v) { j = {{"scores", v.scores()}}; }
NLIDistribution distribution_from_json(const nlohmann::json& j) {
    const auto& s = j.at("scores");
    if (!s.is_array() || s.size() != 3) {
        fail(ErrorCode::ParseError, "distribution needs a 3-element 'scores' array");
    }
    return NLIDistribution({s[0].get<double>(), s[1].get<double>(), s[2].get<double>()});
}

nlohmann::json verdict_to_json(const Verdict& v) {
    if (const auto* label = std::get_if<NLILabel>(&v)) return nlohmann::json(*label);
    return nlohmann::json(std::get<bool>(v));
}

void to_json(nlohmann::json& j, const TaskExample& v) {
    j = {{"task", v.task},
         {"language", v.language},
         {"hypothesis_text", v.hypothesis_text},
         {"images", v.images},
         {"gold", verdict_to_json(v.gold)},
         {"example_id", v.example_id}};
}

TaskExample task_example_from_json(const nlohmann::json& j) {
    TaskExample e;
    e.task = j.at("task").get<Task>();
    e.language = j.at("language").get<LanguageCode>();
    e.hypothesis_text = j.at("hypothesis_text").get<std::string>();
    e.images = j.at("images").get<std::vector<ImageRef>>();
    const auto& gold = j.at("gold");
    if (gold.is_boolean()) {
        e.gold = gold.get<bool>();
    } else {
        e.gold = parse_label(gold.get<std::string>());
    }
    e.example_id = j.at("example_id").get<std::string>();
    e.validate();
    return e;
}

void to_json(nlohmann::json& j, const FewShotConfig& v) {
    j = {{"batch_size", v.batch_size}, {"learning_rate", v.learning_rate}, {"epochs", v.epochs}, {"seed", v.seed}};
}
void from_json(const nlohmann::json& j, FewShotConfig& v) {
    FewShotConfig c;
    c.batch_size = j.value("batch_size", c.batch_size);
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.epochs = j.value("epochs", c.epochs);
    c.seed = j.value("seed", c.seed);
    c.validate();
    v = c;
}

void to_json(nlohmann::json& j, const EvalReport& v) {
    nlohmann::json per_language = nlohmann::json::object();
    for (const auto& [lang, acc] : v.per_language) {
        per_language[std::string(lang.str())] = acc;
    }
    j = {{"task", v.task},
         {"per_language", per_language},
         {"macro_avg", v.macro_avg},
         {"frame", v.frame ? nlohmann::json(v.frame->value()) : nlohmann::json(nullptr)},
         {"shots", v.shots ? nlohmann::json(*v.shots) : nlohmann::json(nullptr)},
         {"metadata", v.metadata}};
}

EvalReport eval_report_from_json(const nlohmann::json& j) {
    EvalReport r;
    r.task = j.at("task").get<Task>();
    for (const auto& [lang, acc] : j.at("per_language").items()) {
        r.per_language.emplace(LanguageCode::parse(lang), acc.get<double>());
    }
    r.macro_avg = j.at("macro_avg").get<double>();
    if (j.contains("frame") && !j["frame"].is_null()) r.frame = FrameId(j["frame"].get<int>());
    if (j.contains("shots") && !j["shots"].is_null()) r.shots = j["shots"].get<int>();
    r.metadata = j.value("metadata", nlohmann::json::object());
    return r;
}

} // namespace icu
