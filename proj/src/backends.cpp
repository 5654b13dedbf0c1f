// Copyright (C) 2026 The ICU Authors
// SPDX-License-Identifier: Apache-2.0

#include "icu/backends.hpp"

#include <fstream>
#include <optional>

#include "icu/digest.hpp"
#include "icu/http_backends.hpp"

namespace icu {

std::string_view trim(std::string_view text) {
    constexpr std::string_view kSpace = " \t\r\n\f\v";
    const auto first = text.find_first_not_of(kSpace);
    if (first == std::string_view::npos) return {};
    const auto last = text.find_last_not_of(kSpace);
    return text.substr(first, last - first + 1);
}

Caption CaptionerBackend::generate(const ImageRef& image, const DecodingConfig& config) {
    config.validate();
    std::optional<std::lock_guard<std::mutex>> lock;
    if (concurrency() == Concurrency::SingleThreaded) lock.emplace(serial_);
    ++invocations_;
    std::string text = caption_text(image, config);
    if (trim(text).empty()) {
        fail(ErrorCode::BackendFailure,
             backend_id() + " produced an empty caption for image '" + image.image_id + "'");
    }
    return Caption{image, std::move(text), backend_id(), decoding_hash(config)};
}

NLIDistribution NLIBackend::score(std::string_view premise, std::string_view hypothesis) {
    if (trim(premise).empty() || trim(hypothesis).empty()) {
        fail(ErrorCode::EmptyInput, backend_id() + ": premise and hypothesis must be non-empty");
    }
    std::optional<std::lock_guard<std::mutex>> lock;
    if (concurrency() == Concurrency::SingleThreaded) lock.emplace(serial_);
    ++scores_;
    try {
        return score_pair(std::string(premise), std::string(hypothesis));
    } catch (const Error& e) {
        if (e.code() == ErrorCode::PreconditionViolation) {
            fail(ErrorCode::BackendFailure, backend_id() + ": " + e.what());
        }
        throw;
    }
}

std::shared_ptr<NLIBackend> NLIBackend::fine_tune(std::span<const TrainingTriple> examples,
                                                  const FewShotConfig& config) {
    if (!tunable()) {
        fail(ErrorCode::NotTunable, backend_id() + " is configured read-only");
    }
    config.validate();
    if (examples.empty()) {
        fail(ErrorCode::PreconditionViolation, "fine_tune needs at least one training example");
    }
    std::lock_guard<std::mutex> lock(serial_);
    return tune(examples, config);
}

StubCaptioner::StubCaptioner(std::map<std::string, std::string> fixtures) : fixtures_(std::move(fixtures)) {}

std::map<std::string, std::string> StubCaptioner::load_fixtures(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::IoFailure, "cannot open captioner fixtures " + path.string());
    try {
        return nlohmann::json::parse(in).get<std::map<std::string, std::string>>();
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ParseError, "captioner fixtures " + path.string() + ": " + e.what());
    }
}

std::string StubCaptioner::caption_text(const ImageRef& image, const DecodingConfig&) {
    if (image.image_id.empty()) {
        fail(ErrorCode::ImageUnreadable, "stub captioner needs an image_id");
    }
    if (auto it = fixtures_.find(image.image_id); it != fixtures_.end()) {
        return it->second;
    }
    return "stub caption for " + image.image_id;
}

StubNLI::StubNLI(FixtureTable fixtures, bool tunable, std::string id)
    : fixtures_(std::move(fixtures)), tunable_(tunable), id_(std::move(id)) {}

StubNLI StubNLI::from_json(const nlohmann::json& j) {
    FixtureTable table;
    for (const auto& entry : j.at("entries")) {
        PairKey key{entry.at("premise").get<std::string>(), entry.at("hypothesis").get<std::string>()};
        table.insert_or_assign(std::move(key), distribution_from_json(entry));
    }
    return StubNLI(std::move(table), j.value("tunable", true), j.value("backend_id", std::string(kId)));
}

StubNLI StubNLI::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::IoFailure, "cannot open NLI fixtures " + path.string());
    try {
        return from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::ParseError, "NLI fixtures " + path.string() + ": " + e.what());
    }
}

nlohmann::json StubNLI::to_json() const {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& [key, dist] : fixtures_) {
        entries.push_back({{"premise", key.first}, {"hypothesis", key.second}, {"scores", dist.scores()}});
    }
    return {{"backend_id", id_}, {"tunable", tunable_}, {"entries", entries}};
}

void StubNLI::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::IoFailure, "cannot write " + path.string());
    out << to_json().dump(2) << '\n';
}

NLIDistribution StubNLI::score_pair(const std::string& premise, const std::string& hypothesis) {
    if (auto it = fixtures_.find({premise, hypothesis}); it != fixtures_.end()) {
        return it->second;
    }
    return NLIDistribution::uniform();
}

std::shared_ptr<NLIBackend> StubNLI::tune(std::span<const TrainingTriple> examples, const FewShotConfig& config) {
    std::map<PairKey, std::array<double, 3>> mass;
    TrainingLog log{config.batch_size, config.learning_rate, config.epochs, config.seed, examples.size(), 0};
    const std::size_t batch = static_cast<std::size_t>(config.batch_size);
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        for (std::size_t start = 0; start < examples.size(); start += batch) {
            const std::size_t end = std::min(start + batch, examples.size());
            for (std::size_t i = start; i < end; ++i) {
                const auto& t = examples[i];
                mass[{t.premise, t.hypothesis}][index_of(t.label)] += config.learning_rate;
            }
            ++log.steps;
        }
    }

    FixtureTable tuned = fixtures_;
    for (const auto& [key, m] : mass) {
        tuned.insert_or_assign(key, NLIDistribution::normalized(m));
    }

    nlohmann::json fingerprint = {{"base", id_}, {"config", config}, {"examples", nlohmann::json::array()}};
    for (const auto& t : examples) {
        fingerprint["examples"].push_back({t.premise, t.hypothesis, index_of(t.label)});
    }
    auto result = std::make_shared<StubNLI>(std::move(tuned), tunable_,
                                            id_ + "+ft-" + canonical_digest(fingerprint).substr(0, 12));
    result->log_ = log;
    return result;
}

namespace {

std::filesystem::path setting_path(const AdapterSettings& settings, const std::string& key) {
    auto it = settings.find(key);
    return it == settings.end() ? std::filesystem::path{} : std::filesystem::path(it->second);
}

bool setting_bool(const AdapterSettings& settings, const std::string& key, bool fallback) {
    auto it = settings.find(key);
    if (it == settings.end()) return fallback;
    if (it->second == "true" || it->second == "1" || it->second == "yes") return true;
    if (it->second == "false" || it->second == "0" || it->second == "no") return false;
    fail(ErrorCode::InvalidConfig, "setting '" + key + "' is not a boolean: " + it->second);
}

} // namespace

std::unique_ptr<CaptionerBackend> make_captioner(std::string_view name, const AdapterSettings& settings) {
    if (name == StubCaptioner::kId) {
        const auto path = setting_path(settings, "fixtures");
        return std::make_unique<StubCaptioner>(path.empty() ? std::map<std::string, std::string>{}
                                                            : StubCaptioner::load_fixtures(path));
    }
    if (name == HttpCaptioner::kName) {
        return std::make_unique<HttpCaptioner>(HttpSettings::from(settings, kDefaultCaptionCheckpoint));
    }
    fail(ErrorCode::UnknownBackend, "unknown captioner backend '" + std::string(name) + "'");
}

std::shared_ptr<NLIBackend> make_nli(std::string_view name, const AdapterSettings& settings) {
    const bool tunable = setting_bool(settings, "tunable", true);
    if (name == StubNLI::kId) {
        const auto path = setting_path(settings, "fixtures");
        if (path.empty()) return std::make_shared<StubNLI>(StubNLI::FixtureTable{}, tunable);
        StubNLI loaded = StubNLI::load(path);
        return std::make_shared<StubNLI>(loaded.fixtures(), tunable, loaded.backend_id());
    }
    if (name == HttpNLI::kName) {
        return std::make_shared<HttpNLI>(HttpSettings::from(settings, kDefaultNliCheckpoint), tunable);
    }
    fail(ErrorCode::UnknownBackend, "unknown NLI backend '" + std::string(name) + "'");
}

} // namespace icu
