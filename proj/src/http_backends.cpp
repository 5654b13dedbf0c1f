// Copyright (C) 2026 The ICU Authors
// SPDX-License-Identifier: Apache-2.0

#include "icu/http_backends.hpp"

#include <filesystem>
#include <fstream>

#include "httplib.h"

namespace icu {

namespace {

struct Target {
    std::string origin;  // scheme://host:port
    std::string prefix;  // path prefix without trailing slash
};

Target split_endpoint(const std::string& endpoint) {
    const auto scheme = endpoint.find("://");
    const auto path = endpoint.find('/', scheme == std::string::npos ? 0 : scheme + 3);
    Target t;
    t.origin = endpoint.substr(0, path);
    if (path != std::string::npos) {
        t.prefix = endpoint.substr(path);
        while (!t.prefix.empty() && t.prefix.back() == '/') t.prefix.pop_back();
    }
    return t;
}

/// POSTs a JSON body and returns the parsed response. Non-2xx responses throw
/// with `failure_code` unless the server reports "image_unreadable".
nlohmann::json post_json(const HttpSettings& settings, const std::string& route, const nlohmann::json& body,
                         ErrorCode failure_code) {
    const Target target = split_endpoint(settings.endpoint);
    httplib::Client client(target.origin);
    client.set_connection_timeout(settings.timeout);
    client.set_read_timeout(settings.timeout);
    client.set_write_timeout(settings.timeout);

    auto res = client.Post(target.prefix + route, body.dump(), "application/json");
    if (!res) {
        fail(failure_code, "POST " + settings.endpoint + route + " failed: " + httplib::to_string(res.error()));
    }
    nlohmann::json reply = nlohmann::json::parse(res->body, nullptr, /*allow_exceptions=*/false);
    if (res->status < 200 || res->status >= 300) {
        std::string kind = reply.is_object() ? reply.value("error", std::string{}) : std::string{};
        std::string message = reply.is_object() ? reply.value("message", res->body) : res->body;
        if (kind == "image_unreadable") fail(ErrorCode::ImageUnreadable, message);
        fail(failure_code, "POST " + route + " returned " + std::to_string(res->status) + ": " + message);
    }
    if (reply.is_discarded() || !reply.is_object()) {
        fail(failure_code, "POST " + route + " returned a non-object body");
    }
    return reply;
}

bool is_local_path(const std::string& uri) { return uri.find("://") == std::string::npos; }

} // namespace

HttpSettings HttpSettings::from(const AdapterSettings& settings, std::string_view default_checkpoint) {
    HttpSettings s;
    auto get = [&](const char* key) -> const std::string* {
        auto it = settings.find(key);
        return it == settings.end() ? nullptr : &it->second;
    };
    if (const auto* v = get("endpoint"); v && !v->empty()) {
        s.endpoint = *v;
    } else {
        fail(ErrorCode::InvalidConfig, "http adapter needs an 'endpoint' setting");
    }
    s.checkpoint = get("checkpoint") ? *get("checkpoint") : std::string(default_checkpoint);
    if (const auto* v = get("device")) s.device = *v;
    if (const auto* v = get("timeout_s")) {
        try {
            s.timeout = std::chrono::seconds(std::stol(*v));
        } catch (const std::exception&) {
            fail(ErrorCode::InvalidConfig, "timeout_s is not an integer: " + *v);
        }
    }
    return s;
}

HttpCaptioner::HttpCaptioner(HttpSettings settings) : settings_(std::move(settings)) {}

std::string HttpCaptioner::backend_id() const { return std::string(kName) + ":" + settings_.checkpoint; }

std::string HttpCaptioner::caption_text(const ImageRef& image, const DecodingConfig& config) {
    if (is_local_path(image.uri)) {
        std::ifstream probe(image.uri, std::ios::binary);
        if (image.uri.empty() || !probe || std::filesystem::is_directory(image.uri)) {
            fail(ErrorCode::ImageUnreadable, "cannot read image '" + image.uri + "'");
        }
    }
    nlohmann::json body = {{"image_uri", image.uri},
                           {"image_id", image.image_id},
                           {"dataset_id", image.dataset_id},
                           {"checkpoint", settings_.checkpoint},
                           {"device", settings_.device},
                           {"beam_size", config.beam_size},
                           {"ngram_diversity_window", config.ngram_diversity_window},
                           {"max_length", config.max_length}};
    const auto reply = post_json(settings_, "/caption", body, ErrorCode::BackendFailure);
    if (!reply.contains("text") || !reply["text"].is_string()) {
        fail(ErrorCode::BackendFailure, "/caption reply has no 'text'");
    }
    return reply["text"].get<std::string>();
}

HttpNLI::HttpNLI(HttpSettings settings, bool tunable) : settings_(std::move(settings)), tunable_(tunable) {}

std::string HttpNLI::backend_id() const { return std::string(kName) + ":" + settings_.checkpoint; }

NLIDistribution HttpNLI::score_pair(const std::string& premise, const std::string& hypothesis) {
    nlohmann::json body = {{"model", settings_.checkpoint},
                           {"device", settings_.device},
                           {"premise", premise},
                           {"hypothesis", hypothesis}};
    const auto reply = post_json(settings_, "/score", body, ErrorCode::BackendFailure);
    try {
        return distribution_from_json(reply);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::BackendFailure, std::string("/score reply malformed: ") + e.what());
    } catch (const Error& e) {
        fail(ErrorCode::BackendFailure, std::string("/score reply malformed: ") + e.what());
    }
}

std::shared_ptr<NLIBackend> HttpNLI::tune(std::span<const TrainingTriple> examples, const FewShotConfig& config) {
    nlohmann::json items = nlohmann::json::array();
    for (const auto& t : examples) {
        items.push_back({{"premise", t.premise}, {"hypothesis", t.hypothesis}, {"label", t.label}});
    }
    nlohmann::json body = {{"model", settings_.checkpoint},
                           {"device", settings_.device},
                           {"examples", items},
                           {"batch_size", config.batch_size},
                           {"learning_rate", config.learning_rate},
                           {"epochs", config.epochs},
                           {"seed", config.seed}};
    const auto reply = post_json(settings_, "/fine_tune", body, ErrorCode::TrainingFailure);
    if (!reply.contains("model") || !reply["model"].is_string() || reply["model"].get<std::string>().empty()) {
        fail(ErrorCode::TrainingFailure, "/fine_tune reply has no 'model'");
    }
    HttpSettings tuned = settings_;
    tuned.checkpoint = reply["model"].get<std::string>();
    auto result = std::make_shared<HttpNLI>(std::move(tuned), tunable_);
    result->resolved_ = reply.value("resolved", nlohmann::json::object());
    return result;
}

} // namespace icu
