// Copyright (C) 2026 The ICU Authors
// SPDX-License-Identifier: Apache-2.0

#include "icu/caption_store.hpp"

#include <fstream>

namespace icu {

namespace {

void check_component(std::string_view part, std::string_view what) {
    if (part.find('|') != std::string_view::npos) {
        fail(ErrorCode::PreconditionViolation, std::string(what) + " must not contain '|': " + std::string(part));
    }
}

nlohmann::json to_record(const std::string& key, const Caption& c) {
    return {{"key", key},
            {"image", c.image},
            {"text", c.text},
            {"backend_id", c.backend_id},
            {"decoding_hash", c.decoding_hash}};
}

} // namespace

CaptionCache::CaptionCache(std::filesystem::path path) : path_(std::move(path)) {
    std::ifstream in(path_, std::ios::binary);
    if (!in) return;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        Caption c;
        std::string key;
        try {
            const auto j = nlohmann::json::parse(line);
            key = j.at("key").get<std::string>();
            c.image = j.at("image").get<ImageRef>();
            c.text = j.at("text").get<std::string>();
            c.backend_id = j.at("backend_id").get<std::string>();
            c.decoding_hash = j.at("decoding_hash").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            fail(ErrorCode::ParseError,
                 path_.string() + ":" + std::to_string(line_no) + ": malformed cache record: " + e.what());
        }
        if (key != key_for(c)) {
            fail(ErrorCode::ParseError,
                 path_.string() + ":" + std::to_string(line_no) + ": key does not match record fields");
        }
        if (trim(c.text).empty()) {
            fail(ErrorCode::ParseError, path_.string() + ":" + std::to_string(line_no) + ": empty caption text");
        }
        put(c);
    }
}

std::string CaptionCache::key_for(std::string_view backend_id, std::string_view decoding_hash,
                                  std::string_view dataset_id, std::string_view image_id) {
    check_component(backend_id, "backend_id");
    check_component(decoding_hash, "decoding_hash");
    check_component(dataset_id, "dataset_id");
    check_component(image_id, "image_id");
    std::string key;
    key.reserve(backend_id.size() + decoding_hash.size() + dataset_id.size() + image_id.size() + 3);
    key.append(backend_id).append("|").append(decoding_hash).append("|").append(dataset_id).append("|").append(image_id);
    return key;
}

std::string CaptionCache::key_for(const Caption& caption) {
    return key_for(caption.backend_id, caption.decoding_hash, caption.image.dataset_id, caption.image.image_id);
}

Caption CaptionCache::get_or_generate(CaptionerBackend& backend, const ImageRef& image, const DecodingConfig& config) {
    const std::string key = key_for(backend.backend_id(), decoding_hash(config), image.dataset_id, image.image_id);

    std::promise<Caption> promise;
    {
        std::unique_lock lock(mutex_);
        if (auto it = entries_.find(key); it != entries_.end()) {
            ++hits_;
            return it->second;
        }
        if (auto it = in_flight_.find(key); it != in_flight_.end()) {
            ++hits_;
            auto pending = it->second;
            lock.unlock();
            return pending.get();
        }
        ++misses_;
        in_flight_.emplace(key, promise.get_future().share());
    }

    try {
        Caption caption = backend.generate(image, config);
        {
            std::lock_guard lock(mutex_);
            entries_.emplace(key, caption);
            in_flight_.erase(key);
        }
        promise.set_value(caption);
        return caption;
    } catch (...) {
        {
            std::lock_guard lock(mutex_);
            in_flight_.erase(key);
        }
        promise.set_exception(std::current_exception());
        throw;
    }
}

void CaptionCache::put(const Caption& caption) {
    const std::string key = key_for(caption);
    std::lock_guard lock(mutex_);
    auto [it, inserted] = entries_.emplace(key, caption);
    if (!inserted && it->second.text != caption.text) {
        fail(ErrorCode::CacheConflict,
             "cache entry '" + key + "' already holds \"" + it->second.text + "\", refusing \"" + caption.text + "\"");
    }
}

std::optional<Caption> CaptionCache::find(const std::string& key) const {
    std::lock_guard lock(mutex_);
    if (auto it = entries_.find(key); it != entries_.end()) return it->second;
    return std::nullopt;
}

std::size_t CaptionCache::flush() {
    std::lock_guard lock(mutex_);
    if (path_.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path_.parent_path(), ec);
    }
    const auto tmp = std::filesystem::path(path_.string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(ErrorCode::IoFailure, "cannot write caption cache " + tmp.string());
        for (const auto& [key, caption] : entries_) {
            out << to_record(key, caption).dump() << '\n';
        }
        out.flush();
        if (!out) fail(ErrorCode::IoFailure, "short write to caption cache " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path_, ec);
    if (ec) fail(ErrorCode::IoFailure, "cannot replace " + path_.string() + ": " + ec.message());
    return entries_.size();
}

std::map<std::string, Caption> CaptionCache::entries() const {
    std::lock_guard lock(mutex_);
    return entries_;
}

std::size_t CaptionCache::size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
}

std::uint64_t CaptionCache::hit_count() const {
    std::lock_guard lock(mutex_);
    return hits_;
}

std::uint64_t CaptionCache::miss_count() const {
    std::lock_guard lock(mutex_);
    return misses_;
}

} // namespace icu
