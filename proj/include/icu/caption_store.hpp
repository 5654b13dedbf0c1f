// Copyright (C) 2026 The ICU Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <future>
#include <map>
#include <mutex>
#include <optional>
#include <string>

#include "icu/backends.hpp"
#include "icu/types.hpp"

namespace icu {

/// Write-once caption cache persisted as JSONL, one record per entry:
///   {"backend_id", "decoding_hash", "image", "key", "text"}
/// Records are sorted by key on flush, so identical contents give identical bytes.
///
/// Thread-safe. Concurrent get_or_generate() calls for the same key invoke the
/// backend once; later callers wait for and share the first result.
class CaptionCache {
public:
    /// Opens (or starts) the cache at `path`. A missing file is an empty cache.
    /// Throws ParseError on a malformed line and CacheConflict when the file
    /// holds two different texts for one key.
    explicit CaptionCache(std::filesystem::path path);

    CaptionCache(const CaptionCache&) = delete;
    CaptionCache& operator=(const CaptionCache&) = delete;

    /// Key layout: backend_id|decoding_hash|dataset_id|image_id. Components
    /// containing '|' are rejected.
    static std::string key_for(std::string_view backend_id, std::string_view decoding_hash,
                               std::string_view dataset_id, std::string_view image_id);
    static std::string key_for(const Caption& caption);

    Caption get_or_generate(CaptionerBackend& backend, const ImageRef& image, const DecodingConfig& config);

    /// Stores a caption. Re-storing identical text is a no-op; different text
    /// for an existing key throws CacheConflict.
    void put(const Caption& caption);

    std::optional<Caption> find(const std::string& key) const;

    /// Writes every entry to disk and returns the number of records written.
    std::size_t flush();

    std::map<std::string, Caption> entries() const;
    std::size_t size() const;
    std::uint64_t hit_count() const;
    std::uint64_t miss_count() const;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    mutable std::mutex mutex_;
    std::map<std::string, Caption> entries_;
    std::map<std::string, std::shared_future<Caption>> in_flight_;
    std::uint64_t hits_ = 0;
    std::uint64_t misses_ = 0;
};

/// Caption provider bundling a cache, a captioner and its decoding config.
struct CaptionSource {
    CaptionCache& cache;
    CaptionerBackend& backend;
    DecodingConfig config;

    Caption caption_for(const ImageRef& image) const { return cache.get_or_generate(backend, image, config); }
};

} // namespace icu
