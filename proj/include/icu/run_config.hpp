// Copyright (C) 2026 The ICU Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "icu/backends.hpp"
#include "icu/dataset_ingest.hpp"
#include "icu/task_adapters.hpp"
#include "icu/types.hpp"

namespace icu {

/// Flattened config file: "section.key" -> value.
using FlatConfig = std::map<std::string, std::string>;

/// Reads an INI/TOML-style file of [section] headers and key = value lines.
/// Surrounding double quotes on values are stripped; '#' and ';' start comments.
/// Values of path-like keys are resolved relative to the file's directory.
FlatConfig load_config_file(const std::filesystem::path& path);

/// Everything a CLI run depends on.
struct RunConfig {
    std::string command;
    Task task = Task::XVNLI;
    std::vector<LanguageCode> languages;
    Split split = Split::Test;
    std::optional<FrameId> frame;
    std::vector<int> frames{0, 1, 2, 3, 4, 5};
    std::vector<int> shots{0, 1, 5, 10, 20, 48};

    std::string captioner = std::string(StubCaptioner::kId);
    std::string nli = std::string(StubNLI::kId);
    std::map<std::string, AdapterSettings> adapters;  // [adapter.<name>] sections

    DecodingConfig decoding;
    FewShotConfig fewshot;
    MarvlOptions marvl;

    std::filesystem::path data_root;
    std::string records_pattern = "{task}/{split}/{language}.jsonl";
    std::string images_pattern = "{task}/images";
    bool stub_images = false;
    std::map<Task, FieldMap> fields;

    std::filesystem::path caption_cache;
    std::filesystem::path out_dir;
    std::filesystem::path predictions;
    std::filesystem::path gold;
    std::vector<std::filesystem::path> inputs;

    std::int64_t seed = 0;
    int workers = 1;
    std::string timestamp = "1970-01-01T00:00:00Z";

    /// Applies a flattened config file on top of the current values.
    void apply(const FlatConfig& config);

    /// Experiment-defining fields only; locations (data root, out dir, cache
    /// path, prediction/gold/input files) and worker count are left out so the
    /// digest names the experiment, not where it ran.
    nlohmann::json experiment_json() const;
    std::string digest() const;

    DatasetManifest manifest(LanguageCode language, Split split) const;
    AdapterSettings adapter_settings(const std::string& name) const;

    /// Throws UsageError/InvalidConfig/InvalidFrame on inconsistent settings.
    void validate() const;
};

/// Parses "0,1,5" and ranges such as "0-5" into a list of integers.
std::vector<int> parse_int_list(std::string_view text);

} // namespace icu
