// Copyright (C) 2026 The ICU Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "icu/types.hpp"

namespace icu {

enum class Split { Test, FewShot };

std::string_view to_string(Split split);
Split parse_split(std::string_view text);

/// Renames source fields onto the canonical record schema
/// (canonical name -> name used in the file).
///   XVNLI: example_id, image_id, hypothesis, label, language
///   MaRVL: example_id, left_image_id, right_image_id, caption, label, language
using FieldMap = std::map<std::string, std::string>;

struct DatasetManifest {
    Task task = Task::XVNLI;
    std::optional<LanguageCode> language;  // unset: records may mix languages
    Split split = Split::Test;
    std::filesystem::path records_path;
    std::filesystem::path images_root;
    std::string dataset_id;  // defaults to the task name
    bool stub_images = false;  // skip resolving image files under images_root
    FieldMap fields;
    std::optional<std::size_t> expected_images;
    std::optional<std::size_t> expected_samples;
};

/// Parses and validates a JSONL split. Errors name the offending line:
/// ParseError (malformed line, duplicate id), LabelDomainError, InvalidLanguage,
/// LanguageMismatch, MissingImage, CountMismatch (against declared counts).
std::vector<TaskExample> load_split(const DatasetManifest& manifest);

/// Number of distinct images referenced by the examples.
std::size_t count_images(const std::vector<TaskExample>& examples);

/// Images in order of first appearance; each shot is one image with all samples using it.
struct FewShotSplit {
    LanguageCode language = LanguageCode::ENG;
    std::vector<ImageRef> shot_images;
    std::vector<TaskExample> samples;
};

/// Groups a loaded few-shot split into shots. All samples must share `language`.
FewShotSplit make_fewshot_split(LanguageCode language, std::vector<TaskExample> samples);

/// First `num_shots` shot images plus exactly the samples that reference them
/// (in their original order). Throws NotEnoughShots past the end of the split.
FewShotSplit take_shots(const FewShotSplit& split, std::size_t num_shots);

} // namespace icu
