// Copyright (C) 2026 The ICU Authors
// SPDX-License-Identifier: Apache-2.0

#include "icu/dataset_ingest.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <set>

#include "icu/backends.hpp"

namespace icu {

namespace {

constexpr std::array<std::string_view, 5> kImageExtensions{"", ".jpg", ".jpeg", ".png", ".webp"};

struct LineContext {
    const DatasetManifest& manifest;
    std::size_t line_no;

    [[noreturn]] void raise(ErrorCode code, const std::string& what) const {
        fail(code, manifest.records_path.string() + ":" + std::to_string(line_no) + ": " + what);
    }
};

std::string field_name(const FieldMap& fields, const std::string& canonical) {
    auto it = fields.find(canonical);
    return it == fields.end() ? canonical : it->second;
}

std::string string_field(const nlohmann::json& j, const FieldMap& fields, const std::string& canonical,
                         const LineContext& ctx) {
    const std::string name = field_name(fields, canonical);
    auto it = j.find(name);
    if (it == j.end()) ctx.raise(ErrorCode::ParseError, "missing field '" + name + "'");
    if (it->is_string()) return it->get<std::string>();
    if (it->is_number_integer()) return std::to_string(it->get<long long>());
    ctx.raise(ErrorCode::ParseError, "field '" + name + "' must be a string");
}

ImageRef resolve_image(const DatasetManifest& m, const std::string& image_id, const LineContext& ctx) {
    if (image_id.empty()) ctx.raise(ErrorCode::ParseError, "empty image id");
    ImageRef ref{m.dataset_id.empty() ? std::string(to_string(m.task)) : m.dataset_id, image_id, {}};
    if (m.stub_images) {
        ref.uri = "stub://" + ref.dataset_id + "/" + image_id;
        return ref;
    }
    for (std::string_view ext : kImageExtensions) {
        const auto candidate = m.images_root / (image_id + std::string(ext));
        std::error_code ec;
        if (std::filesystem::is_regular_file(candidate, ec)) {
            ref.uri = candidate.string();
            return ref;
        }
    }
    ctx.raise(ErrorCode::MissingImage, "image '" + image_id + "' not found under " + m.images_root.string());
}

TaskExample parse_record(const nlohmann::json& j, const DatasetManifest& m, const LineContext& ctx) {
    if (!j.is_object()) ctx.raise(ErrorCode::ParseError, "record is not a JSON object");
    TaskExample ex;
    ex.task = m.task;
    ex.example_id = string_field(j, m.fields, "example_id", ctx);
    if (ex.example_id.empty()) ctx.raise(ErrorCode::ParseError, "empty example_id");

    const std::string lang = string_field(j, m.fields, "language", ctx);
    try {
        ex.language = LanguageCode::parse(lang);
    } catch (const Error& e) {
        ctx.raise(ErrorCode::InvalidLanguage, e.what());
    }
    if (m.language && ex.language != *m.language) {
        ctx.raise(ErrorCode::LanguageMismatch, "record language " + std::string(ex.language.str()) +
                                                   " differs from manifest language " + std::string(m.language->str()));
    }

    const std::string label_name = field_name(m.fields, "label");
    auto label = j.find(label_name);
    if (label == j.end()) ctx.raise(ErrorCode::ParseError, "missing field '" + label_name + "'");

    if (m.task == Task::XVNLI) {
        ex.hypothesis_text = string_field(j, m.fields, "hypothesis", ctx);
        ex.images.push_back(resolve_image(m, string_field(j, m.fields, "image_id", ctx), ctx));
        if (!label->is_string()) ctx.raise(ErrorCode::LabelDomainError, "XVNLI label must be a string");
        try {
            ex.gold = parse_label(label->get<std::string>());
        } catch (const Error& e) {
            ctx.raise(ErrorCode::LabelDomainError, e.what());
        }
    } else {
        ex.hypothesis_text = string_field(j, m.fields, "caption", ctx);
        ex.images.push_back(resolve_image(m, string_field(j, m.fields, "left_image_id", ctx), ctx));
        ex.images.push_back(resolve_image(m, string_field(j, m.fields, "right_image_id", ctx), ctx));
        if (!label->is_boolean()) {
            ctx.raise(ErrorCode::LabelDomainError, "MaRVL label must be true or false, got " + label->dump());
        }
        ex.gold = label->get<bool>();
    }
    if (trim(ex.hypothesis_text).empty()) ctx.raise(ErrorCode::ParseError, "empty hypothesis text");
    return ex;
}

} // namespace

std::string_view to_string(Split split) { return split == Split::Test ? "test" : "fewshot"; }

Split parse_split(std::string_view text) {
    if (text == "test") return Split::Test;
    if (text == "fewshot") return Split::FewShot;
    fail(ErrorCode::UsageError, "unknown split '" + std::string(text) + "' (expected test or fewshot)");
}

std::vector<TaskExample> load_split(const DatasetManifest& manifest) {
    std::ifstream in(manifest.records_path, std::ios::binary);
    if (!in) fail(ErrorCode::IoFailure, "cannot open records file " + manifest.records_path.string());

    std::vector<TaskExample> out;
    std::set<std::string> ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const LineContext ctx{manifest, line_no};
        nlohmann::json j = nlohmann::json::parse(line, nullptr, /*allow_exceptions=*/false);
        if (j.is_discarded()) ctx.raise(ErrorCode::ParseError, "malformed JSON");
        TaskExample ex = parse_record(j, manifest, ctx);
        if (!ids.insert(ex.example_id).second) {
            ctx.raise(ErrorCode::ParseError, "duplicate example_id '" + ex.example_id + "'");
        }
        out.push_back(std::move(ex));
    }

    if (manifest.expected_samples && *manifest.expected_samples != out.size()) {
        fail(ErrorCode::CountMismatch, manifest.records_path.string() + ": expected " +
                                           std::to_string(*manifest.expected_samples) + " samples, found " +
                                           std::to_string(out.size()));
    }
    if (manifest.expected_images) {
        const std::size_t images = count_images(out);
        if (images != *manifest.expected_images) {
            fail(ErrorCode::CountMismatch, manifest.records_path.string() + ": expected " +
                                               std::to_string(*manifest.expected_images) + " images, found " +
                                               std::to_string(images));
        }
    }
    return out;
}

std::size_t count_images(const std::vector<TaskExample>& examples) {
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& ex : examples) {
        for (const auto& img : ex.images) seen.emplace(img.dataset_id, img.image_id);
    }
    return seen.size();
}

FewShotSplit make_fewshot_split(LanguageCode language, std::vector<TaskExample> samples) {
    FewShotSplit split;
    split.language = language;
    std::set<std::pair<std::string, std::string>> seen;
    for (const auto& ex : samples) {
        if (ex.language != language) {
            fail(ErrorCode::LanguageMismatch, "few-shot sample '" + ex.example_id + "' is " +
                                                  std::string(ex.language.str()) + ", split is " +
                                                  std::string(language.str()));
        }
        for (const auto& img : ex.images) {
            if (seen.emplace(img.dataset_id, img.image_id).second) split.shot_images.push_back(img);
        }
    }
    split.samples = std::move(samples);
    return split;
}

FewShotSplit take_shots(const FewShotSplit& split, std::size_t num_shots) {
    if (num_shots > split.shot_images.size()) {
        fail(ErrorCode::NotEnoughShots, "requested " + std::to_string(num_shots) + " shots, split " +
                                            std::string(split.language.str()) + " has " +
                                            std::to_string(split.shot_images.size()));
    }
    FewShotSplit out;
    out.language = split.language;
    out.shot_images.assign(split.shot_images.begin(), split.shot_images.begin() + static_cast<std::ptrdiff_t>(num_shots));

    std::set<std::pair<std::string, std::string>> chosen;
    for (const auto& img : out.shot_images) chosen.emplace(img.dataset_id, img.image_id);
    for (const auto& ex : split.samples) {
        const bool inside = std::all_of(ex.images.begin(), ex.images.end(), [&](const ImageRef& img) {
            return chosen.count({img.dataset_id, img.image_id}) > 0;
        });
        if (inside) out.samples.push_back(ex);
    }
    return out;
}

} // namespace icu
