// Copyright (C) 2026 The ICU Authors
// SPDX-License-Identifier: Apache-2.0

#include "icu/run_config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "icu/digest.hpp"

namespace icu {

namespace {

bool is_path_key(const std::string& key) {
    static const std::set<std::string> kPaths{"data.root", "cache.path", "run.out_dir", "run.predictions", "run.gold"};
    if (kPaths.count(key)) return true;
    return key.rfind("adapter.", 0) == 0 && key.size() > 9 && key.ends_with(".fixtures");
}

std::string unquote(std::string value) {
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
        value = value.substr(1, value.size() - 2);
    }
    return value;
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
    T value{};
    const auto t = trim(text);
    auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc{} || end != t.data() + t.size()) {
        fail(ErrorCode::InvalidConfig, std::string(key) + ": not a number: '" + std::string(text) + "'");
    }
    return value;
}

double parse_real(std::string_view key, const std::string& text) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        fail(ErrorCode::InvalidConfig, std::string(key) + ": not a number: '" + text + "'");
    }
}

bool parse_bool(std::string_view key, const std::string& text) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    fail(ErrorCode::InvalidConfig, std::string(key) + ": not a boolean: '" + text + "'");
}

std::vector<std::string> split_list(std::string_view text) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in{std::string(text)};
    while (std::getline(in, item, ',')) {
        const auto t = trim(item);
        if (!t.empty()) out.emplace_back(t);
    }
    return out;
}

std::string substitute(std::string pattern, const std::string& name, const std::string& value) {
    const std::string token = "{" + name + "}";
    for (auto pos = pattern.find(token); pos != std::string::npos; pos = pattern.find(token, pos + value.size())) {
        pattern.replace(pos, token.size(), value);
    }
    return pattern;
}

} // namespace

std::vector<int> parse_int_list(std::string_view text) {
    std::vector<int> out;
    for (const auto& item : split_list(text)) {
        const auto dash = item.find('-', 1);
        if (dash != std::string::npos) {
            const int lo = parse_number<int>("range", item.substr(0, dash));
            const int hi = parse_number<int>("range", item.substr(dash + 1));
            if (hi < lo) fail(ErrorCode::UsageError, "descending range '" + item + "'");
            for (int v = lo; v <= hi; ++v) out.push_back(v);
        } else {
            out.push_back(parse_number<int>("list", item));
        }
    }
    return out;
}

FlatConfig load_config_file(const std::filesystem::path& path) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        pt::ini_parser::read_ini(path.string(), tree);
    } catch (const pt::ini_parser_error& e) {
        fail(ErrorCode::InvalidConfig, e.what());
    }

    const auto base = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
    FlatConfig flat;
    for (const auto& [section, body] : tree) {
        if (body.empty()) {
            fail(ErrorCode::InvalidConfig, path.string() + ": key '" + section + "' outside of any [section]");
        }
        for (const auto& [key, value] : body) {
            const std::string full = section + "." + key;
            std::string v = unquote(std::string(trim(value.data())));
            if (is_path_key(full) && !v.empty() && std::filesystem::path(v).is_relative()) {
                v = (base / v).lexically_normal().string();
            }
            flat[full] = v;
        }
    }
    return flat;
}

void RunConfig::apply(const FlatConfig& config) {
    for (const auto& [key, value] : config) {
        const auto dot = key.find('.');
        const std::string section = key.substr(0, dot);

        if (key == "run.task") task = parse_task(value);
        else if (key == "run.languages") {
            languages.clear();
            for (const auto& l : split_list(value)) languages.push_back(LanguageCode::parse(l));
        }
        else if (key == "run.split") split = parse_split(value);
        else if (key == "run.frame") frame = FrameId(parse_number<int>(key, value));
        else if (key == "run.frames") frames = parse_int_list(value);
        else if (key == "run.shots") shots = parse_int_list(value);
        else if (key == "run.seed") seed = parse_number<std::int64_t>(key, value);
        else if (key == "run.workers") workers = parse_number<int>(key, value);
        else if (key == "run.timestamp") timestamp = value;
        else if (key == "run.out_dir") out_dir = value;
        else if (key == "run.predictions") predictions = value;
        else if (key == "run.gold") gold = value;
        else if (key == "data.root") data_root = value;
        else if (key == "data.records") records_pattern = value;
        else if (key == "data.images") images_pattern = value;
        else if (key == "data.stub_images") stub_images = parse_bool(key, value);
        else if (key == "backend.captioner") captioner = value;
        else if (key == "backend.nli") nli = value;
        else if (key == "decoding.beam_size") decoding.beam_size = parse_number<int>(key, value);
        else if (key == "decoding.ngram_diversity_window") decoding.ngram_diversity_window = parse_number<int>(key, value);
        else if (key == "decoding.max_length") decoding.max_length = parse_number<int>(key, value);
        else if (key == "fewshot.batch_size") fewshot.batch_size = parse_number<int>(key, value);
        else if (key == "fewshot.learning_rate") fewshot.learning_rate = parse_real(key, value);
        else if (key == "fewshot.epochs") fewshot.epochs = parse_number<int>(key, value);
        else if (key == "fewshot.seed") seed = parse_number<std::int64_t>(key, value);
        else if (key == "frames.normalize_captions") marvl.normalize_captions = parse_bool(key, value);
        else if (key == "frames.marvl_mapping") marvl.mapping = parse_marvl_mapping(value);
        else if (key == "cache.path") caption_cache = value;
        else if (section == "adapter" && dot != std::string::npos) {
            const auto last = key.rfind('.');
            if (last == dot) fail(ErrorCode::InvalidConfig, "adapter settings need [adapter.<name>] sections: " + key);
            adapters[key.substr(dot + 1, last - dot - 1)][key.substr(last + 1)] = value;
        } else if (section == "fields" && dot != std::string::npos) {
            const auto last = key.rfind('.');
            if (last == dot) fail(ErrorCode::InvalidConfig, "field maps need [fields.<task>] sections: " + key);
            fields[parse_task(key.substr(dot + 1, last - dot - 1))][key.substr(last + 1)] = value;
        } else {
            fail(ErrorCode::InvalidConfig, "unknown config key '" + key + "'");
        }
    }
    fewshot.seed = seed;
}

nlohmann::json RunConfig::experiment_json() const {
    nlohmann::json langs = nlohmann::json::array();
    for (auto l : languages) langs.push_back(l);
    nlohmann::json adapter_json = nlohmann::json::object();
    for (const auto& [name, settings] : adapters) adapter_json[name] = settings;
    nlohmann::json field_json = nlohmann::json::object();
    for (const auto& [t, map] : fields) field_json[std::string(to_string(t))] = map;

    return {{"command", command},
            {"task", task},
            {"languages", langs},
            {"split", to_string(split)},
            {"frame", frame ? nlohmann::json(frame->value()) : nlohmann::json(nullptr)},
            {"frames", frames},
            {"shots", shots},
            {"backend", {{"captioner", captioner}, {"nli", nli}}},
            {"adapters", adapter_json},
            {"decoding", decoding},
            {"decoding_hash", decoding_hash(decoding)},
            {"fewshot", fewshot},
            {"marvl_mapping", to_string(marvl.mapping)},
            {"caption_normalization", marvl.normalize_captions},
            {"data", {{"records", records_pattern}, {"images", images_pattern}, {"stub_images", stub_images},
                      {"fields", field_json}}},
            {"seed", seed},
            {"timestamp", timestamp}};
}

std::string RunConfig::digest() const { return canonical_digest(experiment_json()); }

DatasetManifest RunConfig::manifest(LanguageCode language, Split which) const {
    auto fill = [&](std::string pattern) {
        pattern = substitute(std::move(pattern), "task", std::string(to_string(task)));
        pattern = substitute(std::move(pattern), "split", std::string(to_string(which)));
        return substitute(std::move(pattern), "language", std::string(language.str()));
    };
    DatasetManifest m;
    m.task = task;
    m.language = language;
    m.split = which;
    m.records_path = data_root / fill(records_pattern);
    m.images_root = data_root / fill(images_pattern);
    m.dataset_id = std::string(to_string(task));
    m.stub_images = stub_images;
    if (auto it = fields.find(task); it != fields.end()) m.fields = it->second;
    return m;
}

AdapterSettings RunConfig::adapter_settings(const std::string& name) const {
    auto it = adapters.find(name);
    AdapterSettings s = it == adapters.end() ? AdapterSettings{} : it->second;
    s.emplace("seed", std::to_string(seed));
    return s;
}

void RunConfig::validate() const {
    decoding.validate();
    fewshot.validate();
    if (workers < 1) fail(ErrorCode::UsageError, "--workers must be at least 1");
    for (int f : frames) static_cast<void>(FrameId{f});
}

} // namespace icu
