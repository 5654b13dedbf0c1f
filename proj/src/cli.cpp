// Copyright (C) 2026 The ICU Authors
// SPDX-License-Identifier: Apache-2.0

#include "icu/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"

#include "icu/caption_store.hpp"
#include "icu/digest.hpp"
#include "icu/evaluator.hpp"
#include "icu/fewshot_trainer.hpp"
#include "icu/http_backends.hpp"
#include "icu/run_config.hpp"

namespace icu {

namespace {

struct Flags {
    std::optional<std::string> config, fewshot_config;
    std::optional<std::string> task, language, split, frame, frames, shots;
    std::optional<std::string> captioner, nli, marvl_mapping;
    std::optional<std::string> caption_cache, data_root, out_dir, predictions, gold, inputs;
    std::optional<std::int64_t> seed;
    std::optional<int> workers;
    std::optional<std::string> timestamp;
    bool no_caption_normalization = false;
};

void add_options(CLI::App& sub, Flags& f) {
    sub.add_option("--config", f.config, "Run config file ([section] key = value)");
    sub.add_option("--fewshot-config", f.fewshot_config, "Config file holding a [fewshot] section");
    sub.add_option("--task", f.task, "xvnli | marvl");
    sub.add_option("--language,--languages", f.language, "Language code(s), comma separated (e.g. arb,spa)");
    sub.add_option("--split", f.split, "test | fewshot");
    sub.add_option("--frame", f.frame, "Frame id 0..5 (MaRVL)");
    sub.add_option("--frames", f.frames, "Frame list, e.g. 0-5 or 0,2,4");
    sub.add_option("--shots", f.shots, "Shot count or ascending list, e.g. 0,1,5,10,20,48");
    sub.add_option("--backend-captioner", f.captioner, "stub-captioner | http-captioner");
    sub.add_option("--backend-nli", f.nli, "stub-nli | http-nli");
    sub.add_option("--marvl-mapping", f.marvl_mapping,
                   "entail-vs-contradiction | entailment-argmax | entail-vs-rest");
    sub.add_flag("--no-caption-normalization", f.no_caption_normalization,
                 "Insert captions into frames without trimming trailing periods");
    sub.add_option("--caption-cache", f.caption_cache, "Caption cache JSONL path");
    sub.add_option("--data-root", f.data_root, "Dataset root (falls back to $ICU_DATA_ROOT)");
    sub.add_option("--out-dir", f.out_dir, "Directory for all outputs");
    sub.add_option("--predictions", f.predictions, "predictions.jsonl to evaluate");
    sub.add_option("--gold", f.gold, "Gold records JSONL");
    sub.add_option("--inputs", f.inputs, "Comma-separated report.json files (report)");
    sub.add_option("--seed", f.seed, "Top-level seed");
    sub.add_option("--workers", f.workers, "Parallel prediction workers");
    sub.add_option("--timestamp", f.timestamp, "Timestamp recorded in metadata");
}

std::string iso_utc(std::time_t t) {
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// Flag values are user input: their validation failures are usage errors.
template <typename Fn>
void as_usage(Fn&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        if (e.category() == ErrorCategory::Usage) throw;
        fail(ErrorCode::UsageError, e.what());
    }
}

RunConfig resolve_config(const std::string& command, const Flags& f) {
    RunConfig cfg;
    cfg.command = command;
    if (const char* root = std::getenv("ICU_DATA_ROOT")) cfg.data_root = root;
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
        try {
            cfg.timestamp = iso_utc(static_cast<std::time_t>(std::stoll(epoch)));
        } catch (const std::exception&) {
            fail(ErrorCode::UsageError, std::string("SOURCE_DATE_EPOCH is not an integer: ") + epoch);
        }
    }
    if (f.config) cfg.apply(load_config_file(*f.config));
    if (f.fewshot_config) {
        FlatConfig fs = load_config_file(*f.fewshot_config);
        for (const auto& [key, value] : fs) {
            if (key.rfind("fewshot.", 0) != 0) {
                fail(ErrorCode::InvalidConfig, "--fewshot-config may only hold [fewshot] keys, found " + key);
            }
        }
        cfg.apply(fs);
    }

    as_usage([&] {
        if (f.task) cfg.task = parse_task(*f.task);
        if (f.language) {
            cfg.languages.clear();
            std::string item;
            std::istringstream in(*f.language);
            while (std::getline(in, item, ',')) {
                if (!trim(item).empty()) cfg.languages.push_back(LanguageCode::parse(trim(item)));
            }
        }
        if (f.split) cfg.split = parse_split(*f.split);
        if (f.frame) {
            const auto v = parse_int_list(*f.frame);
            if (v.size() != 1) fail(ErrorCode::UsageError, "--frame takes a single frame id");
            cfg.frame = FrameId(v.front());
        }
        if (f.frames) cfg.frames = parse_int_list(*f.frames);
        if (f.shots) cfg.shots = parse_int_list(*f.shots);
        if (f.captioner) cfg.captioner = *f.captioner;
        if (f.nli) cfg.nli = *f.nli;
        if (f.marvl_mapping) cfg.marvl.mapping = parse_marvl_mapping(*f.marvl_mapping);
        if (f.no_caption_normalization) cfg.marvl.normalize_captions = false;
        if (f.caption_cache) cfg.caption_cache = *f.caption_cache;
        if (f.data_root) cfg.data_root = *f.data_root;
        if (f.out_dir) cfg.out_dir = *f.out_dir;
        if (f.predictions) cfg.predictions = *f.predictions;
        if (f.gold) cfg.gold = *f.gold;
        if (f.inputs) {
            cfg.inputs.clear();
            std::string item;
            std::istringstream in(*f.inputs);
            while (std::getline(in, item, ',')) {
                if (!trim(item).empty()) cfg.inputs.emplace_back(std::string(trim(item)));
            }
        }
        if (f.seed) {
            cfg.seed = *f.seed;
            cfg.fewshot.seed = *f.seed;
        }
        if (f.workers) cfg.workers = *f.workers;
        if (f.timestamp) cfg.timestamp = *f.timestamp;
        cfg.validate();
    });

    if (cfg.out_dir.empty()) fail(ErrorCode::UsageError, "--out-dir is required");
    if (cfg.caption_cache.empty()) cfg.caption_cache = cfg.out_dir / "caption_cache.jsonl";
    return cfg;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::IoFailure, "cannot write " + path.string());
    out << text;
    out.flush();
    if (!out) fail(ErrorCode::IoFailure, "short write to " + path.string());
}

class Session {
public:
    explicit Session(RunConfig cfg) : cfg_(std::move(cfg)) {
        std::error_code ec;
        std::filesystem::create_directories(cfg_.out_dir, ec);
        if (ec) fail(ErrorCode::IoFailure, "cannot create " + cfg_.out_dir.string() + ": " + ec.message());
    }

    const RunConfig& cfg() const { return cfg_; }

    CaptionerBackend& captioner() {
        if (!captioner_) captioner_ = make_captioner(cfg_.captioner, cfg_.adapter_settings(cfg_.captioner));
        return *captioner_;
    }

    const std::shared_ptr<NLIBackend>& nli() {
        if (!nli_) nli_ = make_nli(cfg_.nli, cfg_.adapter_settings(cfg_.nli));
        return nli_;
    }

    CaptionCache& cache() {
        if (!cache_) cache_ = std::make_unique<CaptionCache>(cfg_.caption_cache);
        return *cache_;
    }

    CaptionSource captions() { return CaptionSource{cache(), captioner(), cfg_.decoding}; }

    EvalOptions eval_options() const { return EvalOptions{cfg_.marvl, cfg_.workers}; }

    void flush_cache() {
        if (cache_) cache_->flush();
    }

    std::vector<LanguageCode> languages() const {
        if (cfg_.languages.empty()) fail(ErrorCode::UsageError, "--language is required");
        std::set<LanguageCode> unique(cfg_.languages.begin(), cfg_.languages.end());
        return {unique.begin(), unique.end()};
    }

    PerLanguageExamples load(Split split) const {
        if (cfg_.data_root.empty()) fail(ErrorCode::UsageError, "--data-root (or ICU_DATA_ROOT) is required");
        PerLanguageExamples out;
        for (auto lang : languages()) out.emplace(lang, load_split(cfg_.manifest(lang, split)));
        return out;
    }

    nlohmann::json metadata() {
        return {{"captioner", captioner().backend_id()},
                {"nli", nli()->backend_id()},
                {"decoding_hash", decoding_hash(cfg_.decoding)},
                {"fewshot_config_hash", canonical_digest(nlohmann::json(cfg_.fewshot))},
                {"run_config", cfg_.experiment_json()},
                {"run_config_digest", cfg_.digest()},
                {"seed", cfg_.seed},
                {"timestamp", cfg_.timestamp},
                {"marvl_mapping", to_string(cfg_.marvl.mapping)},
                {"caption_normalization", cfg_.marvl.normalize_captions}};
    }

    std::filesystem::path out(const std::string& name) const { return cfg_.out_dir / name; }

private:
    RunConfig cfg_;
    std::unique_ptr<CaptionerBackend> captioner_;
    std::shared_ptr<NLIBackend> nli_;
    std::unique_ptr<CaptionCache> cache_;
};

int cmd_caption(Session& s, std::ostream& out) {
    const auto sets = s.load(s.cfg().split);
    const auto source = s.captions();
    std::map<std::string, Caption> produced;
    for (const auto& [lang, examples] : sets) {
        for (const auto& ex : examples) {
            for (const auto& img : ex.images) {
                Caption c = source.caption_for(img);
                produced.emplace(CaptionCache::key_for(c), std::move(c));
            }
        }
    }
    std::string lines;
    for (const auto& [key, c] : produced) lines += nlohmann::json(c).dump() + "\n";
    write_text(s.out("captions.jsonl"), lines);
    s.flush_cache();
    out << "captioned " << produced.size() << " images (cache hits " << s.cache().hit_count() << ", misses "
        << s.cache().miss_count() << ")\n";
    return 0;
}

int cmd_predict(Session& s, std::ostream& out) {
    const RunConfig& cfg = s.cfg();
    if (cfg.task == Task::MARVL && !cfg.frame) fail(ErrorCode::UsageError, "MaRVL prediction needs --frame");
    const std::optional<FrameId> frame = cfg.task == Task::MARVL ? cfg.frame : std::nullopt;
    const auto sets = s.load(cfg.split);
    const std::string digest = cfg.digest();
    std::string lines;
    std::size_t count = 0;
    for (const auto& [lang, examples] : sets) {
        const auto preds = predict_all(examples, s.captions(), *s.nli(), frame, cfg.marvl, cfg.workers);
        for (const auto& p : preds) {
            nlohmann::json j = to_json(p);
            j["run_config_digest"] = digest;
            lines += j.dump() + "\n";
            ++count;
        }
    }
    write_text(s.out("predictions.jsonl"), lines);
    s.flush_cache();
    out << "wrote " << count << " predictions to " << s.out("predictions.jsonl").string() << "\n";
    return 0;
}

std::vector<PredictionRecord> read_predictions(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorCode::IoFailure, "cannot open predictions " + path.string());
    std::vector<PredictionRecord> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        try {
            out.push_back(prediction_from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            fail(ErrorCode::ParseError, path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        } catch (const Error& e) {
            fail(e.code(), path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

int cmd_evaluate(Session& s, std::ostream& out) {
    const RunConfig& cfg = s.cfg();
    const auto pred_path = cfg.predictions.empty() ? s.out("predictions.jsonl") : cfg.predictions;
    auto preds = read_predictions(pred_path);

    std::vector<TaskExample> golds;
    if (!cfg.gold.empty()) {
        DatasetManifest m = cfg.manifest(LanguageCode::ENG, cfg.split);
        m.language.reset();
        m.records_path = cfg.gold;
        m.stub_images = true;
        golds = load_split(m);
    } else {
        for (auto& [lang, examples] : s.load(cfg.split)) {
            golds.insert(golds.end(), examples.begin(), examples.end());
        }
    }
    if (!cfg.languages.empty()) {
        const std::set<LanguageCode> keep(cfg.languages.begin(), cfg.languages.end());
        std::erase_if(golds, [&](const TaskExample& g) { return !keep.count(g.language); });
        std::erase_if(preds, [&](const PredictionRecord& p) { return !keep.count(p.language); });
    }
    for (const auto& p : preds) {
        if (p.task != cfg.task) {
            fail(ErrorCode::PreconditionViolation, "prediction '" + p.example_id + "' is for task " +
                                                       std::string(to_string(p.task)));
        }
    }

    std::optional<FrameId> frame = cfg.frame;
    if (!frame && !preds.empty() && preds.front().frame) {
        const bool uniform = std::all_of(preds.begin(), preds.end(), [&](const auto& p) { return p.frame == preds.front().frame; });
        if (uniform) frame = preds.front().frame;
    }
    const EvalReport report = make_report(cfg.task, score_predictions(preds, golds), frame, std::nullopt, s.metadata());
    emit_report(report, ReportFormat::Json, s.out("report.json"));
    for (const auto& [lang, acc] : report.per_language) out << lang.str() << ' ' << format_percent(acc) << "\n";
    out << "avg " << format_percent(report.macro_avg) << "\n";
    return 0;
}

int cmd_fewshot(Session& s, std::ostream& out) {
    const RunConfig& cfg = s.cfg();
    if (cfg.task != Task::XVNLI) fail(ErrorCode::UsageError, "few-shot adaptation is only available for xvnli");
    if (cfg.shots.size() != 1) fail(ErrorCode::UsageError, "fewshot takes a single --shots value");
    const int shots = cfg.shots.front();
    if (shots < 0) fail(ErrorCode::UsageError, "--shots must be non-negative");

    const auto fewshot_sets = s.load(Split::FewShot);
    const auto tests = s.load(Split::Test);
    auto metadata = s.metadata();

    nlohmann::json runs = nlohmann::json::array();
    std::map<LanguageCode, double> per_language;
    for (const auto& [lang, samples] : fewshot_sets) {
        const FewShotSplit split = make_fewshot_split(lang, samples);
        auto outcome = run_fewshot(lang, static_cast<std::size_t>(shots), split, s.nli(), s.captions(), cfg.fewshot);

        std::string artifact = outcome.run.tuned_nli_id;
        if (shots > 0) {
            if (const auto* stub = dynamic_cast<const StubNLI*>(outcome.nli.get())) {
                artifact = "tuned_nli_" + std::string(lang.str()) + "_" + std::to_string(shots) + "shots.json";
                stub->save(s.out(artifact));
            }
        }
        nlohmann::json run = outcome.run;
        run["tuned_backend_artifact"] = artifact;
        if (const auto* http = dynamic_cast<const HttpNLI*>(outcome.nli.get())) {
            run["resolved_training_settings"] = http->resolved_training_settings();
        }
        runs.push_back(run);

        const PerLanguageExamples single{{lang, tests.at(lang)}};
        const EvalReport r = evaluate(Task::XVNLI, single, s.captions(), *outcome.nli, std::nullopt, s.eval_options());
        per_language.emplace(lang, r.per_language.at(lang));
    }

    write_text(s.out("fewshot_run.json"), nlohmann::json({{"runs", runs}, {"metadata", metadata}}).dump(2) + "\n");
    const EvalReport report = make_report(Task::XVNLI, per_language, std::nullopt, shots, metadata);
    emit_report(report, ReportFormat::Json, s.out("report.json"));
    s.flush_cache();
    for (const auto& [lang, acc] : report.per_language) out << lang.str() << ' ' << format_percent(acc) << "\n";
    out << "avg " << format_percent(report.macro_avg) << "\n";
    return 0;
}

int cmd_sweep_shots(Session& s, std::ostream& out) {
    const RunConfig& cfg = s.cfg();
    if (cfg.task != Task::XVNLI) fail(ErrorCode::UsageError, "sweep-shots is only available for xvnli");
    std::map<LanguageCode, FewShotSplit> splits;
    for (const auto& [lang, samples] : s.load(Split::FewShot)) splits.emplace(lang, make_fewshot_split(lang, samples));
    const auto tests = s.load(Split::Test);

    std::vector<FewShotRun> runs;
    SweepResult sweep = sweep_shots(cfg.shots, splits, tests, s.nli(), s.captions(), cfg.fewshot, s.eval_options(), &runs);
    sweep.metadata = s.metadata();
    sweep.metadata["fewshot_runs"] = runs;

    emit_report(sweep, ReportFormat::Csv, s.out("sweep_shots.csv"));
    emit_report(sweep, ReportFormat::Json, s.out("sweep_shots.json"));
    s.flush_cache();
    out << render_report(sweep, ReportFormat::Csv);
    return 0;
}

int cmd_sweep_frames(Session& s, std::ostream& out) {
    const RunConfig& cfg = s.cfg();
    if (cfg.task != Task::MARVL) fail(ErrorCode::UsageError, "sweep-frames is only available for marvl");
    std::vector<FrameId> frames;
    for (int f : cfg.frames) frames.emplace_back(f);
    const auto tests = s.load(cfg.split);

    SweepResult sweep = sweep_frames(tests, s.captions(), frames, *s.nli(), s.eval_options());
    auto metadata = s.metadata();
    const BestFrames best = best_frame(sweep);
    nlohmann::json per_language = nlohmann::json::object();
    for (const auto& [lang, frame] : best.per_language) per_language[std::string(lang.str())] = frame.value();
    sweep.metadata = metadata;
    sweep.metadata["best_frames"] = per_language;
    sweep.metadata["best_frame_overall"] = best.overall.value();

    emit_report(sweep, ReportFormat::Csv, s.out("sweep_frames.csv"));
    emit_report(sweep, ReportFormat::Json, s.out("sweep_frames.json"));
    emit_report(best_frame_report(sweep, metadata), ReportFormat::Json, s.out("report_best_frame.json"));
    s.flush_cache();
    out << render_report(sweep, ReportFormat::Csv);
    return 0;
}

int cmd_report(Session& s, std::ostream& out) {
    const RunConfig& cfg = s.cfg();
    if (cfg.inputs.empty()) fail(ErrorCode::UsageError, "report needs --inputs report.json[,...]");
    std::map<ReferenceTable, std::vector<EvalReport>> grouped;
    for (const auto& path : cfg.inputs) {
        std::ifstream in(path, std::ios::binary);
        if (!in) fail(ErrorCode::IoFailure, "cannot open " + path.string());
        EvalReport r;
        try {
            r = eval_report_from_json(nlohmann::json::parse(in));
        } catch (const nlohmann::json::exception& e) {
            fail(ErrorCode::ParseError, path.string() + ": " + e.what());
        }
        const ReferenceTable table = r.task == Task::MARVL         ? ReferenceTable::MarvlZeroShot
                                     : (r.shots && *r.shots > 0) ? ReferenceTable::XvnliMaxShot
                                                                  : ReferenceTable::XvnliZeroShot;
        grouped[table].push_back(std::move(r));
    }
    std::string md;
    for (const auto& [table, runs] : grouped) {
        md += table == ReferenceTable::XvnliZeroShot   ? "## XVNLI zero-shot accuracy (%)\n\n"
              : table == ReferenceTable::MarvlZeroShot ? "## MaRVL zero-shot accuracy (%)\n\n"
                                                       : "## XVNLI max-shot accuracy (%)\n\n";
        md += render_comparison(table, runs) + "\n";
    }
    write_text(s.out("comparison.md"), md);
    out << md;
    return 0;
}

std::string one_line(std::string text) {
    for (char& c : text) {
        if (c == '\n' || c == '\r') c = ' ';
    }
    return text;
}

int report_error(std::ostream& err, std::string_view code, int exit_code, const std::string& message) {
    err << "icu: error=" << code << " exit=" << exit_code << " message=" << one_line(message) << "\n";
    return exit_code;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Two-stage multilingual vision-and-language evaluation (caption, then cross-lingual NLI)", "icu"};
    app.require_subcommand(1);
    Flags flags;
    const std::vector<std::pair<std::string, std::string>> commands{
        {"caption", "Caption every image of a split into the caption cache"},
        {"predict", "Predict a task split through captions and NLI"},
        {"evaluate", "Score predictions against gold labels"},
        {"fewshot", "Few-shot adapt the NLI backend per language and evaluate"},
        {"sweep-shots", "Accuracy across shot counts"},
        {"sweep-frames", "Accuracy across caption frames"},
        {"report", "Compare report.json files with published results"},
    };
    for (const auto& [name, help] : commands) add_options(*app.add_subcommand(name, help), flags);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        return report_error(err, "UsageError", 2, e.what());
    }

    const CLI::App* sub = app.get_subcommands().front();
    try {
        Session session(resolve_config(sub->get_name(), flags));
        const std::string& name = sub->get_name();
        if (name == "caption") return cmd_caption(session, out);
        if (name == "predict") return cmd_predict(session, out);
        if (name == "evaluate") return cmd_evaluate(session, out);
        if (name == "fewshot") return cmd_fewshot(session, out);
        if (name == "sweep-shots") return cmd_sweep_shots(session, out);
        if (name == "sweep-frames") return cmd_sweep_frames(session, out);
        return cmd_report(session, out);
    } catch (const Error& e) {
        return report_error(err, to_string(e.code()), exit_code_for(e.category()), e.what());
    } catch (const nlohmann::json::exception& e) {
        return report_error(err, "ParseError", 3, e.what());
    } catch (const std::exception& e) {
        return report_error(err, "InternalError", 1, e.what());
    }
}

} // namespace icu
