// Copyright (C) 2026 The ICU Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdlib>
#include <set>

#include "doctest.h"
#include "test_util.hpp"

#include "icu/cli.hpp"

using namespace icu;
using namespace icu::testing;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = ICU_FIXTURES_DIR;
const fs::path kConfigs = ICU_CONFIGS_DIR;

struct Result {
    int rc;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int rc = run_cli(args, out, err);
    return {rc, out.str(), err.str()};
}

/// Three XVNLI records with image files on disk.
fs::path make_data_root(const TempDir& dir) {
    const fs::path root = dir / "data";
    write_file(root / "xvnli" / "test" / "ARB.jsonl",
               R"({"example_id":"a","image_id":"i1","hypothesis":"h1","label":"entailment","language":"ARB"})" "\n"
               R"({"example_id":"b","image_id":"i2","hypothesis":"h2","label":"neutral","language":"ARB"})" "\n"
               R"({"example_id":"c","image_id":"i1","hypothesis":"h3","label":"contradiction","language":"ARB"})" "\n");
    write_file(root / "xvnli" / "images" / "i1.jpg", "jpeg");
    write_file(root / "xvnli" / "images" / "i2.jpg", "jpeg");
    return root;
}

std::vector<std::string> base_args(const std::string& cmd, const fs::path& root, const fs::path& out) {
    return {cmd,          "--task",         "xvnli",          "--language",  "ARB",
            "--data-root", root.string(),   "--out-dir",      out.string(),  "--backend-captioner",
            "stub-captioner", "--backend-nli", "stub-nli"};
}

std::size_t count_lines(const std::string& text) { return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')); }

} // namespace

TEST_CASE("predict writes one record per example") {
    TempDir dir;
    const auto root = make_data_root(dir);
    const auto res = run(base_args("predict", root, dir / "out"));
    CHECK_MESSAGE(res.rc == 0, res.err);
    const std::string preds = read_file(dir / "out" / "predictions.jsonl");
    CHECK(count_lines(preds) == 3);
    std::istringstream in(preds);
    std::string line;
    std::getline(in, line);
    const auto j = nlohmann::json::parse(line);
    CHECK(j["example_id"] == "a");
    CHECK(j["premise_used"] == "stub caption for i1");
    CHECK(j.contains("run_config_digest"));

    // the cache defaults to the output directory; nothing else is written
    std::set<std::string> names;
    for (const auto& e : fs::directory_iterator(dir / "out")) names.insert(e.path().filename().string());
    CHECK(names == std::set<std::string>{"caption_cache.jsonl", "predictions.jsonl"});
    CHECK(count_lines(read_file(dir / "out" / "caption_cache.jsonl")) == 2);
}

TEST_CASE("data root falls back to ICU_DATA_ROOT") {
    TempDir dir;
    const auto root = make_data_root(dir);
    ::setenv("ICU_DATA_ROOT", root.c_str(), 1);
    const auto res = run({"predict", "--task", "xvnli", "--language", "ARB", "--out-dir", (dir / "out").string(),
                          "--backend-captioner", "stub-captioner", "--backend-nli", "stub-nli"});
    ::unsetenv("ICU_DATA_ROOT");
    CHECK_MESSAGE(res.rc == 0, res.err);
    CHECK(fs::exists(dir / "out" / "predictions.jsonl"));
}

TEST_CASE("usage errors exit 2") {
    TempDir dir;
    const auto root = make_data_root(dir);
    auto args = base_args("predict", root, dir / "out");
    args.insert(args.end(), {"--frame", "9"});
    const auto res = run(args);
    CHECK(res.rc == 2);
    CHECK(res.err.rfind("icu: error=InvalidFrame exit=2 message=", 0) == 0);

    CHECK(run({}).rc == 2);
    CHECK(run({"translate"}).rc == 2);
    CHECK(run({"predict", "--bogus"}).rc == 2);
    CHECK(run({"predict", "--task", "vqa", "--out-dir", (dir / "o").string()}).rc == 2);
    CHECK(run({"predict", "--task", "xvnli", "--language", "KLI", "--out-dir", (dir / "o").string()}).err.find(
              "error=InvalidLanguage") != std::string::npos);

    auto marvl = base_args("fewshot", root, dir / "out");
    marvl[2] = "marvl";
    CHECK(run(marvl).rc == 2);

    write_file(dir / "bad.conf", "[run]\ntask = xvnli\ncolour = blue\n");
    const auto bad = run({"predict", "--config", (dir / "bad.conf").string(), "--out-dir", (dir / "o").string()});
    CHECK(bad.rc == 2);
    CHECK(bad.err.find("error=InvalidConfig") != std::string::npos);
}

TEST_CASE("data errors exit 3, backend errors exit 4") {
    TempDir dir;
    const auto root = make_data_root(dir);
    auto args = base_args("predict", root, dir / "out");
    args[4] = "SPA";  // no SPA records
    CHECK(run(args).rc == 3);


    auto unknown = base_args("predict", root, dir / "out");
    unknown[10] = "blip2";
    const auto res = run(unknown);
    CHECK(res.rc == 4);
    CHECK(res.err.find("error=UnknownBackend") != std::string::npos);

    fs::remove(root / "xvnli" / "images" / "i2.jpg");
    const auto missing = run(base_args("predict", root, dir / "out"));
    CHECK(missing.rc == 3);
    CHECK(missing.err.find("error=MissingImage") != std::string::npos);
}

TEST_CASE("evaluate scores predictions against gold") {
    TempDir dir;
    const auto res = run({"evaluate", "--task", "xvnli", "--predictions",
                          (kFixtures / "evaluate" / "predictions.jsonl").string(), "--gold",
                          (kFixtures / "evaluate" / "gold.jsonl").string(), "--out-dir", (dir / "out").string()});
    CHECK_MESSAGE(res.rc == 0, res.err);
    const auto report = nlohmann::json::parse(read_file(dir / "out" / "report.json"));
    CHECK(report["per_language"]["ARB"].get<double>() == doctest::Approx(2.0 / 3.0));
    CHECK(report["macro_avg"].get<double>() == doctest::Approx(2.0 / 3.0));
    CHECK(res.out.find("ARB 66.67") != std::string::npos);
}

TEST_CASE("predict then evaluate through the data root") {
    TempDir dir;
    const auto root = make_data_root(dir);
    REQUIRE(run(base_args("predict", root, dir / "out")).rc == 0);
    auto args = base_args("evaluate", root, dir / "out");
    args.insert(args.end(), {"--predictions", (dir / "out" / "predictions.jsonl").string()});
    const auto res = run(args);
    CHECK_MESSAGE(res.rc == 0, res.err);
    const auto report = nlohmann::json::parse(read_file(dir / "out" / "report.json"));
    CHECK(report["task"] == "xvnli");
    CHECK(report["metadata"]["captioner"] == "stub-captioner");
    CHECK(report["metadata"]["nli"] == "stub-nli");
    CHECK(report["metadata"].contains("decoding_hash"));
    CHECK(report["metadata"].contains("run_config_digest"));
}

TEST_CASE("fixture configs drive every command") {
    TempDir dir;
    const auto out = (dir / "out").string();
    const auto conf = [](const char* name) { return (kConfigs / "fixtures" / name).string(); };

    CHECK(run({"caption", "--config", conf("zero_shot_xvnli.conf"), "--out-dir", out}).rc == 0);
    CHECK(count_lines(read_file(dir / "out" / "captions.jsonl")) == 4);

    auto sf = run({"sweep-frames", "--config", conf("sweep_frames.conf"), "--out-dir", out});
    CHECK_MESSAGE(sf.rc == 0, sf.err);
    CHECK(count_lines(read_file(dir / "out" / "sweep_frames.csv")) == 7);
    CHECK(fs::exists(dir / "out" / "report_best_frame.json"));

    auto ss = run({"sweep-shots", "--config", conf("sweep_shots.conf"), "--out-dir", out});
    CHECK_MESSAGE(ss.rc == 0, ss.err);
    CHECK(read_file(dir / "out" / "sweep_shots.csv").rfind("shots,", 0) == 0);

    auto fsr = run({"fewshot", "--config", conf("fewshot_xvnli_48.conf"), "--fewshot-config",
                    (kConfigs / "fewshot.conf").string(), "--out-dir", out});
    CHECK_MESSAGE(fsr.rc == 0, fsr.err);
    CHECK(fs::exists(dir / "out" / "fewshot_run.json"));
    CHECK(fs::exists(dir / "out" / "tuned_nli_ARB_48shots.json"));
    const auto run_json = nlohmann::json::parse(read_file(dir / "out" / "fewshot_run.json"));
    for (const auto& r : run_json["runs"]) CHECK(r["captioner_calls_fine_tune"] == 0);

    auto rep = run({"report", "--task", "xvnli", "--inputs", (dir / "out" / "report.json").string(), "--out-dir", out});
    CHECK_MESSAGE(rep.rc == 0, rep.err);
    CHECK(read_file(dir / "out" / "comparison.md").find("ICU (published)") != std::string::npos);
}
