// Copyright (C) 2026 The ICU Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "test_util.hpp"

#include "icu/caption_store.hpp"
#include "icu/dataset_ingest.hpp"
#include "icu/evaluator.hpp"

using namespace icu;
using namespace icu::testing;

namespace {

using L = LanguageCode;

std::vector<LabeledItem> items(std::initializer_list<NLILabel> labels) {
    std::vector<LabeledItem> out;
    int i = 0;
    for (auto l : labels) out.push_back({"e" + std::to_string(i++), l});
    return out;
}

TaskExample xvnli(const std::string& id, const std::string& img, NLILabel gold, LanguageCode lang) {
    TaskExample e;
    e.task = Task::XVNLI;
    e.language = lang;
    e.example_id = id;
    e.hypothesis_text = "hyp " + id;
    e.images = {image(img)};
    e.gold = gold;
    return e;
}

TaskExample marvl(const std::string& id, const std::string& l, const std::string& r, bool gold, LanguageCode lang) {
    TaskExample e;
    e.task = Task::MARVL;
    e.language = lang;
    e.example_id = id;
    e.hypothesis_text = "claim " + id;
    e.images = {image(l, "marvl"), image(r, "marvl")};
    e.gold = gold;
    return e;
}

struct Rig {
    TempDir dir;
    CaptionCache cache{dir / "c.jsonl"};
    StubCaptioner cap;
    CaptionSource src{cache, cap, {}};
};

} // namespace

TEST_CASE("accuracy") {
    using enum NLILabel;
    CHECK(accuracy(items({Entailment, Neutral, Contradiction}), items({Entailment, Neutral, Neutral})) ==
          doctest::Approx(2.0 / 3.0));
    CHECK(accuracy(items({Entailment}), items({Entailment})) == 1.0);
    CHECK(code_of([] { accuracy(items({Entailment}), items({Entailment, Neutral})); }) == ErrorCode::LengthMismatch);
    auto shuffled = items({Entailment, Neutral});
    std::swap(shuffled[0].example_id, shuffled[1].example_id);
    CHECK(code_of([&] { accuracy(shuffled, items({Entailment, Neutral})); }) == ErrorCode::IdMismatch);
    CHECK(code_of([] { accuracy({}, {}); }) == ErrorCode::PreconditionViolation);

    std::vector<LabeledItem> b{{"a", true}, {"b", false}};
    std::vector<LabeledItem> g{{"a", true}, {"b", true}};
    CHECK(accuracy(b, g) == 0.5);
}

TEST_CASE("accuracy agrees with a brute-force count") {
    std::mt19937_64 rng(1000);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + rng() % 60;
        const bool binary = trial % 2;
        std::vector<LabeledItem> p, g;
        std::size_t hits = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const std::string id = "i" + std::to_string(i);
            Verdict pv = binary ? Verdict{rng() % 2 == 0} : Verdict{label_at(rng() % 3)};
            Verdict gv = binary ? Verdict{rng() % 2 == 0} : Verdict{label_at(rng() % 3)};
            if (pv == gv) ++hits;
            p.push_back({id, pv});
            g.push_back({id, gv});
        }
        CHECK(accuracy(p, g) == static_cast<double>(hits) / static_cast<double>(n));
    }
}

TEST_CASE("macro average reproduces the published averages") {
    const std::map<LanguageCode, double> xvnli{{L::ARB, 0.5800}, {L::SPA, 0.6104}, {L::FRA, 0.6321}, {L::RUS, 0.6139}};
    const std::map<LanguageCode, double> marvl{
        {L::IND, 0.5691}, {L::SWA, 0.5560}, {L::TAM, 0.5789}, {L::TUR, 0.5831}, {L::CMN, 0.5692}};
    const std::map<LanguageCode, double> shots48{{L::ARB, 0.6070}, {L::SPA, 0.6461}, {L::FRA, 0.6261}, {L::RUS, 0.6557}};
    CHECK(std::abs(macro_average(xvnli) * 100 - 60.91) <= 0.005);
    CHECK(std::abs(macro_average(marvl) * 100 - 57.13) <= 0.005);
    CHECK(std::abs(macro_average(shots48) * 100 - 63.37) <= 0.005);
    CHECK(format_percent(macro_average(xvnli)) == "60.91");
    CHECK(format_percent(macro_average(marvl)) == "57.13");
    CHECK(format_percent(macro_average(shots48)) == "63.37");

    CHECK(code_of([] { macro_average({}); }) == ErrorCode::EmptyMap);
}

TEST_CASE("reference rows hold consistent averages") {
    for (auto t : {ReferenceTable::XvnliZeroShot, ReferenceTable::MarvlZeroShot, ReferenceTable::XvnliMaxShot}) {
        for (const auto& row : reference_rows(t)) {
            double sum = 0;
            for (const auto& [l, p] : row.percent) sum += p;
            CAPTURE(row.model);
            CHECK(std::abs(sum / row.percent.size() - row.avg_percent) <= 0.006);
        }
    }
}

TEST_CASE("macro average properties") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int t = 0; t < 200; ++t) {
        std::map<LanguageCode, double> m;
        const std::size_t n = 1 + rng() % 10;
        for (std::size_t i = 0; i < n; ++i) m[L::all[i]] = unit(rng);
        const double avg = macro_average(m);
        double lo = 1, hi = 0, sum = 0;
        for (const auto& [l, a] : m) {
            lo = std::min(lo, a);
            hi = std::max(hi, a);
            sum += a;
        }
        CHECK(avg >= lo - 1e-12);
        CHECK(avg <= hi + 1e-12);
        CHECK(std::abs(avg - sum / n) <= 1e-12);
    }
}

TEST_CASE("best_frame") {
    SweepResult s;
    s.axis = SweepAxis::Frames;
    s.points = {{1, {{L::IND, 0.55}}, 0.55}, {3, {{L::IND, 0.58}}, 0.58}};
    CHECK(best_frame(s).overall == FrameId(3));
    s.points[0].per_language[L::IND] = 0.58;
    s.points[0].macro_avg = 0.58;
    CHECK(best_frame(s).overall == FrameId(1));
    CHECK(best_frame(s).per_language.at(L::IND) == FrameId(1));

    SweepResult empty;
    empty.axis = SweepAxis::Frames;
    CHECK(code_of([&] { best_frame(empty); }) == ErrorCode::EmptySweep);
}

TEST_CASE("best_frame matches a brute-force scan") {
    std::mt19937_64 rng(6);
    const std::array<L, 3> langs{L::IND, L::TUR, L::CMN};
    for (int trial = 0; trial < 200; ++trial) {
        SweepResult s;
        s.axis = SweepAxis::Frames;
        for (int f = 0; f < 6; ++f) {
            SweepPoint p;
            p.value = f;
            // coarse grid so ties happen often
            for (auto l : langs) p.per_language[l] = static_cast<double>(rng() % 5) / 4.0;
            p.macro_avg = macro_average(p.per_language);
            s.points.push_back(p);
        }
        std::shuffle(s.points.begin(), s.points.end(), rng);
        const auto best = best_frame(s);
        for (auto l : langs) {
            int arg = -1;
            double top = -1;
            for (int f = 0; f < 6; ++f) {
                for (const auto& p : s.points) {
                    if (p.value == f && p.per_language.at(l) > top) {
                        top = p.per_language.at(l);
                        arg = f;
                    }
                }
            }
            CHECK(best.per_language.at(l).value() == arg);
        }
        const auto report = best_frame_report(s);
        for (auto l : langs) {
            double top = 0;
            for (const auto& p : s.points) top = std::max(top, p.per_language.at(l));
            CHECK(report.per_language.at(l) == top);
        }
    }
}

TEST_CASE("sweep validation") {
    SweepResult s;
    s.axis = SweepAxis::Shots;
    s.points = {{0, {{L::ARB, 0.5}}, 0.5}, {5, {{L::ARB, 0.6}}, 0.6}};
    CHECK_NOTHROW(s.validate());
    s.points[1].value = 0;
    CHECK(code_of([&] { s.validate(); }) == ErrorCode::PreconditionViolation);
    s.points[1] = {5, {{L::SPA, 0.6}}, 0.6};
    CHECK(code_of([&] { s.validate(); }) == ErrorCode::PreconditionViolation);
    s.axis = SweepAxis::Frames;
    s.points = {{2, {{L::ARB, 0.5}}, 0.5}, {2, {{L::ARB, 0.6}}, 0.6}};
    CHECK(code_of([&] { s.validate(); }) == ErrorCode::PreconditionViolation);
}

TEST_CASE("frame sweep over a premise-keyed stub") {
    Rig rig;
    PerLanguageExamples tests;
    tests[L::TUR] = {marvl("m1", "a", "b", true, L::TUR), marvl("m2", "c", "d", false, L::TUR)};
    StubNLI::FixtureTable table;
    table.emplace(StubNLI::PairKey{"stub caption for a stub caption for b", "claim m1"}, NLIDistribution({0.8, 0.1, 0.1}));
    table.emplace(StubNLI::PairKey{"stub caption for c stub caption for d", "claim m2"}, NLIDistribution({0.1, 0.1, 0.8}));
    StubNLI nli(table, false);

    const std::array<FrameId, 2> frames{FrameId(0), FrameId(2)};
    const auto sweep = sweep_frames(tests, rig.src, frames, nli);
    REQUIRE(sweep.points.size() == 2);
    CHECK(sweep.points[0].per_language.at(L::TUR) == 1.0);
    CHECK(sweep.points[1].per_language.at(L::TUR) == 0.5);  // uniform → false for both
    CHECK(best_frame(sweep).overall == FrameId(0));

    const std::array<FrameId, 1> one{FrameId(2)};
    const auto single = sweep_frames(tests, rig.src, one, nli);
    const auto direct = evaluate(Task::MARVL, tests, rig.src, nli, FrameId(2));
    CHECK(single.points[0].per_language == direct.per_language);
    CHECK(single.points[0].macro_avg == direct.macro_avg);
}

TEST_CASE("shot sweep starts at the zero-shot evaluation") {
    Rig rig;
    PerLanguageExamples tests;
    std::map<LanguageCode, FewShotSplit> splits;
    for (LanguageCode lang : {LanguageCode(L::ARB), LanguageCode(L::SPA)}) {
        std::vector<TaskExample> fs;
        for (int i = 0; i < 12; ++i) {
            const std::string id = std::string(lang.str()) + "fs" + std::to_string(i);
            fs.push_back(xvnli(id, "f" + std::to_string(i / 3), label_at(i % 3), lang));
        }
        splits[lang] = make_fewshot_split(lang, fs);
        for (int i = 0; i < 6; ++i) {
            const std::string id = std::string(lang.str()) + "t" + std::to_string(i);
            // test items reuse few-shot pairs so tuning can help
            tests[lang].push_back(xvnli(id, "f" + std::to_string(i / 3), label_at(i % 3), lang));
            tests[lang].back().hypothesis_text = "hyp " + std::string(lang.str()) + "fs" + std::to_string(i);
        }
    }
    auto base = std::make_shared<StubNLI>();
    const std::array<int, 3> shots{0, 1, 2};
    std::vector<FewShotRun> runs;
    const auto sweep = sweep_shots(shots, splits, tests, base, rig.src, {}, {}, &runs);
    REQUIRE(sweep.points.size() == 3);
    const auto zero = evaluate(Task::XVNLI, tests, rig.src, *base, std::nullopt);
    CHECK(sweep.points[0].per_language == zero.per_language);
    CHECK(sweep.points[0].macro_avg == zero.macro_avg);
    CHECK(sweep.points[1].macro_avg == doctest::Approx(4.0 / 6.0));
    CHECK(sweep.points[2].macro_avg == 1.0);
    CHECK(runs.size() == 6);
    CHECK(runs[0].training_triples == 0);
    CHECK(base->fixtures().empty());

    const std::array<int, 1> too_many{5};
    CHECK(code_of([&] { sweep_shots(too_many, splits, tests, base, rig.src, {}); }) == ErrorCode::NotEnoughShots);
}

TEST_CASE("score_predictions") {
    Rig rig;
    std::vector<TaskExample> gold{xvnli("a", "i", NLILabel::Neutral, L::ARB), xvnli("b", "i", NLILabel::Neutral, L::SPA)};
    StubNLI nli;
    auto preds = predict_all(gold, rig.src, nli, std::nullopt);
    const auto acc = score_predictions(preds, gold);
    CHECK(acc.at(L::ARB) == 0.0);  // uniform → entailment
    preds.pop_back();
    CHECK(code_of([&] { score_predictions(preds, gold); }) == ErrorCode::IdMismatch);
}

TEST_CASE("report rendering") {
    auto r = make_report(Task::XVNLI, {{L::ARB, 0.5}, {L::SPA, 0.25}}, std::nullopt, 0, {{"seed", 0}});
    CHECK(r.macro_avg == 0.375);
    const auto csv = render_report(r, ReportFormat::Csv);
    CHECK(csv == "task,frame,shots,ARB,SPA,avg\nxvnli,,0,0.5,0.25,0.375\n");
    const auto json = render_report(r, ReportFormat::Json);
    CHECK(eval_report_from_json(nlohmann::json::parse(json)) == r);

    SweepResult s;
    s.axis = SweepAxis::Shots;
    s.points = {{0, {{L::ARB, 0.5}}, 0.5}, {48, {{L::ARB, 0.75}}, 0.75}};
    const auto scsv = render_report(s, ReportFormat::Csv);
    CHECK(scsv == "shots,ARB,avg\n0,0.5,0.5\n48,0.75,0.75\n");
    CHECK(std::count(scsv.begin(), scsv.end(), '\n') == 3);

    TempDir dir;
    emit_report(s, ReportFormat::Csv, dir / "a.csv");
    emit_report(s, ReportFormat::Csv, dir / "b.csv");
    CHECK(read_file(dir / "a.csv") == read_file(dir / "b.csv"));
    CHECK(read_file(dir / "a.csv") == scsv);
    CHECK(parse_report_format("csv") == ReportFormat::Csv);
    CHECK(code_of([] { parse_report_format("xml"); }) == ErrorCode::UsageError);
}

TEST_CASE("comparison table lists published rows and runs") {
    auto r = make_report(Task::XVNLI, {{L::ARB, 0.58}, {L::SPA, 0.6104}, {L::FRA, 0.6321}, {L::RUS, 0.6139}},
                         std::nullopt, 0);
    const std::vector<EvalReport> runs{r};
    const auto md = render_comparison(ReferenceTable::XvnliZeroShot, runs);
    CHECK(md.find("| UC2 |") != std::string::npos);
    CHECK(md.find("60.91") != std::string::npos);
    CHECK(md.find("this run") != std::string::npos);
}
