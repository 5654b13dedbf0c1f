// Copyright (C) 2026 The ICU Authors
// SPDX-License-Identifier: Apache-2.0

#include <set>
#include <thread>
#include <vector>

#include "doctest.h"
#include "test_util.hpp"

#include "icu/caption_store.hpp"

using namespace icu;
using namespace icu::testing;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

} // namespace

TEST_CASE("miss then hit") {
    TempDir dir;
    CaptionCache cache(dir / "c.jsonl");
    StubCaptioner cap;
    const DecodingConfig cfg;
    const Caption first = cache.get_or_generate(cap, image("img_1"), cfg);
    CHECK(cap.invocation_count() == 1);
    const Caption second = cache.get_or_generate(cap, image("img_1"), cfg);
    CHECK(cap.invocation_count() == 1);
    CHECK(first == second);
    CHECK(cache.hit_count() == 1);
    CHECK(cache.miss_count() == 1);

    cache.get_or_generate(cap, image("img_2"), cfg);
    CHECK(cap.invocation_count() == 2);
    CHECK(cache.size() == 2);

    SUBCASE("a different decoding config is a different key") {
        DecodingConfig beam4;
        beam4.beam_size = 4;
        cache.get_or_generate(cap, image("img_1"), beam4);
        CHECK(cap.invocation_count() == 3);
    }
    SUBCASE("the same image id in another dataset is a different key") {
        cache.get_or_generate(cap, image("img_1", "marvl"), cfg);
        CHECK(cap.invocation_count() == 3);
    }
}

TEST_CASE("random lookups over ten images generate ten captions") {
    TempDir dir;
    CaptionCache cache(dir / "c.jsonl");
    StubCaptioner cap;
    std::mt19937_64 rng(5);
    for (int i = 0; i < 10; ++i) cache.get_or_generate(cap, image("img_" + std::to_string(i)), {});
    for (int i = 0; i < 90; ++i) cache.get_or_generate(cap, image("img_" + std::to_string(rng() % 10)), {});
    CHECK(cap.invocation_count() == 10);
    CHECK(cache.hit_count() + cache.miss_count() == 100);
    CHECK(cache.miss_count() == 10);
}

TEST_CASE("flush and reopen") {
    TempDir dir;
    const auto path = dir / "c.jsonl";
    StubCaptioner cap;
    {
        CaptionCache cache(path);
        for (const char* id : {"c", "a", "b"}) cache.get_or_generate(cap, image(id), {});
        CHECK(cache.flush() == 3);
    }
    const std::string bytes = read_file(path);
    CHECK(lines_of(bytes).size() == 3);

    CaptionCache reopened(path);
    CHECK(reopened.size() == 3);
    CHECK(reopened.find(CaptionCache::key_for("stub-captioner", decoding_hash({}), "xvnli", "a"))->text ==
          "stub caption for a");
    reopened.flush();
    CHECK(read_file(path) == bytes);

    // keys are sorted in the file
    std::vector<std::string> keys;
    for (const auto& line : lines_of(bytes)) keys.push_back(nlohmann::json::parse(line).at("key"));
    CHECK(std::is_sorted(keys.begin(), keys.end()));

    SUBCASE("append one more and flush") {
        reopened.get_or_generate(cap, image("d"), {});
        CHECK(reopened.flush() == 4);
        std::set<std::string> unique;
        for (const auto& line : lines_of(read_file(path))) unique.insert(nlohmann::json::parse(line).at("key").get<std::string>());
        CHECK(unique.size() == 4);
    }
}

TEST_CASE("empty cache flushes to a valid empty file") {
    TempDir dir;
    CaptionCache cache(dir / "nested" / "c.jsonl");
    CHECK(cache.flush() == 0);
    CHECK(std::filesystem::exists(dir / "nested" / "c.jsonl"));
    CaptionCache reopened(dir / "nested" / "c.jsonl");
    CHECK(reopened.size() == 0);
}

TEST_CASE("two caches over the same images write identical bytes") {
    TempDir dir;
    StubCaptioner cap;
    CaptionCache a(dir / "a.jsonl");
    CaptionCache b(dir / "b.jsonl");
    for (const char* id : {"x", "y", "z"}) a.get_or_generate(cap, image(id), {});
    for (const char* id : {"z", "x", "y"}) b.get_or_generate(cap, image(id), {});
    a.flush();
    b.flush();
    CHECK(read_file(dir / "a.jsonl") == read_file(dir / "b.jsonl"));
}

TEST_CASE("conflicts and malformed files") {
    TempDir dir;
    CaptionCache cache(dir / "c.jsonl");
    Caption c{image("i"), "a dog", "stub-captioner", decoding_hash({})};
    cache.put(c);
    CHECK_NOTHROW(cache.put(c));
    Caption other = c;
    other.text = "a cat";
    CHECK(code_of([&] { cache.put(other); }) == ErrorCode::CacheConflict);
    CHECK(cache.find(CaptionCache::key_for(c))->text == "a dog");

    cache.flush();
    const auto line = lines_of(read_file(dir / "c.jsonl")).at(0);
    auto j = nlohmann::json::parse(line);
    j["text"] = "a cat";
    write_file(dir / "dup.jsonl", line + "\n" + j.dump() + "\n");
    CHECK(code_of([&] { CaptionCache bad(dir / "dup.jsonl"); }) == ErrorCode::CacheConflict);

    write_file(dir / "broken.jsonl", line + "\n{not json\n");
    const auto msg = message_of([&] { CaptionCache bad(dir / "broken.jsonl"); });
    CHECK(msg.find("broken.jsonl:2:") != std::string::npos);
    CHECK(code_of([&] { CaptionCache bad(dir / "broken.jsonl"); }) == ErrorCode::ParseError);

    CHECK(code_of([] { CaptionCache::key_for("a|b", "h", "d", "i"); }) == ErrorCode::PreconditionViolation);
}

TEST_CASE("concurrent lookups of one key generate once") {
    TempDir dir;
    CaptionCache cache(dir / "c.jsonl");
    SlowCaptioner cap(std::chrono::milliseconds(50));
    std::vector<Caption> got(8);
    {
        std::vector<std::jthread> threads;
        for (std::size_t t = 0; t < got.size(); ++t) {
            threads.emplace_back([&, t] { got[t] = cache.get_or_generate(cap, image("same"), {}); });
        }
    }
    CHECK(cap.invocation_count() == 1);
    for (const auto& c : got) CHECK(c == got[0]);
    CHECK(cache.miss_count() == 1);
    CHECK(cache.hit_count() == 7);
}

TEST_CASE("backend errors are not cached") {
    TempDir dir;
    CaptionCache cache(dir / "c.jsonl");
    class Flaky final : public CaptionerBackend {
    public:
        int calls = 0;
        std::string backend_id() const override { return "flaky"; }

    protected:
        std::string caption_text(const ImageRef&, const DecodingConfig&) override {
            if (calls++ == 0) fail(ErrorCode::ImageUnreadable, "first call fails");
            return "ok";
        }
    } cap;
    CHECK(code_of([&] { cache.get_or_generate(cap, image("i"), {}); }) == ErrorCode::ImageUnreadable);
    CHECK(cache.size() == 0);
    CHECK(cache.get_or_generate(cap, image("i"), {}).text == "ok");
}
