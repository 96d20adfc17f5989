#include <doctest.h>

#include <fstream>
#include <memory>

#include "semloc/error.hpp"
#include "semloc/response_cache.hpp"

#include "test_support.hpp"

using namespace semloc;
using test::CountingGateway;
using test::FixtureBuilder;
using test::TempDir;

namespace {

std::shared_ptr<CountingGateway> counting_backend() {
    auto inner = FixtureBuilder{}
                     .ground("img1", "a photo of a chair", 0.4)
                     .ground("img2", "a photo of a chair", 0.7)
                     .completions("what room?", {"Kitchen.", "a kitchen", "pantry", "office"})
                     .embedding("kitchen", {3.0, 4.0})
                     .build_shared();
    return std::make_shared<CountingGateway>(inner);
}

}  // namespace

TEST_CASE("identical calls hit the backend once") {
    TempDir dir;
    auto counting = counting_backend();
    CachedGateway cache(counting, dir.path());

    CHECK(cache.ground({"img1", ""}, "a photo of a chair") == 0.4);
    CHECK(cache.ground({"img1", ""}, "a photo of a chair") == 0.4);
    CHECK(counting->ground_calls == 1);

    cache.complete("what room?", 5);
    cache.complete("what room?", 5);
    CHECK(counting->complete_calls == 1);

    cache.embed("kitchen");
    Embedding e = cache.embed("kitchen");
    CHECK(counting->embed_calls == 1);
    CHECK(e[0] == doctest::Approx(0.6).epsilon(1e-15));
}

TEST_CASE("distinct keys each hit the backend") {
    TempDir dir;
    auto counting = counting_backend();
    CachedGateway cache(counting, dir.path());

    cache.ground({"img1", ""}, "a photo of a chair");
    cache.ground({"img2", ""}, "a photo of a chair");
    CHECK(counting->ground_calls == 2);
}

TEST_CASE("cache persists across gateway instances") {
    TempDir dir;
    auto first = counting_backend();
    CachedGateway(first, dir.path()).ground({"img1", ""}, "a photo of a chair");
    CHECK(first->ground_calls == 1);

    // Fresh wrapper over the same directory: simulates a process restart.
    auto second = counting_backend();
    CachedGateway warm(second, dir.path());
    CHECK(warm.ground({"img1", ""}, "a photo of a chair") == 0.4);
    CHECK(second->ground_calls == 0);
}

TEST_CASE("completion records cache the raw strings, so any n is served") {
    TempDir dir;
    auto counting = counting_backend();
    CachedGateway cache(counting, dir.path());

    auto full = cache.complete("what room?", 5);
    CHECK(full.candidates == std::vector<std::string>{"kitchen", "pantry", "office"});

    auto two = cache.complete("what room?", 2);
    CHECK(two.candidates == std::vector<std::string>{"kitchen", "pantry"});
    CHECK(two.raw.size() == 4);
    CHECK(counting->complete_calls == 1);
}

TEST_CASE("cache keys separate backends") {
    TempDir dir;
    auto a_inner = FixtureBuilder{}.ground("img", "p", 0.1).build_shared("fixture:a");
    auto b_inner = FixtureBuilder{}.ground("img", "p", 0.9).build_shared("fixture:b");
    auto a = std::make_shared<CountingGateway>(a_inner);
    auto b = std::make_shared<CountingGateway>(b_inner);

    CHECK(CachedGateway(a, dir.path()).ground({"img", ""}, "p") == 0.1);
    CHECK(CachedGateway(b, dir.path()).ground({"img", ""}, "p") == 0.9);
    CHECK(a->ground_calls == 1);
    CHECK(b->ground_calls == 1);
}

TEST_CASE("corrupt records are an invariant error, not a silent refetch") {
    TempDir dir;
    auto counting = counting_backend();
    CachedGateway cache(counting, dir.path());
    cache.ground({"img1", ""}, "a photo of a chair");

    // Exactly one record exists; overwrite it with garbage.
    int records = 0;
    std::filesystem::path record;
    for (const auto& entry : std::filesystem::directory_iterator(dir.path())) {
        records++;
        record = entry.path();
    }
    REQUIRE(records == 1);

    SUBCASE("malformed JSON") {
        std::ofstream(record) << "{broken";
        CHECK_THROWS_WITH_AS(cache.ground({"img1", ""}, "a photo of a chair"),
                             doctest::Contains("cache corruption"), InvariantError);
    }
    SUBCASE("mismatched record fields") {
        std::ofstream(record) << R"({"backend":"other","capability":"ground",)"
                              << R"("prompt":"a photo of a chair","response":0.4,)"
                              << R"("subject":"img1"})";
        CHECK_THROWS_WITH_AS(cache.ground({"img1", ""}, "a photo of a chair"),
                             doctest::Contains("cache corruption"), InvariantError);
    }
}

TEST_CASE("identity passes through and bad directories are rejected") {
    TempDir dir;
    auto counting = counting_backend();
    CachedGateway cache(counting, dir.path());
    CHECK(cache.identity() == "fixture:test");

    std::ofstream(dir / "a_file") << "x";
    CHECK_THROWS_AS(CachedGateway(counting, dir / "a_file"), InputError);
}

TEST_CASE("hash_key is the reference FNV-1a 64") {
    // Reference values for the standard FNV-1a 64-bit test vectors.
    CHECK(CachedGateway::hash_key("") == "cbf29ce484222325");
    CHECK(CachedGateway::hash_key("a") == "af63dc4c8601ec8c");
    CHECK(CachedGateway::hash_key("foobar") == "85944171f73967e8");
    CHECK(CachedGateway::hash_key("foobar") == CachedGateway::hash_key("foobar"));
    CHECK(CachedGateway::hash_key("x") != CachedGateway::hash_key("y"));
}
