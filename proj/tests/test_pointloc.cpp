#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "twm/gen.hpp"
#include "twm/pointloc.hpp"

using namespace twm;

namespace {

const SlabDecomposition kFig2{
    5, {{1, 1, 2, 3}, {1, 2, 5, 5}, {3, 3, 2, 4}, {4, 5, 1, 3}, {4, 5, 5, 5}}};

std::optional<Slab> scan_locate(const std::vector<Slab>& slabs, const Cell& p) {
    for (const Slab& s : slabs)
        if (s.contains(p)) return s;
    return std::nullopt;
}

int ceil_log2(std::size_t x) {
    int lg = 0;
    while ((std::size_t(1) << lg) < x) ++lg;
    return lg;
}

}  // namespace

TEST_CASE("point location on the five-slab fixture") {
    for (auto backend : {PlBackend::baseline, PlBackend::fast}) {
        PointLocator loc = build_point_locator(kFig2, backend);
        CHECK(loc.slab_count() == 5);
        CHECK(loc.locate({4, 2}) == Slab{4, 5, 1, 3});
        CHECK_FALSE(loc.locate({2, 3}).has_value());
        CHECK(loc.locate({1, 5}) == Slab{1, 2, 5, 5});
    }
}

TEST_CASE("point location trivial slab sets") {
    PointLocator empty = build_point_locator(SlabDecomposition{4, {}});
    for (Index r = 1; r <= 4; ++r)
        for (Index c = 1; c <= 4; ++c) CHECK_FALSE(empty.locate({r, c}).has_value());

    PointLocator full = build_point_locator(SlabDecomposition{4, {{1, 4, 1, 4}}});
    for (Index r = 1; r <= 4; ++r)
        for (Index c = 1; c <= 4; ++c) CHECK(full.locate({r, c}) == Slab{1, 4, 1, 4});
}

TEST_CASE("point location rejects overlapping slabs naming a pair") {
    CHECK_THROWS_WITH(
        build_point_locator(4, {{1, 2, 1, 2}, {2, 3, 2, 3}}),
        Catch::Matchers::ContainsSubstring("(1,2,1,2)") &&
            Catch::Matchers::ContainsSubstring("(2,3,2,3)") &&
            Catch::Matchers::ContainsSubstring("overlap"));
}

TEST_CASE("point location agrees with a linear scan exhaustively") {
    std::mt19937_64 rng(314159);
    for (int trial = 0; trial < 60; ++trial) {
        Index n = Index(rng() % 32 + 1);
        SlabDecomposition dec = gen_disjoint_slabs(n, rng() % 40, rng());
        for (auto backend : {PlBackend::baseline, PlBackend::fast}) {
            PointLocator loc = build_point_locator(dec, backend);
            for (Index r = 1; r <= n; ++r)
                for (Index c = 1; c <= n; ++c)
                    REQUIRE(loc.locate({r, c}) == scan_locate(dec.slabs, {r, c}));
        }
    }
}

TEST_CASE("point location is deterministic") {
    SlabDecomposition dec = gen_disjoint_slabs(64, 80, 4242);
    PointLocator a = build_point_locator(dec);
    PointLocator b = build_point_locator(dec);
    CHECK(a.arena_nodes() == b.arena_nodes());
    for (Index r = 1; r <= 64; ++r)
        for (Index c = 1; c <= 64; ++c) REQUIRE(a.locate({r, c}) == b.locate({r, c}));
}

TEST_CASE("point location query comparisons stay logarithmic") {
    std::mt19937_64 rng(999);
    for (std::size_t target : {std::size_t(10), std::size_t(200), std::size_t(2000)}) {
        Index n = 4096;
        SlabDecomposition dec = gen_disjoint_slabs(n, target, rng());
        std::size_t count = dec.slabs.size();
        int bound = 2 * ceil_log2(count + 2) + 4;
        for (auto backend : {PlBackend::baseline, PlBackend::fast}) {
            PointLocator loc = build_point_locator(dec, backend);
            for (int q = 0; q < 3000; ++q) {
                Cell p{Index(rng() % n + 1), Index(rng() % n + 1)};
                int comparisons = 0;
                loc.locate_instrumented(p, comparisons);
                REQUIRE(comparisons <= bound);
            }
        }
    }
}

TEST_CASE("pausable build gives the same locator as the one-shot build") {
    SlabDecomposition dec = gen_disjoint_slabs(48, 60, 77);
    PointLocatorBuilder builder(dec.n, dec.slabs, PlBackend::baseline);
    WorkMeter meter;
    int micro_tasks = 0;
    while (true) {
        std::uint64_t before = meter.units;
        bool more = builder.advance(meter);
        REQUIRE(meter.units - before <= kMicroTaskMax);
        ++micro_tasks;
        if (!more) break;
    }
    PointLocator stepped = builder.finish();
    PointLocator direct = build_point_locator(dec);
    CHECK(micro_tasks > 10);
    for (Index r = 1; r <= 48; ++r)
        for (Index c = 1; c <= 48; ++c)
            REQUIRE(stepped.locate({r, c}) == direct.locate({r, c}));
}
