#include <catch2/catch_amalgamated.hpp>

#include <optional>
#include <random>
#include <set>

#include "twm/veb.hpp"

using namespace twm;

namespace {

std::optional<Index> set_successor(const std::set<Index>& s, Index x) {
    auto it = s.upper_bound(x);
    if (it == s.end()) return std::nullopt;
    return *it;
}

std::optional<Index> set_predecessor(const std::set<Index>& s, Index x) {
    auto it = s.lower_bound(x);
    if (it == s.begin()) return std::nullopt;
    return *std::prev(it);
}

}  // namespace

TEST_CASE("veb basic examples") {
    VebDictionary d(16);
    d.insert(5);
    CHECK(d.contains(5));
    d.insert(5);
    CHECK(d.size() == 1);
    CHECK(d.successor(4) == 5);
    CHECK_FALSE(d.successor(5).has_value());

    VebDictionary e(16);
    e.insert(3);
    e.insert(9);
    e.insert(12);
    CHECK(e.successor(3) == 9);
    CHECK(e.contains(9));
    CHECK_FALSE(e.contains(4));
    CHECK(e.successor(9) == 12);
    CHECK_FALSE(e.successor(12).has_value());
    CHECK(e.successor(0) == 3);
    CHECK(e.predecessor(9) == 3);
    CHECK_FALSE(e.predecessor(3).has_value());
    CHECK(e.predecessor(13) == 12);

    e.erase(9);
    CHECK(e.successor(3) == 12);
    e.erase(9);
    CHECK(e.size() == 2);

    VebDictionary f(16);
    f.erase(7);
    CHECK(f.empty());
    f.insert(1);
    f.insert(2);
    f.erase(1);
    CHECK(f.predecessor(3) == 2);
}

TEST_CASE("veb rejects out-of-universe keys") {
    VebDictionary d(100);
    CHECK_THROWS_AS(d.insert(0), std::out_of_range);
    CHECK_THROWS_AS(d.insert(101), std::out_of_range);
    CHECK_THROWS_AS(d.contains(101), std::out_of_range);
    CHECK_THROWS_AS(d.erase(-3), std::out_of_range);
    CHECK_THROWS_AS(d.successor(-1), std::out_of_range);
    CHECK_THROWS_AS(d.successor(101), std::out_of_range);
    CHECK_THROWS_AS(d.predecessor(0), std::out_of_range);
    CHECK_THROWS_AS(d.predecessor(102), std::out_of_range);
    CHECK_NOTHROW(d.successor(0));
    CHECK_NOTHROW(d.predecessor(101));
}

TEST_CASE("veb agrees with a sorted set on random operation sequences") {
    std::mt19937_64 rng(20240817);
    for (Index universe : {Index(1), Index(2), Index(63), Index(64), Index(65),
                           Index(1000), Index(4096), Index(65536)}) {
        VebDictionary d(universe);
        std::set<Index> ref;
        int ops = universe >= 65536 ? 100000 : 4000;
        std::uniform_int_distribution<Index> key(1, universe);
        for (int i = 0; i < ops; ++i) {
            Index x = key(rng);
            switch (rng() % 5) {
                case 0:
                    d.insert(x);
                    ref.insert(x);
                    break;
                case 1:
                    d.erase(x);
                    ref.erase(x);
                    break;
                case 2:
                    REQUIRE(d.contains(x) == (ref.count(x) > 0));
                    break;
                case 3: {
                    Index q = Index(rng() % (universe + 1));
                    REQUIRE(d.successor(q) == set_successor(ref, q));
                    break;
                }
                case 4: {
                    Index q = Index(rng() % (universe + 1) + 1);
                    REQUIRE(d.predecessor(q) == set_predecessor(ref, q));
                    break;
                }
            }
            REQUIRE(d.size() == ref.size());
        }
    }
}

TEST_CASE("veb insert/erase visibility") {
    std::mt19937_64 rng(99);
    VebDictionary d(512);
    for (int i = 0; i < 2000; ++i) {
        Index x = Index(rng() % 512 + 1);
        d.insert(x);
        REQUIRE(d.contains(x));
        Index y = Index(rng() % 512 + 1);
        d.erase(y);
        REQUIRE_FALSE(d.contains(y));
    }
}

TEST_CASE("veb successor and predecessor are mutually consistent") {
    std::mt19937_64 rng(5);
    VebDictionary d(2048);
    for (int i = 0; i < 500; ++i) d.insert(Index(rng() % 2048 + 1));
    for (Index x = 0; x <= 2048; ++x) {
        auto y = d.successor(x);
        if (y) {
            auto back = d.predecessor(*y);
            REQUIRE((!back || *back <= x));
        }
    }
}

TEST_CASE("veb memory scales linearly with the universe") {
    for (int b : {13, 14, 15, 16}) {
        VebDictionary small(Index(1) << b);
        VebDictionary big(Index(1) << (b + 1));
        double ratio =
            double(big.footprint_words()) / double(small.footprint_words());
        INFO("b=" << b << " ratio=" << ratio);
        CHECK(ratio >= 1.5);
        CHECK(ratio <= 3.0);
    }
}
