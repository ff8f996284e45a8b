#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "twm/dynmatrix.hpp"
#include "twm/gen.hpp"
#include "twm/io.hpp"
#include "twm/oracle.hpp"

using namespace twm;

namespace {

const SlabDecomposition kFig2{
    5, {{1, 1, 2, 3}, {1, 2, 5, 5}, {3, 3, 2, 4}, {4, 5, 1, 3}, {4, 5, 5, 5}}};

// Snapshot slabs of the rebuild worked example and its three flips.
const SlabDecomposition kRebuildP{
    5, {{3, 5, 1, 2}, {3, 4, 3, 3}, {1, 2, 4, 4}, {5, 5, 4, 4}, {4, 5, 5, 5}}};

const std::vector<Slab> kRebuildExpected{
    {1, 1, 2, 2}, {1, 2, 4, 4}, {3, 5, 1, 1}, {3, 4, 2, 3}, {4, 5, 4, 5}};

DenseMatrix from_rows(const std::vector<std::string>& rows) {
    DenseMatrix m(Index(rows.size()));
    for (Index r = 1; r <= m.n(); ++r)
        for (Index c = 1; c <= m.n(); ++c) m.set(r, c, rows[r - 1][c - 1] == '1');
    return m;
}

void check_matches_dense(const AmortizedMatrix& am, const DenseMatrix& m) {
    for (Index r = 1; r <= m.n(); ++r)
        for (Index c = 1; c <= m.n(); ++c) REQUIRE(am.query({r, c}) == m.get(r, c));
}

// Reconstructs the represented matrix straight from the invariant: pending
// entry if present, else membership in a cached slab.
DenseMatrix reconstruct(const AmortizedMatrix& am) {
    DenseMatrix m(am.n());
    for (Index r = 1; r <= am.n(); ++r)
        for (Index c = 1; c <= am.n(); ++c) {
            auto bit = am.pending_bit({r, c});
            bool v = false;
            if (bit) {
                v = *bit;
            } else {
                for (const Slab& s : am.slabs())
                    if (s.contains({r, c})) {
                        v = true;
                        break;
                    }
            }
            m.set(r, c, v);
        }
    return m;
}

EngineConfig fixed_seed(std::uint64_t threshold = kNeverRebuild) {
    EngineConfig cfg;
    cfg.threshold = threshold;
    cfg.hash_seed = 12345;
    return cfg;
}

}  // namespace

TEST_CASE("amortized init answers the five-slab fixture") {
    AmortizedMatrix am(kFig2, fixed_seed());
    check_matches_dense(am, from_rows({"01101", "00001", "01110", "11101", "11101"}));
    CHECK(am.query({3, 4}));
    CHECK_FALSE(am.query({2, 2}));
}

TEST_CASE("amortized init on an empty decomposition") {
    AmortizedMatrix am({3, {}}, fixed_seed());
    check_matches_dense(am, DenseMatrix(3));
}

TEST_CASE("amortized init on the rebuild example snapshot") {
    AmortizedMatrix am(kRebuildP, fixed_seed());
    check_matches_dense(am, from_rows({"00010", "00010", "11100", "11101", "11011"}));
}

TEST_CASE("update is an involution") {
    AmortizedMatrix am({4, {}}, fixed_seed());
    am.update({1, 1});
    CHECK(am.query({1, 1}));
    am.update({1, 1});
    CHECK_FALSE(am.query({1, 1}));
    CHECK(am.pending_bit({1, 1}).has_value());
    CHECK(am.pending_bit({1, 1}) == false);
}

TEST_CASE("rebuild folds the pending flips into the canonical decomposition") {
    AmortizedMatrix am(kRebuildP, fixed_seed());
    CHECK(same_slab_set(am.slabs(), kRebuildP.slabs));  // already canonical
    am.update({1, 2});
    am.update({4, 4});
    am.update({5, 2});
    CHECK(am.query({1, 2}));
    CHECK(am.query({4, 4}));
    CHECK_FALSE(am.query({5, 2}));
    CHECK(am.pending_size() == 3);

    am.rebuild();
    CHECK(am.pending_size() == 0);
    CHECK(same_slab_set(am.slabs(), kRebuildExpected));
    CHECK(am.last_rebuild_input_size() <= kRebuildP.slabs.size() + 2 * 3);
    check_matches_dense(am, from_rows({"01010", "00010", "11100", "11111", "10011"}));
}

TEST_CASE("rebuild with an empty pending map keeps the decomposition") {
    AmortizedMatrix am(kFig2, fixed_seed());
    auto before = am.slabs();
    am.rebuild();
    CHECK(same_slab_set(am.slabs(), before));
}

TEST_CASE("a zero-update in the middle of a full slab splits it four ways") {
    AmortizedMatrix am({3, {{1, 3, 1, 3}}}, fixed_seed());
    am.update({2, 2});
    am.rebuild();
    DenseMatrix expected = from_rows({"111", "101", "111"});
    check_matches_dense(am, expected);
    CHECK(am.slabs().size() == 4);
    CHECK(same_slab_set(am.slabs(), naive_canonical(expected).slabs));
}

TEST_CASE("threshold one rebuilds on every update") {
    AmortizedMatrix am(kFig2, fixed_seed(1));
    DenseMatrix ref = dense_from_slabs(kFig2);
    std::mt19937_64 rng(31);
    for (int i = 0; i < 40; ++i) {
        Cell p{Index(rng() % 5 + 1), Index(rng() % 5 + 1)};
        am.update(p);
        ref.flip(p);
        REQUIRE(am.pending_size() == 0);
        REQUIRE(am.rebuild_count() == std::uint64_t(i + 1));
        REQUIRE(same_slab_set(am.slabs(), naive_canonical(ref).slabs));
    }
    check_matches_dense(am, ref);
}

TEST_CASE("query streams match the dense oracle for any threshold") {
    std::mt19937_64 rng(9090);
    for (std::uint64_t threshold : {std::uint64_t(1), std::uint64_t(4), std::uint64_t(32),
                                    kNeverRebuild}) {
        for (int trial = 0; trial < 8; ++trial) {
            Index n = Index(rng() % 48 + 2);
            SlabDecomposition init = gen_disjoint_slabs(n, rng() % 60, rng());
            AmortizedMatrix am(init, fixed_seed(threshold));
            DenseMatrix ref = dense_from_slabs(init);
            for (const TraceOp& op : gen_trace(n, 400, rng(), 0.45)) {
                if (op.is_query) {
                    REQUIRE(am.query(op.cell) == ref.get(op.cell));
                } else {
                    am.update(op.cell);
                    ref.flip(op.cell);
                }
            }
            REQUIRE(reconstruct(am) == ref);
        }
    }
}

TEST_CASE("representation invariant holds after every operation") {
    std::mt19937_64 rng(777);
    Index n = 16;
    SlabDecomposition init = gen_disjoint_slabs(n, 20, 5);
    AmortizedMatrix am(init, fixed_seed(8));
    DenseMatrix ref = dense_from_slabs(init);
    for (const TraceOp& op : gen_trace(n, 300, 17, 0.3)) {
        if (op.is_query) {
            REQUIRE(am.query(op.cell) == ref.get(op.cell));
        } else {
            am.update(op.cell);
            ref.flip(op.cell);
        }
        REQUIRE(reconstruct(am) == ref);
    }
}

TEST_CASE("rebuild input stays within the slab budget") {
    std::mt19937_64 rng(1212);
    for (int trial = 0; trial < 10; ++trial) {
        Index n = Index(rng() % 24 + 4);
        AmortizedMatrix am(gen_disjoint_slabs(n, 24, rng()), fixed_seed());
        for (int i = 0; i < 50; ++i)
            am.update({Index(rng() % n + 1), Index(rng() % n + 1)});
        std::size_t p_before = am.slabs().size();
        std::size_t q_before = am.pending_size();
        am.rebuild();
        REQUIRE(am.last_rebuild_input_size() <= p_before + 3 * q_before);
    }
}

TEST_CASE("amortized engine rejects out-of-range cells") {
    AmortizedMatrix am({4, {}}, fixed_seed());
    CHECK_THROWS_AS(am.query({0, 1}), std::out_of_range);
    CHECK_THROWS_AS(am.query({1, 5}), std::out_of_range);
    CHECK_THROWS_AS(am.update({5, 1}), std::out_of_range);
}

TEST_CASE("threshold configuration") {
    AmortizedMatrix am({8, {}}, EngineConfig{.threshold = 0, .hash_seed = 3});
    CHECK(am.threshold() == 64);  // max(16, 8n)
    AmortizedMatrix small({1, {}}, EngineConfig{.threshold = 0, .hash_seed = 3});
    CHECK(small.threshold() == 16);
    // 8 * f_1 * (n+2) with n = 8
    CHECK(analysis_threshold(1, 8) ==
          std::uint64_t(__int128(8) * 26214400 * 10 / 3));
    CHECK(analysis_threshold(1, 8) > std::uint64_t(100000000));
}

TEST_CASE("fast locator backend gives identical answers") {
    std::mt19937_64 rng(4554);
    EngineConfig fast = fixed_seed(16);
    fast.backend = PlBackend::fast;
    Index n = 32;
    SlabDecomposition init = gen_disjoint_slabs(n, 40, 8);
    AmortizedMatrix a(init, fixed_seed(16));
    AmortizedMatrix b(init, fast);
    for (const TraceOp& op : gen_trace(n, 600, 99, 0.5)) {
        if (op.is_query) {
            REQUIRE(a.query(op.cell) == b.query(op.cell));
        } else {
            a.update(op.cell);
            b.update(op.cell);
        }
    }
}
