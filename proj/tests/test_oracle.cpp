#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "twm/oracle.hpp"

using namespace twm;

namespace {

DenseMatrix from_rows(const std::vector<std::string>& rows) {
    DenseMatrix m(Index(rows.size()));
    for (Index r = 1; r <= m.n(); ++r)
        for (Index c = 1; c <= m.n(); ++c) m.set(r, c, rows[r - 1][c - 1] == '1');
    return m;
}

const SlabDecomposition kFig3Input{
    4, {{2, 2, 1, 3}, {3, 3, 2, 4}, {4, 4, 1, 4}, {1, 1, 4, 4}}};

const std::vector<std::string> kFig3Rows{"0001", "1110", "0111", "1111"};

const SlabDecomposition kFig2{
    5, {{1, 1, 2, 3}, {1, 2, 5, 5}, {3, 3, 2, 4}, {4, 5, 1, 3}, {4, 5, 5, 5}}};

const std::vector<std::string> kFig2Rows{"01101", "00001", "01110", "11101", "11101"};

// 5x5 example carrying a width-2 merge order.
const std::vector<std::string> kWidth2Rows{"01111", "00001", "11100", "11101", "10011"};

ContractionSequence width2_sequence() {
    ContractionSequence seq;
    seq.steps = {{true, 3}, {false, 2}, {true, 1}, {false, 3},
                 {false, 1}, {true, 1}, {false, 1}, {true, 1}};
    return seq;
}

ContractionSequence rows_then_cols(Index n) {
    ContractionSequence seq;
    for (Index i = 0; i < n - 1; ++i) seq.steps.push_back({true, 1});
    for (Index i = 0; i < n - 1; ++i) seq.steps.push_back({false, 1});
    return seq;
}

}  // namespace

TEST_CASE("dense_from_slabs") {
    CHECK(dense_from_slabs(kFig3Input) == from_rows(kFig3Rows));
    CHECK(dense_from_slabs({3, {}}) == DenseMatrix(3));
    CHECK(dense_from_slabs(kFig2) == from_rows(kFig2Rows));
    CHECK_THROWS_AS(dense_from_slabs({3, {{1, 2, 1, 2}, {2, 3, 2, 3}}}),
                    std::invalid_argument);
}

TEST_CASE("naive_strips") {
    DenseMatrix m(9);
    const bool col3[] = {false, true, true, false, true, false, true, true, true};
    for (Index r = 1; r <= 9; ++r) m.set(r, 3, col3[r - 1]);
    CHECK(naive_strips(m, 3) == std::vector<Segment>{{2, 3}, {5, 5}, {7, 9}});
    CHECK(naive_strips(m, 1).empty());

    DenseMatrix ones(4);
    for (Index r = 1; r <= 4; ++r) ones.set(r, 2, true);
    CHECK(naive_strips(ones, 2) == std::vector<Segment>{{1, 4}});
}

TEST_CASE("naive_canonical on the figure matrices") {
    CHECK(same_slab_set(
        naive_canonical(from_rows(kFig3Rows)).slabs,
        {{2, 2, 1, 1}, {4, 4, 1, 1}, {2, 4, 2, 3}, {1, 1, 4, 4}, {3, 4, 4, 4}}));

    // Six canonical slabs, each a distinct color in the source example.
    DenseMatrix m1 = from_rows({"11111", "01011", "11000", "11111", "10000"});
    CHECK(same_slab_set(naive_canonical(m1).slabs, {{1, 1, 1, 1},
                                                    {3, 5, 1, 1},
                                                    {1, 4, 2, 2},
                                                    {1, 1, 3, 3},
                                                    {4, 4, 3, 5},
                                                    {1, 2, 4, 5}}));

    // A two-slab decomposition exists, but the canonical one needs three.
    DenseMatrix m2 = from_rows({"01100", "01100", "11110", "11110", "00000"});
    REQUIRE(dense_from_slabs({5, {{3, 4, 1, 4}, {1, 2, 2, 3}}}) == m2);
    CHECK(same_slab_set(naive_canonical(m2).slabs,
                        {{3, 4, 1, 1}, {1, 4, 2, 3}, {3, 4, 4, 4}}));

    CHECK(naive_canonical(DenseMatrix(6)).slabs.empty());
}

TEST_CASE("naive_canonical round-trips through dense_from_slabs") {
    std::mt19937_64 rng(1234);
    for (int trial = 0; trial < 100; ++trial) {
        Index n = Index(rng() % 32 + 1);
        DenseMatrix m(n);
        for (Index r = 1; r <= n; ++r)
            for (Index c = 1; c <= n; ++c) m.set(r, c, rng() % 3 == 0);
        SlabDecomposition canonical = naive_canonical(m);
        REQUIRE(validate_decomposition(canonical));
        REQUIRE(dense_from_slabs(canonical) == m);
    }
}

TEST_CASE("count_corners") {
    CHECK(count_corners(from_rows({"01", "11"})) == 1);
    CHECK(count_corners(from_rows({"11", "00"})) == 0);
    CHECK(count_corners(from_rows(kFig3Rows)) == 4);
    CHECK(count_corners(DenseMatrix(1)) == 0);

    // Independent enumeration over random matrices.
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 50; ++trial) {
        Index n = Index(rng() % 12 + 2);
        DenseMatrix m(n);
        for (Index r = 1; r <= n; ++r)
            for (Index c = 1; c <= n; ++c) m.set(r, c, rng() % 2 == 0);
        std::int64_t expected = 0;
        for (Index i = 1; i < n; ++i)
            for (Index j = 1; j < n; ++j) {
                bool rows_same = m.get(i, j) == m.get(i + 1, j) &&
                                 m.get(i, j + 1) == m.get(i + 1, j + 1);
                bool cols_same = m.get(i, j) == m.get(i, j + 1) &&
                                 m.get(i + 1, j) == m.get(i + 1, j + 1);
                if (!rows_same && !cols_same) ++expected;
            }
        REQUIRE(count_corners(m) == expected);
    }
}

TEST_CASE("verify_contraction_width on the width-2 fixture") {
    DenseMatrix m = from_rows(kWidth2Rows);
    ContractionSequence seq = width2_sequence();
    CHECK(verify_contraction_width(m, seq) == 2);
    CHECK(verify_contraction_width_naive(m, seq) == 2);
}

TEST_CASE("verify_contraction_width trivial cases") {
    CHECK(verify_contraction_width(DenseMatrix(5), rows_then_cols(5)) == 0);

    DenseMatrix id2 = from_rows({"10", "01"});
    CHECK(verify_contraction_width(id2, rows_then_cols(2)) >= 1);
    ContractionSequence cols_first;
    cols_first.steps = {{false, 1}, {true, 1}};
    CHECK(verify_contraction_width(id2, cols_first) >= 1);
}

TEST_CASE("verify_contraction_width rejects malformed sequences") {
    DenseMatrix m(3);
    ContractionSequence short_seq;
    short_seq.steps = {{true, 1}, {false, 1}};
    CHECK_THROWS_AS(verify_contraction_width(m, short_seq), std::invalid_argument);
    ContractionSequence bad_index;
    bad_index.steps = {{true, 3}, {true, 1}, {false, 1}, {false, 1}};
    CHECK_THROWS_AS(verify_contraction_width(m, bad_index), std::invalid_argument);
}

TEST_CASE("incremental verifier matches the naive verifier") {
    std::mt19937_64 rng(424242);
    for (int trial = 0; trial < 60; ++trial) {
        Index n = Index(rng() % 9 + 2);
        DenseMatrix m(n);
        for (Index r = 1; r <= n; ++r)
            for (Index c = 1; c <= n; ++c) m.set(r, c, rng() % 2 == 0);
        Index rows = n, cols = n;
        ContractionSequence seq;
        while (rows > 1 || cols > 1) {
            bool row_axis = cols == 1 || (rows > 1 && rng() % 2 == 0);
            Index blocks = row_axis ? rows : cols;
            seq.steps.push_back({row_axis, Index(rng() % (blocks - 1) + 1)});
            (row_axis ? rows : cols) -= 1;
        }
        REQUIRE(verify_contraction_width(m, seq) ==
                verify_contraction_width_naive(m, seq));
    }
}

TEST_CASE("f_d constant") {
    FdConstant f1 = f_d_constant(1);
    CHECK(std::int64_t(f1.num) == 26214400);
    CHECK(f1.den == 3);
    CHECK(f1.approx() == Catch::Approx(8738133.33).epsilon(1e-6));

    FdConstant f0 = f_d_constant(0);
    CHECK(f0.approx() == Catch::Approx(12288.0));

    CHECK(f_d_constant(2).approx() > f_d_constant(1).approx());
    CHECK(f1.bounds(8738133, 1));
    CHECK_FALSE(f1.bounds(8738134, 1));
}
