#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "twm/gen.hpp"
#include "twm/io.hpp"

using namespace twm;

TEST_CASE("slab file round trip") {
    std::mt19937_64 rng(44);
    for (int trial = 0; trial < 25; ++trial) {
        SlabDecomposition dec = gen_disjoint_slabs(Index(rng() % 60 + 1), rng() % 50, rng());
        std::stringstream s;
        write_slab_file(s, dec);
        SlabDecomposition back = read_slab_file(s);
        REQUIRE(back.n == dec.n);
        REQUIRE(same_slab_set(back.slabs, dec.slabs));
    }
}

TEST_CASE("slab file writes are sorted and stable") {
    SlabDecomposition dec{4, {{3, 3, 2, 4}, {2, 2, 1, 3}, {1, 1, 4, 4}}};
    std::stringstream a, b;
    write_slab_file(a, dec);
    std::swap(dec.slabs[0], dec.slabs[2]);
    write_slab_file(b, dec);
    CHECK(a.str() == b.str());
    CHECK(a.str() == "4 3\n1 1 4 4\n2 2 1 3\n3 3 2 4\n");
}

TEST_CASE("slab file parse errors carry line numbers") {
    std::stringstream missing("3");
    CHECK_THROWS_AS(read_slab_file(missing), ParseError);

    std::stringstream bad_token("3 1\n1 x 1 2\n");
    try {
        read_slab_file(bad_token);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 2);
    }

    std::stringstream truncated("3 2\n1 1 1 1\n");
    CHECK_THROWS_AS(read_slab_file(truncated), ParseError);

    std::stringstream out_of_range("3 1\n1 4 1 2\n");
    try {
        read_slab_file(out_of_range);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 2);
        CHECK_THAT(e.what(), Catch::Matchers::ContainsSubstring("out of range"));
    }
}

TEST_CASE("dense file round trip") {
    std::mt19937_64 rng(55);
    DenseMatrix m(9);
    for (Index r = 1; r <= 9; ++r)
        for (Index c = 1; c <= 9; ++c) m.set(r, c, rng() % 2 == 0);
    std::stringstream s;
    write_dense_file(s, m);
    CHECK(read_dense_file(s) == m);

    std::stringstream bad("2\n01\n0\n");
    try {
        read_dense_file(bad);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 3);
    }
}

TEST_CASE("trace file round trip") {
    auto ops = gen_trace(32, 200, 66, 0.5);
    std::stringstream s;
    write_trace_file(s, ops);
    CHECK(read_trace_file(s) == ops);

    std::stringstream bad("Q 1 1\nX 2 2\n");
    try {
        read_trace_file(bad);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 2);
    }
}

TEST_CASE("witness file round trip") {
    WitnessedMatrix w = gen_bounded_width(12, 2, 31);
    std::stringstream s;
    write_witness_file(s, 12, w.witness);
    auto [n, seq] = read_witness_file(s);
    CHECK(n == 12);
    CHECK(seq.steps == w.witness.steps);
}
