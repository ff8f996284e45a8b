#pragma once

// Brute-force references and bound validators: a dense bit matrix, naive
// strip/canonical-decomposition computation, corner counting, and a
// contraction-sequence width verifier. Everything here favors obviousness
// over speed; the verifier additionally has an incremental variant because
// the naive one is cubic.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "twm/core.hpp"

namespace twm {

class DenseMatrix {
public:
    DenseMatrix() = default;
    explicit DenseMatrix(Index n) : n_(n), bits_(std::size_t(n) * n, 0) {
        if (n < 1) throw std::invalid_argument("dense: n must be >= 1");
    }

    Index n() const { return n_; }

    bool get(Index row, Index col) const { return bits_[idx(row, col)]; }
    void set(Index row, Index col, bool v) { bits_[idx(row, col)] = v ? 1 : 0; }
    void flip(Index row, Index col) { bits_[idx(row, col)] ^= 1; }

    bool get(const Cell& p) const { return get(p.row, p.col); }
    void flip(const Cell& p) { flip(p.row, p.col); }

    friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

private:
    std::size_t idx(Index row, Index col) const {
        require_cell(n_, {row, col}, "dense");
        return std::size_t(row - 1) * n_ + (col - 1);
    }

    Index n_ = 0;
    std::vector<std::uint8_t> bits_;
};

inline DenseMatrix dense_from_slabs(const SlabDecomposition& dec) {
    require_valid(dec, "dense_from_slabs");
    DenseMatrix m(dec.n);
    for (const Slab& s : dec.slabs)
        for (Index r = s.row_lo; r <= s.row_hi; ++r)
            for (Index c = s.col_lo; c <= s.col_hi; ++c) m.set(r, c, true);
    return m;
}

// Maximal all-ones row intervals of column `col`.
inline std::vector<Segment> naive_strips(const DenseMatrix& m, Index col) {
    std::vector<Segment> out;
    Index r = 1;
    while (r <= m.n()) {
        if (!m.get(r, col)) {
            ++r;
            continue;
        }
        Index lo = r;
        while (r <= m.n() && m.get(r, col)) ++r;
        out.push_back({lo, r - 1});
    }
    return out;
}

// Groups identical strips of adjacent columns into canonical slabs. Strips
// lists are sorted by lo, so one merge walk per column pair suffices.
inline SlabDecomposition naive_canonical(const DenseMatrix& m) {
    const Index n = m.n();
    SlabDecomposition out;
    out.n = n;
    std::vector<Segment> prev;
    std::vector<Index> prev_start;
    for (Index col = 1; col <= n + 1; ++col) {
        std::vector<Segment> cur = col <= n ? naive_strips(m, col) : std::vector<Segment>{};
        std::vector<Index> cur_start(cur.size(), col);
        std::size_t i = 0, j = 0;
        while (i < prev.size() || j < cur.size()) {
            if (j >= cur.size() || (i < prev.size() && prev[i].lo < cur[j].lo)) {
                out.slabs.push_back({prev[i].lo, prev[i].hi, prev_start[i], col - 1});
                ++i;
            } else if (i >= prev.size() || cur[j].lo < prev[i].lo) {
                ++j;
            } else {
                if (prev[i] == cur[j]) {
                    cur_start[j] = prev_start[i];
                } else {
                    out.slabs.push_back({prev[i].lo, prev[i].hi, prev_start[i], col - 1});
                }
                ++i;
                ++j;
            }
        }
        prev = std::move(cur);
        prev_start = std::move(cur_start);
    }
    return out;
}

// A corner is a 2x2 zone whose two rows differ and whose two columns differ.
inline std::int64_t count_corners(const DenseMatrix& m) {
    if (m.n() < 2) return 0;
    std::int64_t corners = 0;
    for (Index i = 1; i < m.n(); ++i)
        for (Index j = 1; j < m.n(); ++j) {
            bool a = m.get(i, j), b = m.get(i, j + 1);
            bool c = m.get(i + 1, j), d = m.get(i + 1, j + 1);
            bool rows_differ = a != c || b != d;
            bool cols_differ = a != b || c != d;
            if (rows_differ && cols_differ) ++corners;
        }
    return corners;
}

// One merge of two consecutive blocks (index, index+1) of the current row or
// column partition.
struct ContractionStep {
    bool row_axis = true;
    Index index = 0;

    friend bool operator==(const ContractionStep&, const ContractionStep&) = default;
};

struct ContractionSequence {
    std::vector<ContractionStep> steps;
};

namespace detail {

inline void check_sequence_shape(Index n, const ContractionSequence& seq) {
    Index rows = 0, cols = 0;
    for (const ContractionStep& s : seq.steps) (s.row_axis ? rows : cols) += 1;
    if (rows != n - 1 || cols != n - 1)
        throw std::invalid_argument("contraction: expected " + std::to_string(n - 1) +
                                    " row and column merges, got " + std::to_string(rows) +
                                    "/" + std::to_string(cols));
}

}  // namespace detail

// Replays the sequence, tracking per-zone constancy incrementally; O(n^2)
// overall. Returns the maximum number of non-constant zones any block ever
// holds.
inline int verify_contraction_width(const DenseMatrix& m, const ContractionSequence& seq) {
    const Index n = m.n();
    detail::check_sequence_shape(n, seq);
    // zone[r][c]: 0 = all zeros, 1 = all ones, 2 = mixed
    std::vector<std::vector<std::uint8_t>> zone(n, std::vector<std::uint8_t>(n));
    for (Index r = 1; r <= n; ++r)
        for (Index c = 1; c <= n; ++c) zone[r - 1][c - 1] = m.get(r, c) ? 1 : 0;
    std::vector<int> row_nc(n, 0), col_nc(n, 0);
    int width = 0;
    auto combine = [](std::uint8_t a, std::uint8_t b) -> std::uint8_t {
        return a == b ? a : 2;
    };
    for (const ContractionStep& st : seq.steps) {
        std::size_t k = std::size_t(st.index) - 1;
        if (st.row_axis) {
            if (st.index < 1 || k + 1 >= zone.size())
                throw std::invalid_argument("contraction: row merge index " +
                                            std::to_string(st.index) + " out of range");
            int merged_nc = 0;
            for (std::size_t c = 0; c < zone[k].size(); ++c) {
                std::uint8_t before_a = zone[k][c], before_b = zone[k + 1][c];
                std::uint8_t after = combine(before_a, before_b);
                zone[k][c] = after;
                col_nc[c] += (after == 2) - (before_a == 2) - (before_b == 2);
                if (after == 2) ++merged_nc;
            }
            zone.erase(zone.begin() + k + 1);
            row_nc[k] = merged_nc;
            row_nc.erase(row_nc.begin() + k + 1);
        } else {
            if (st.index < 1 || zone.empty() || k + 1 >= zone[0].size())
                throw std::invalid_argument("contraction: column merge index " +
                                            std::to_string(st.index) + " out of range");
            int merged_nc = 0;
            for (std::size_t r = 0; r < zone.size(); ++r) {
                std::uint8_t before_a = zone[r][k], before_b = zone[r][k + 1];
                std::uint8_t after = combine(before_a, before_b);
                zone[r][k] = after;
                row_nc[r] += (after == 2) - (before_a == 2) - (before_b == 2);
                zone[r].erase(zone[r].begin() + k + 1);
                if (after == 2) ++merged_nc;
            }
            col_nc[k] = merged_nc;
            col_nc.erase(col_nc.begin() + k + 1);
        }
        for (std::size_t r = 0; r < zone.size(); ++r) width = std::max(width, row_nc[r]);
        for (std::size_t c = 0; c < (zone.empty() ? 0 : zone[0].size()); ++c)
            width = std::max(width, col_nc[c]);
    }
    return width;
}

// Same contract, recomputing every zone from the dense matrix at every step.
// Cubic; the cross-check for the incremental verifier.
inline int verify_contraction_width_naive(const DenseMatrix& m,
                                          const ContractionSequence& seq) {
    const Index n = m.n();
    detail::check_sequence_shape(n, seq);
    std::vector<Segment> rows, cols;
    for (Index i = 1; i <= n; ++i) {
        rows.push_back({i, i});
        cols.push_back({i, i});
    }
    auto zone_mixed = [&](const Segment& rb, const Segment& cb) {
        bool first = m.get(rb.lo, cb.lo);
        for (Index r = rb.lo; r <= rb.hi; ++r)
            for (Index c = cb.lo; c <= cb.hi; ++c)
                if (m.get(r, c) != first) return true;
        return false;
    };
    int width = 0;
    for (const ContractionStep& st : seq.steps) {
        auto& axis = st.row_axis ? rows : cols;
        std::size_t k = std::size_t(st.index) - 1;
        if (st.index < 1 || k + 1 >= axis.size())
            throw std::invalid_argument("contraction: merge index " +
                                        std::to_string(st.index) + " out of range");
        axis[k] = {axis[k].lo, axis[k + 1].hi};
        axis.erase(axis.begin() + k + 1);
        for (const Segment& rb : rows) {
            int nc = 0;
            for (const Segment& cb : cols) nc += zone_mixed(rb, cb);
            width = std::max(width, nc);
        }
        for (const Segment& cb : cols) {
            int nc = 0;
            for (const Segment& rb : rows) nc += zone_mixed(rb, cb);
            width = std::max(width, nc);
        }
    }
    return width;
}

// f_d = (16/3) (2d+3)^2 2^(4(2d+2)), kept exact as num/den.
struct FdConstant {
    __int128 num = 0;
    int den = 1;

    double approx() const { return double(num) / den; }

    // count <= f_d * scale, exactly.
    bool bounds(std::int64_t count, std::int64_t scale) const {
        return __int128(count) * den <= num * scale;
    }
};

inline FdConstant f_d_constant(int d) {
    if (d < 0 || d > 10) throw std::invalid_argument("f_d: d must be in [0, 10]");
    __int128 num = 16;
    num *= (2 * d + 3) * (2 * d + 3);
    num <<= 4 * (2 * d + 2);
    return {num, 3};
}

}  // namespace twm
