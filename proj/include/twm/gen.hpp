#pragma once

// Test-instance generators. All outputs are deterministic in the seed.
//
// gen_disjoint_slabs: random pairwise-disjoint slab sets via recursive
// guillotine partitioning (disjoint by construction, no rejection).
//
// gen_bounded_width: matrices carrying a contraction-sequence witness of
// width <= d, built by reverse contraction: start from a single block,
// repeatedly split a block in two (values duplicate), and flip whole zones
// of the current partition. A ledger over the split history tracks, for
// every block that ever existed, an upper bound on the number of
// non-constant zones any replay of the witness can see in it; flips that
// would push a bound past d are rejected. Rejection can make the output
// low-entropy but never invalid.

#include <cstdint>
#include <random>
#include <unordered_set>
#include <utility>
#include <vector>

#include "twm/core.hpp"
#include "twm/oracle.hpp"

namespace twm {

inline SlabDecomposition gen_disjoint_slabs(Index n, std::size_t k, std::uint64_t seed) {
    std::mt19937_64 rng(seed ^ 0xabcdef1234567890ull);
    SlabDecomposition out;
    out.n = n;
    if (k == 0) return out;
    // Guillotine-split the square into about 2k cells, then keep a coin-flip
    // subset (the dropped cells become the zero background).
    std::vector<Slab> stack{{1, n, 1, n}};
    std::vector<Slab> cells;
    while (!stack.empty()) {
        Slab s = stack.back();
        stack.pop_back();
        bool splittable = s.row_lo < s.row_hi || s.col_lo < s.col_hi;
        if (!splittable || cells.size() + stack.size() + 1 >= 2 * k) {
            cells.push_back(s);
            continue;
        }
        bool split_rows = s.row_lo < s.row_hi &&
                          (s.col_lo == s.col_hi || rng() % 2 == 0);
        if (split_rows) {
            Index cut = s.row_lo + Index(rng() % std::uint64_t(s.row_hi - s.row_lo));
            stack.push_back({s.row_lo, cut, s.col_lo, s.col_hi});
            stack.push_back({cut + 1, s.row_hi, s.col_lo, s.col_hi});
        } else {
            Index cut = s.col_lo + Index(rng() % std::uint64_t(s.col_hi - s.col_lo));
            stack.push_back({s.row_lo, s.row_hi, s.col_lo, cut});
            stack.push_back({s.row_lo, s.row_hi, cut + 1, s.col_hi});
        }
    }
    for (const Slab& s : cells) {
        if (out.slabs.size() >= k) break;
        if (rng() % 2 == 0) out.slabs.push_back(s);
    }
    return out;
}

inline std::vector<TraceOp> gen_trace(Index n, std::size_t ops, std::uint64_t seed,
                                      double query_ratio) {
    std::mt19937_64 rng(seed ^ 0x7261636574726163ull);
    std::uniform_int_distribution<Index> coord(1, n);
    std::bernoulli_distribution is_query(query_ratio);
    std::vector<TraceOp> out;
    out.reserve(ops);
    for (std::size_t i = 0; i < ops; ++i)
        out.push_back({is_query(rng), {coord(rng), coord(rng)}});
    return out;
}

// Split history of one axis plus the zone ledger shared by both axes.
class BlockLedger {
public:
    explicit BlockLedger(Index n, int d) : n_(n), d_(d) {
        row_nodes_.push_back({{1, n}, -1, 0});
        col_nodes_.push_back({{1, n}, -1, 0});
        row_alive_ = {0};
        col_alive_ = {0};
        row_cnt_.push_back(0);
        col_cnt_.push_back(0);
    }

    std::size_t row_blocks() const { return row_alive_.size(); }
    std::size_t col_blocks() const { return col_alive_.size(); }
    Segment row_block(std::size_t pos) const { return row_nodes_[row_alive_[pos]].range; }
    Segment col_block(std::size_t pos) const { return col_nodes_[col_alive_[pos]].range; }

    // Splits the block at `pos` (0-based) after offset `at` within it and
    // records the step; reversing the recorded steps yields the witness.
    void split(bool row_axis, std::size_t pos, Index at) {
        auto& nodes = row_axis ? row_nodes_ : col_nodes_;
        auto& alive = row_axis ? row_alive_ : col_alive_;
        auto& cnt = row_axis ? row_cnt_ : col_cnt_;
        ++time_;
        std::int32_t id = alive[pos];
        Segment r = nodes[id].range;
        std::int32_t a = std::int32_t(nodes.size());
        nodes.push_back({{r.lo, at}, id, time_});
        std::int32_t b = std::int32_t(nodes.size());
        nodes.push_back({{at + 1, r.hi}, id, time_});
        cnt.push_back(0);
        cnt.push_back(0);
        alive[pos] = a;
        alive.insert(alive.begin() + pos + 1, b);
        steps_.push_back({row_axis, Index(pos) + 1});
    }

    // Attempts to flip the zone at (row position, col position) of the
    // current partition in `m`. Returns false (no change) if some block's
    // ledger bound would exceed d.
    bool try_flip(DenseMatrix& m, std::size_t rpos, std::size_t cpos) {
        std::int32_t rn = row_alive_[rpos];
        std::int32_t cn = col_alive_[cpos];
        // Walk the co-alive ancestor pairs, newest first. The current pair
        // itself stays uniform under a whole-zone flip.
        std::vector<std::pair<std::int32_t, std::int32_t>> fresh;
        std::int32_t r = rn, c = cn;
        while (r != 0 || c != 0) {
            bool move_row = c == 0 || (r != 0 && row_nodes_[r].birth > col_nodes_[c].birth);
            if (move_row)
                r = row_nodes_[r].parent;
            else
                c = col_nodes_[c].parent;
            if (!marked_.count(key(r, c))) fresh.push_back({r, c});
        }
        // Each fresh pair raises the bound of both of its blocks.
        for (auto [fr, fc] : fresh) {
            int dr = 0, dc = 0;
            for (auto [gr, gc] : fresh) {
                if (gr == fr) ++dr;
                if (gc == fc) ++dc;
            }
            if (row_cnt_[fr] + dr > d_ || col_cnt_[fc] + dc > d_) return false;
        }
        for (auto [fr, fc] : fresh) {
            marked_.insert(key(fr, fc));
            ++row_cnt_[fr];
            ++col_cnt_[fc];
        }
        Segment rows = row_nodes_[rn].range, cols = col_nodes_[cn].range;
        for (Index i = rows.lo; i <= rows.hi; ++i)
            for (Index j = cols.lo; j <= cols.hi; ++j) m.flip(i, j);
        return true;
    }

    // Recorded splits reversed into a discrete-to-trivial merge sequence.
    ContractionSequence witness() const {
        ContractionSequence seq;
        seq.steps.assign(steps_.rbegin(), steps_.rend());
        return seq;
    }

private:
    struct Node {
        Segment range;
        std::int32_t parent;
        std::int32_t birth;
    };

    static std::uint64_t key(std::int32_t r, std::int32_t c) {
        return (std::uint64_t(std::uint32_t(r)) << 32) | std::uint32_t(c);
    }

    Index n_;
    int d_;
    std::int32_t time_ = 0;
    std::vector<Node> row_nodes_, col_nodes_;
    std::vector<std::int32_t> row_alive_, col_alive_;
    std::vector<int> row_cnt_, col_cnt_;
    std::unordered_set<std::uint64_t> marked_;
    std::vector<ContractionStep> steps_;
};

struct WitnessedMatrix {
    DenseMatrix matrix;
    ContractionSequence witness;
};

inline WitnessedMatrix gen_bounded_width(Index n, int d, std::uint64_t seed,
                                         int flips_per_split = 1) {
    if (d < 1) throw std::invalid_argument("gen_bounded_width: d must be >= 1");
    std::mt19937_64 rng(seed ^ 0x77696474686d6174ull);
    DenseMatrix m(n);
    if (rng() % 2) {
        for (Index i = 1; i <= n; ++i)
            for (Index j = 1; j <= n; ++j) m.set(i, j, true);
    }
    BlockLedger ledger(n, d);
    auto splittable = [&](bool row_axis) {
        std::vector<std::size_t> out;
        std::size_t count = row_axis ? ledger.row_blocks() : ledger.col_blocks();
        for (std::size_t i = 0; i < count; ++i) {
            Segment s = row_axis ? ledger.row_block(i) : ledger.col_block(i);
            if (s.lo < s.hi) out.push_back(i);
        }
        return out;
    };
    while (true) {
        auto rows = splittable(true), cols = splittable(false);
        if (rows.empty() && cols.empty()) break;
        bool row_axis = cols.empty() || (!rows.empty() && rng() % 2 == 0);
        const auto& cand = row_axis ? rows : cols;
        std::size_t pos = cand[rng() % cand.size()];
        Segment s = row_axis ? ledger.row_block(pos) : ledger.col_block(pos);
        Index at = s.lo + Index(rng() % std::uint64_t(s.hi - s.lo));
        ledger.split(row_axis, pos, at);
        for (int f = 0; f < flips_per_split; ++f) {
            std::size_t rp = rng() % ledger.row_blocks();
            std::size_t cp = rng() % ledger.col_blocks();
            ledger.try_flip(m, rp, cp);
        }
    }
    return {std::move(m), ledger.witness()};
}

}  // namespace twm
