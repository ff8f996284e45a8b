#pragma once

// Static 2D orthogonal point location over disjoint slabs: build once, then
// answer "which slab contains (row, col)" queries.
//
// Baseline backend: a column sweep over the at most 2N column-boundary
// events. The active row intervals live in a path-copied (persistent) AVL
// tree; every column keeps a pointer to its version's root, so a query is one
// array read plus an O(log N) descent. Build O(n + N log N), space
// O(n + N log N) words.
//
// Fast backend: same sweep, but distinct versions are additionally flattened
// into contiguous sorted arrays searched by branchless binary search. The
// flattened pool is capped at the baseline's asymptotic space budget; columns
// past the cap fall back to the tree. Same answers, better query constants.
//
// The builder advances in bounded micro-tasks so a rebuild scheduler can
// spread construction over many updates; build_point_locator() just runs it
// to completion.

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <vector>

#include "twm/core.hpp"
#include "twm/work.hpp"

namespace twm {

enum class PlBackend { baseline, fast };

class PointLocator {
public:
    Index n() const { return n_; }
    std::size_t slab_count() const { return slabs_.size(); }
    const std::vector<Slab>& slabs() const { return slabs_; }
    PlBackend backend() const { return backend_; }

    // Slab id containing p, or -1.
    std::int32_t locate_id(const Cell& p) const {
        int visits = 0;
        return locate_impl(p, visits);
    }

    std::optional<Slab> locate(const Cell& p) const {
        std::int32_t id = locate_id(p);
        if (id < 0) return std::nullopt;
        return slabs_[id];
    }

    // As locate, also reporting the number of node visits / search steps.
    std::optional<Slab> locate_instrumented(const Cell& p, int& comparisons) const {
        comparisons = 0;
        std::int32_t id = locate_impl(p, comparisons);
        if (id < 0) return std::nullopt;
        return slabs_[id];
    }

    std::size_t arena_nodes() const { return arena_.size(); }

private:
    friend class PointLocatorBuilder;

    struct Node {
        std::int32_t left = -1;
        std::int32_t right = -1;
        Index lo = 0;
        Index hi = 0;
        std::int32_t slab = -1;
        std::int16_t height = 1;
    };

    struct FlatEntry {
        Index lo;
        Index hi;
        std::int32_t slab;
    };

    std::int32_t locate_impl(const Cell& p, int& visits) const {
        require_cell(n_, p, "locate");
        if (backend_ == PlBackend::fast && column_flat_off_[p.col] >= 0) {
            std::int32_t off = column_flat_off_[p.col];
            std::int32_t len = column_flat_len_[p.col];
            std::int32_t lo = 0, hi = len;  // first entry with .lo > p.row
            while (lo < hi) {
                ++visits;
                std::int32_t mid = (lo + hi) / 2;
                if (flat_[off + mid].lo <= p.row)
                    lo = mid + 1;
                else
                    hi = mid;
            }
            if (lo == 0) return -1;
            const FlatEntry& e = flat_[off + lo - 1];
            return p.row <= e.hi ? e.slab : -1;
        }
        std::int32_t cur = column_root_[p.col];
        while (cur >= 0) {
            ++visits;
            const Node& nd = arena_[cur];
            if (p.row < nd.lo)
                cur = nd.left;
            else if (p.row > nd.hi)
                cur = nd.right;
            else
                return nd.slab;
        }
        return -1;
    }

    Index n_ = 0;
    PlBackend backend_ = PlBackend::baseline;
    std::vector<Slab> slabs_;
    std::vector<Node> arena_;
    std::vector<std::int32_t> column_root_;      // [0..n], entry 0 unused
    std::vector<std::int32_t> column_flat_off_;  // fast backend, -1 = use tree
    std::vector<std::int32_t> column_flat_len_;
    std::vector<FlatEntry> flat_;
};

class PointLocatorBuilder {
public:
    PointLocatorBuilder(Index n, std::vector<Slab> slabs,
                        PlBackend backend = PlBackend::baseline)
        : n_(n) {
        if (n < 1) throw std::invalid_argument("pointloc: n must be >= 1");
        for (const Slab& s : slabs)
            if (!slab_in_range(s, n))
                throw std::invalid_argument("pointloc: slab " + to_string(s) +
                                            " out of range for n=" + std::to_string(n));
        out_.n_ = n;
        out_.backend_ = backend;
        out_.slabs_ = std::move(slabs);
        out_.arena_.reserve(out_.slabs_.size() * 4 + 16);
        flat_cap_ = 0;
        if (backend == PlBackend::fast) {
            std::size_t nslabs = out_.slabs_.size();
            int lg = 1;
            while ((std::size_t(1) << lg) < nslabs + 2) ++lg;
            flat_cap_ = 3 * (nslabs * std::size_t(lg) + std::size_t(n)) + 64;
        }
    }

    bool done() const { return phase_ == Phase::done; }

    // Performs one micro-task (at most kMicroTaskMax units). Returns false
    // once the build is complete.
    bool advance(WorkMeter& meter) {
        switch (phase_) {
            case Phase::alloc: {
                std::size_t target = std::size_t(n_) + 2;
                if (grow_chunk(out_.column_root_, target, std::int32_t(-1)) ||
                    grow_chunk(removes_, target, std::vector<std::int32_t>{}) ||
                    grow_chunk(adds_, target, std::vector<std::int32_t>{})) {
                    meter.charge(1);
                    return true;
                }
                if (out_.backend_ == PlBackend::fast &&
                    (grow_chunk(out_.column_flat_off_, target, std::int32_t(-1)) ||
                     grow_chunk(out_.column_flat_len_, target, std::int32_t(0)))) {
                    meter.charge(1);
                    return true;
                }
                phase_ = Phase::scatter;
                return true;
            }
            case Phase::scatter: {
                if (cursor_ < out_.slabs_.size()) {
                    const Slab& s = out_.slabs_[cursor_];
                    adds_[s.col_lo].push_back(std::int32_t(cursor_));
                    removes_[s.col_hi + 1].push_back(std::int32_t(cursor_));
                    ++cursor_;
                    meter.charge(1);
                    return true;
                }
                cursor_ = 0;
                col_ = 1;
                ev_ = 0;
                in_adds_ = false;
                phase_ = Phase::columns;
                return true;
            }
            case Phase::columns: {
                if (op_active_) {
                    step_op(meter);
                    return true;
                }
                if (!in_adds_ && ev_ < removes_[col_].size()) {
                    begin_erase(out_.slabs_[removes_[col_][ev_]]);
                    ++ev_;
                    meter.charge(1);
                    return true;
                }
                if (!in_adds_) {
                    in_adds_ = true;
                    ev_ = 0;
                }
                if (ev_ < adds_[col_].size()) {
                    begin_insert(adds_[col_][ev_]);
                    ++ev_;
                    meter.charge(1);
                    return true;
                }
                out_.column_root_[col_] = root_;
                meter.charge(1);
                ++col_;
                ev_ = 0;
                in_adds_ = false;
                if (col_ > n_) {
                    col_ = 1;
                    phase_ = out_.backend_ == PlBackend::fast ? Phase::flatten
                                                              : Phase::done;
                }
                return phase_ != Phase::done;
            }
            case Phase::flatten: {
                step_flatten(meter);
                return phase_ != Phase::done;
            }
            case Phase::done:
                return false;
        }
        return false;
    }

    PointLocator finish() {
        if (phase_ != Phase::done) throw std::logic_error("pointloc: build not finished");
        out_.arena_.shrink_to_fit();
        return std::move(out_);
    }

private:
    enum class Phase { alloc, scatter, columns, flatten, done };
    enum class OpPhase { descend, ascend };

    using Node = PointLocator::Node;

    template <typename T, typename V>
    static bool grow_chunk(std::vector<T>& v, std::size_t target, V init) {
        if (v.size() >= target) return false;
        if (v.capacity() < target) v.reserve(target);
        std::size_t stop = std::min(target, v.size() + 64);
        while (v.size() < stop) v.push_back(init);
        return v.size() < target;
    }

    std::int16_t height(std::int32_t id) const {
        return id < 0 ? std::int16_t(0) : out_.arena_[id].height;
    }

    std::int32_t alloc(const Node& nd) {
        out_.arena_.push_back(nd);
        return std::int32_t(out_.arena_.size() - 1);
    }

    void fix_height(std::int32_t id) {
        Node& nd = out_.arena_[id];
        nd.height = std::int16_t(1 + std::max(height(nd.left), height(nd.right)));
    }

    // Rebalances the freshly created node `x` (mutable until published).
    // Rotated-in children are copies of immutable nodes. Returns the subtree
    // root and the number of extra nodes created.
    std::int32_t rebalance(std::int32_t x, int& made) {
        fix_height(x);
        int bf = height(out_.arena_[x].left) - height(out_.arena_[x].right);
        if (bf > 1) {
            std::int32_t l = out_.arena_[x].left;
            if (height(out_.arena_[l].left) >= height(out_.arena_[l].right)) {
                std::int32_t l2 = alloc(out_.arena_[l]);
                ++made;
                out_.arena_[x].left = out_.arena_[l2].right;
                fix_height(x);
                out_.arena_[l2].right = x;
                fix_height(l2);
                return l2;
            }
            std::int32_t lr = out_.arena_[l].right;
            std::int32_t lr2 = alloc(out_.arena_[lr]);
            std::int32_t l2 = alloc(out_.arena_[l]);
            made += 2;
            out_.arena_[l2].right = out_.arena_[lr2].left;
            fix_height(l2);
            out_.arena_[x].left = out_.arena_[lr2].right;
            fix_height(x);
            out_.arena_[lr2].left = l2;
            out_.arena_[lr2].right = x;
            fix_height(lr2);
            return lr2;
        }
        if (bf < -1) {
            std::int32_t r = out_.arena_[x].right;
            if (height(out_.arena_[r].right) >= height(out_.arena_[r].left)) {
                std::int32_t r2 = alloc(out_.arena_[r]);
                ++made;
                out_.arena_[x].right = out_.arena_[r2].left;
                fix_height(x);
                out_.arena_[r2].left = x;
                fix_height(r2);
                return r2;
            }
            std::int32_t rl = out_.arena_[r].left;
            std::int32_t rl2 = alloc(out_.arena_[rl]);
            std::int32_t r2 = alloc(out_.arena_[r]);
            made += 2;
            out_.arena_[r2].left = out_.arena_[rl2].right;
            fix_height(r2);
            out_.arena_[x].right = out_.arena_[rl2].left;
            fix_height(x);
            out_.arena_[rl2].left = x;
            out_.arena_[rl2].right = r2;
            fix_height(rl2);
            return rl2;
        }
        return x;
    }

    void begin_insert(std::int32_t slab_id) {
        op_active_ = true;
        op_insert_ = true;
        op_slab_ = slab_id;
        op_lo_ = out_.slabs_[slab_id].row_lo;
        op_hi_ = out_.slabs_[slab_id].row_hi;
        cur_ = root_;
        stack_.clear();
        splice_pos_ = -1;
        mode_min_ = false;
        op_phase_ = OpPhase::descend;
    }

    void begin_erase(const Slab& s) {
        op_active_ = true;
        op_insert_ = false;
        op_lo_ = s.row_lo;
        op_hi_ = s.row_hi;
        cur_ = root_;
        stack_.clear();
        splice_pos_ = -1;
        mode_min_ = false;
        op_phase_ = OpPhase::descend;
    }

    void step_op(WorkMeter& meter) {
        if (op_phase_ == OpPhase::descend) {
            step_descend(meter);
        } else {
            step_ascend(meter);
        }
    }

    void step_descend(WorkMeter& meter) {
        meter.charge(1);
        if (mode_min_) {
            const Node nd = out_.arena_[cur_];
            if (nd.left < 0) {  // min of the right subtree; splice it upward
                splice_lo_ = nd.lo;
                splice_hi_ = nd.hi;
                splice_slab_ = nd.slab;
                carry_ = nd.right;
                op_phase_ = OpPhase::ascend;
                return;
            }
            stack_.push_back({cur_, true});
            cur_ = nd.left;
            return;
        }
        if (op_insert_) {
            if (cur_ < 0) {
                Node leaf;
                leaf.lo = op_lo_;
                leaf.hi = op_hi_;
                leaf.slab = op_slab_;
                carry_ = alloc(leaf);
                op_phase_ = OpPhase::ascend;
                return;
            }
            const Node nd = out_.arena_[cur_];
            if (op_lo_ <= nd.hi && nd.lo <= op_hi_)
                throw std::invalid_argument(
                    "pointloc: slabs " + to_string(out_.slabs_[op_slab_]) + " and " +
                    to_string(out_.slabs_[nd.slab]) + " overlap");
            bool left = op_lo_ < nd.lo;
            stack_.push_back({cur_, left});
            cur_ = left ? nd.left : nd.right;
            return;
        }
        // erase
        if (cur_ < 0) throw std::logic_error("pointloc: erase of a missing interval");
        const Node nd = out_.arena_[cur_];
        if (op_lo_ == nd.lo) {
            if (nd.left < 0 || nd.right < 0) {
                carry_ = nd.left < 0 ? nd.right : nd.left;
                op_phase_ = OpPhase::ascend;
                return;
            }
            splice_pos_ = std::int32_t(stack_.size());
            stack_.push_back({cur_, false});
            mode_min_ = true;
            cur_ = nd.right;
            return;
        }
        bool left = op_lo_ < nd.lo;
        stack_.push_back({cur_, left});
        cur_ = left ? nd.left : nd.right;
    }

    void step_ascend(WorkMeter& meter) {
        if (stack_.empty()) {
            root_ = carry_;
            op_active_ = false;
            meter.charge(1);
            return;
        }
        Frame f = stack_.back();
        stack_.pop_back();
        int made = 1;
        std::int32_t nid;
        if (splice_pos_ == std::int32_t(stack_.size())) {
            // This frame is the node being erased; rebuild it around the
            // spliced-in successor payload.
            Node repl = out_.arena_[f.node];
            repl.lo = splice_lo_;
            repl.hi = splice_hi_;
            repl.slab = splice_slab_;
            repl.right = carry_;
            nid = alloc(repl);
            splice_pos_ = -1;
        } else {
            Node copy = out_.arena_[f.node];
            if (f.went_left)
                copy.left = carry_;
            else
                copy.right = carry_;
            nid = alloc(copy);
        }
        carry_ = rebalance(nid, made);
        meter.charge(std::uint64_t(made));
    }

    void step_flatten(WorkMeter& meter) {
        meter.charge(1);
        if (!flat_active_) {
            if (col_ > n_) {
                phase_ = Phase::done;
                return;
            }
            if (col_ > 1 && out_.column_root_[col_] == out_.column_root_[col_ - 1]) {
                out_.column_flat_off_[col_] = out_.column_flat_off_[col_ - 1];
                out_.column_flat_len_[col_] = out_.column_flat_len_[col_ - 1];
                ++col_;
                return;
            }
            if (flat_exhausted_ || out_.column_root_[col_] < 0) {
                out_.column_flat_off_[col_] =
                    out_.column_root_[col_] < 0 ? std::int32_t(out_.flat_.size()) : -1;
                out_.column_flat_len_[col_] = 0;
                ++col_;
                return;
            }
            flat_active_ = true;
            flat_start_ = std::int32_t(out_.flat_.size());
            tstack_.clear();
            tcur_ = out_.column_root_[col_];
            return;
        }
        // In-order traversal, up to 4 entries per micro-task.
        int emitted = 0;
        while (emitted < 4) {
            while (tcur_ >= 0) {
                tstack_.push_back(tcur_);
                tcur_ = out_.arena_[tcur_].left;
            }
            if (tstack_.empty()) break;
            std::int32_t id = tstack_.back();
            tstack_.pop_back();
            const Node& nd = out_.arena_[id];
            out_.flat_.push_back({nd.lo, nd.hi, nd.slab});
            ++emitted;
            tcur_ = nd.right;
        }
        meter.charge(std::uint64_t(emitted));
        if (tcur_ < 0 && tstack_.empty()) {
            flat_active_ = false;
            if (out_.flat_.size() > flat_cap_) {
                // Over budget: drop this version's entries, use trees from here on.
                out_.flat_.resize(flat_start_);
                flat_exhausted_ = true;
                out_.column_flat_off_[col_] = -1;
                out_.column_flat_len_[col_] = 0;
            } else {
                out_.column_flat_off_[col_] = flat_start_;
                out_.column_flat_len_[col_] = std::int32_t(out_.flat_.size()) - flat_start_;
            }
            ++col_;
        }
    }

    struct Frame {
        std::int32_t node;
        bool went_left;
    };

    Index n_;
    PointLocator out_;
    Phase phase_ = Phase::alloc;
    std::size_t cursor_ = 0;
    std::vector<std::vector<std::int32_t>> removes_;
    std::vector<std::vector<std::int32_t>> adds_;
    Index col_ = 1;
    std::size_t ev_ = 0;
    bool in_adds_ = false;
    std::int32_t root_ = -1;

    // Pausable tree-op state
    bool op_active_ = false;
    bool op_insert_ = false;
    OpPhase op_phase_ = OpPhase::descend;
    std::int32_t op_slab_ = -1;
    Index op_lo_ = 0, op_hi_ = 0;
    std::int32_t cur_ = -1;
    std::int32_t carry_ = -1;
    std::vector<Frame> stack_;
    std::int32_t splice_pos_ = -1;
    bool mode_min_ = false;
    Index splice_lo_ = 0, splice_hi_ = 0;
    std::int32_t splice_slab_ = -1;

    // Flatten state
    bool flat_active_ = false;
    bool flat_exhausted_ = false;
    std::int32_t flat_start_ = 0;
    std::size_t flat_cap_ = 0;
    std::vector<std::int32_t> tstack_;
    std::int32_t tcur_ = -1;
};

inline PointLocator build_point_locator(Index n, std::vector<Slab> slabs,
                                        PlBackend backend = PlBackend::baseline) {
    PointLocatorBuilder builder(n, std::move(slabs), backend);
    WorkMeter meter;
    while (builder.advance(meter)) {
    }
    return builder.finish();
}

inline PointLocator build_point_locator(const SlabDecomposition& dec,
                                        PlBackend backend = PlBackend::baseline) {
    require_valid(dec, "pointloc");
    return build_point_locator(dec.n, dec.slabs, backend);
}

}  // namespace twm
