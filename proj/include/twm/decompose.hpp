#pragma once

// Canonical slab decomposition. Any slab decomposition K of a binary matrix
// is turned into the unique canonical one R (maximal runs of identical
// column strips) by three sweeps:
//
//   1. bucket K into per-column opening/closing segments O_i, C_i;
//   2. a left-to-right sweep over an adhesive segment set, maintaining
//      "stored segments == strips_{i+1}" and collecting the strips that die
//      after column i (B_i); a mirrored pass (columns reflected, O and C
//      exchanged) yields the strips born at column i (A_i);
//   3. an assembly pass pairing each B-event with the slab_start column
//      recorded by its A-event.
//
// Total O(n + |K| log log n). The Decomposer advances in bounded micro-tasks
// and reuses its scratch (adhesive set, mark table, buckets) across runs
// without O(n) clears; decompose() runs it to completion.

#include <cassert>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "twm/adhesive.hpp"
#include "twm/core.hpp"
#include "twm/work.hpp"

namespace twm {

struct OpenCloseBuckets {
    Index n = 0;
    std::vector<std::vector<Segment>> open;   // open[i]: rows of slabs with col_lo == i
    std::vector<std::vector<Segment>> close;  // close[i]: rows of slabs with col_hi == i
};

inline OpenCloseBuckets make_buckets(Index n, const std::vector<Slab>& slabs) {
    OpenCloseBuckets b;
    b.n = n;
    b.open.resize(std::size_t(n) + 2);
    b.close.resize(std::size_t(n) + 2);
    for (const Slab& s : slabs) {
        b.open[s.col_lo].push_back(s.rows());
        b.close[s.col_hi].push_back(s.rows());
    }
    return b;
}

// A_i / B_i tables: strips born at column i, strips dying after column i.
struct StripDelta {
    Index n = 0;
    std::vector<std::vector<Segment>> born;
    std::vector<std::vector<Segment>> died;
};

// Final pass: record slab_start on births, emit (a, b, slab_start[a], i) on
// deaths. Standalone reference route; the Decomposer runs the same pass
// incrementally.
inline std::vector<Slab> assemble_canonical(Index n, const StripDelta& delta) {
    std::vector<Index> slab_start(std::size_t(n) + 1, 0);
    std::vector<Slab> result;
    for (Index i = 1; i <= n; ++i) {
        for (const Segment& s : delta.born[i]) {
            if (slab_start[s.lo] != 0)
                throw std::runtime_error("assemble: birth over an unfinished slab at row " +
                                         std::to_string(s.lo));
            slab_start[s.lo] = i;
        }
        for (const Segment& s : delta.died[i]) {
            if (slab_start[s.lo] == 0)
                throw std::runtime_error("assemble: death without a matching birth at row " +
                                         std::to_string(s.lo));
            result.push_back({s.lo, s.hi, slab_start[s.lo], i});
            slab_start[s.lo] = 0;
        }
    }
    return result;
}

class Decomposer {
public:
    explicit Decomposer(Index n)
        : n_(n),
          strips_(n),
          marks_(std::size_t(n) + 2, 0),
          slab_start_(std::size_t(n) + 2, 0) {
        if (n < 1) throw std::invalid_argument("decompose: n must be >= 1");
        delta_.n = n;
        delta_.born.resize(std::size_t(n) + 2);
        delta_.died.resize(std::size_t(n) + 2);
        buckets_.n = n;
        buckets_.open.resize(std::size_t(n) + 2);
        buckets_.close.resize(std::size_t(n) + 2);
    }

    Index n() const { return n_; }

    // Begins a run on a new input. Scratch from the previous run is cleared
    // lazily (touched columns only) as the first micro-tasks.
    void start(std::vector<Slab> input) {
        input_ = std::move(input);
        result_.clear();
        phase_ = Phase::clear_scratch;
        clear_cursor_ = 0;
        cursor_ = 0;
        max_l_overshoot_ = 0;
    }

    bool done() const { return phase_ == Phase::done; }

    std::vector<Slab> take_result() {
        if (phase_ != Phase::done) throw std::logic_error("decompose: run not finished");
        return std::move(result_);
    }

    const OpenCloseBuckets& buckets() const { return buckets_; }
    const StripDelta& delta() const { return delta_; }

    // max over columns of |L| - (|C_i| + 2|O_{i+1}|); nonpositive when the
    // candidate-list bound holds.
    std::int64_t max_l_overshoot() const { return max_l_overshoot_; }

    // One micro-task of at most kMicroTaskMax work units; false when done.
    bool advance(WorkMeter& meter) {
        switch (phase_) {
            case Phase::clear_scratch:
                step_clear(meter);
                return true;
            case Phase::bucketize:
                step_bucketize(meter);
                return true;
            case Phase::sweep_init:
                step_sweep_init(meter);
                return true;
            case Phase::sweep:
                step_sweep(meter);
                return true;
            case Phase::assemble:
                return step_assemble(meter);
            case Phase::done:
                return false;
        }
        return false;
    }

private:
    enum class Phase { clear_scratch, bucketize, sweep_init, sweep, assemble, done };
    enum class Sub { collect_close, collect_open, split, merge_next, collect_b };

    static const std::vector<Segment>& empty_bucket() {
        static const std::vector<Segment> e;
        return e;
    }

    // Bucket views of the current pass. The mirrored pass reads column
    // n+1-j and exchanges the roles of O and C; row segments are unchanged.
    const std::vector<Segment>& open_at(Index j) const {
        if (j < 1 || j > n_) return empty_bucket();
        return reflected_ ? buckets_.close[n_ + 1 - j] : buckets_.open[j];
    }
    const std::vector<Segment>& close_at(Index j) const {
        if (j < 1 || j > n_) return empty_bucket();
        return reflected_ ? buckets_.open[n_ + 1 - j] : buckets_.close[j];
    }

    void step_clear(WorkMeter& meter) {
        meter.charge(1);
        std::size_t batch = 0;
        while (batch < 8 && clear_cursor_ < dirty_cols_.size()) {
            Index c = dirty_cols_[clear_cursor_++];
            buckets_.open[c].clear();
            buckets_.close[c].clear();
            delta_.born[c].clear();
            delta_.died[c].clear();
            ++batch;
        }
        if (clear_cursor_ >= dirty_cols_.size()) {
            dirty_cols_.clear();
            cursor_ = 0;
            phase_ = Phase::bucketize;
        }
    }

    void mark_dirty(Index c) {
        if (!col_dirty_marked(c)) dirty_cols_.push_back(c);
    }
    bool col_dirty_marked(Index c) {
        // Buckets or delta entries already nonempty mean c is recorded.
        return !buckets_.open[c].empty() || !buckets_.close[c].empty() ||
               !delta_.born[c].empty() || !delta_.died[c].empty();
    }

    void step_bucketize(WorkMeter& meter) {
        meter.charge(1);
        if (cursor_ < input_.size()) {
            const Slab& s = input_[cursor_++];
            mark_dirty(s.col_lo);
            buckets_.open[s.col_lo].push_back(s.rows());
            mark_dirty(s.col_hi);
            buckets_.close[s.col_hi].push_back(s.rows());
            return;
        }
        reflected_ = false;
        begin_sweep();
    }

    void begin_sweep() {
        assert(strips_.empty());
        phase_ = Phase::sweep_init;
        col_ = 1;
        idx_ = 0;
    }

    void step_sweep_init(WorkMeter& meter) {
        const auto& opens = open_at(1);
        if (idx_ < opens.size()) {
            std::uint64_t before = strips_.dictionary_calls();
            strips_.merge(opens[idx_++]);
            meter.charge(strips_.dictionary_calls() - before);
            return;
        }
        meter.charge(1);
        phase_ = Phase::sweep;
        sub_ = Sub::collect_close;
        idx_ = 0;
        candidates_.clear();
    }

    void push_candidate(const Segment& s) {
        if (marks_[s.lo]) return;
        marks_[s.lo] = 1;
        candidates_.push_back(s);
    }

    void step_sweep(WorkMeter& meter) {
        std::uint64_t before = strips_.dictionary_calls();
        switch (sub_) {
            case Sub::collect_close: {
                const auto& closes = close_at(col_);
                if (idx_ < closes.size()) {
                    auto host = strips_.containing(closes[idx_++]);
                    assert(host);
                    if (host) push_candidate(*host);
                    meter.charge(strips_.dictionary_calls() - before);
                    return;
                }
                sub_ = Sub::collect_open;
                idx_ = 0;
                meter.charge(1);
                return;
            }
            case Sub::collect_open: {
                const auto& opens = open_at(col_ + 1);
                if (idx_ < opens.size()) {
                    for (const Segment& s : strips_.adjacent(opens[idx_++]))
                        push_candidate(s);
                    meter.charge(strips_.dictionary_calls() - before);
                    return;
                }
                std::int64_t overshoot =
                    std::int64_t(candidates_.size()) -
                    (std::int64_t(close_at(col_).size()) + 2 * std::int64_t(opens.size()));
                max_l_overshoot_ = std::max(max_l_overshoot_, overshoot);
                sub_ = Sub::split;
                idx_ = 0;
                meter.charge(1);
                return;
            }
            case Sub::split: {
                const auto& closes = close_at(col_);
                if (idx_ < closes.size()) {
                    strips_.split(closes[idx_++]);
                    meter.charge(strips_.dictionary_calls() - before);
                    return;
                }
                sub_ = Sub::merge_next;
                idx_ = 0;
                meter.charge(1);
                return;
            }
            case Sub::merge_next: {
                const auto& opens = open_at(col_ + 1);
                if (idx_ < opens.size()) {
                    strips_.merge(opens[idx_++]);
                    meter.charge(strips_.dictionary_calls() - before);
                    return;
                }
                sub_ = Sub::collect_b;
                idx_ = 0;
                meter.charge(1);
                return;
            }
            case Sub::collect_b: {
                if (idx_ < candidates_.size()) {
                    const Segment s = candidates_[idx_++];
                    marks_[s.lo] = 0;
                    auto host = strips_.containing(s);
                    if (!host || *(host) != s) {
                        Index out_col = reflected_ ? n_ + 1 - col_ : col_;
                        mark_dirty(out_col);
                        auto& table = reflected_ ? delta_.born : delta_.died;
                        table[out_col].push_back(s);
                    }
                    meter.charge(strips_.dictionary_calls() - before + 1);
                    return;
                }
                candidates_.clear();
                meter.charge(1);
                if (col_ < n_) {
                    ++col_;
                    sub_ = Sub::collect_close;
                    idx_ = 0;
                    return;
                }
                // End of a pass; all strips have closed by column n.
                assert(strips_.empty());
                if (!reflected_) {
                    reflected_ = true;
                    begin_sweep();
                } else {
                    phase_ = Phase::assemble;
                    col_ = 1;
                    idx_ = 0;
                    in_died_ = false;
                }
                return;
            }
        }
    }

    bool step_assemble(WorkMeter& meter) {
        meter.charge(1);
        if (!in_died_) {
            const auto& born = delta_.born[col_];
            if (idx_ < born.size()) {
                const Segment& s = born[idx_++];
                if (slab_start_[s.lo] != 0)
                    throw std::runtime_error(
                        "decompose: inconsistent strip delta (double birth) at row " +
                        std::to_string(s.lo));
                slab_start_[s.lo] = col_;
                return true;
            }
            in_died_ = true;
            idx_ = 0;
        }
        const auto& died = delta_.died[col_];
        if (idx_ < died.size()) {
            const Segment& s = died[idx_++];
            if (slab_start_[s.lo] == 0)
                throw std::runtime_error(
                    "decompose: inconsistent strip delta (orphan death) at row " +
                    std::to_string(s.lo));
            result_.push_back({s.lo, s.hi, slab_start_[s.lo], col_});
            slab_start_[s.lo] = 0;
            return true;
        }
        if (col_ < n_) {
            ++col_;
            idx_ = 0;
            in_died_ = false;
            return true;
        }
        phase_ = Phase::done;
        return false;
    }

    Index n_;
    AdhesiveSegmentSet strips_;
    std::vector<std::uint8_t> marks_;
    std::vector<Index> slab_start_;
    std::vector<Index> dirty_cols_;

    OpenCloseBuckets buckets_;
    StripDelta delta_;
    std::vector<Slab> input_;
    std::vector<Slab> result_;
    std::vector<Segment> candidates_;

    Phase phase_ = Phase::done;
    Sub sub_ = Sub::collect_close;
    bool reflected_ = false;
    bool in_died_ = false;
    Index col_ = 1;
    std::size_t idx_ = 0;
    std::size_t cursor_ = 0;
    std::size_t clear_cursor_ = 0;
    std::int64_t max_l_overshoot_ = 0;
};

// Both sweeps on a fresh Decomposer; the A/B tables of K.
inline StripDelta strip_delta(Index n, const std::vector<Slab>& slabs) {
    Decomposer d(n);
    d.start(slabs);
    WorkMeter meter;
    while (d.advance(meter)) {
    }
    d.take_result();
    return d.delta();
}

inline SlabDecomposition decompose(const SlabDecomposition& input) {
    require_valid(input, "decompose");
    Decomposer d(input.n);
    d.start(input.slabs);
    WorkMeter meter;
    while (d.advance(meter)) {
    }
    return {input.n, d.take_result()};
}

}  // namespace twm
