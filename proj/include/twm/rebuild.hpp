#pragma once

// Resumable, budgeted recomputation pipeline shared by both dynamic engines.
// From a frozen snapshot (slab list P, pending map Q, locator for membership
// tests) it derives a slab decomposition K' of the snapshot matrix, runs the
// canonical decomposition, builds a fresh point locator, and finally replays
// a log of updates that arrived after the snapshot into the new pending
// maps. Phases advance monotonically; step(budget) never exceeds its budget
// (micro-tasks are bounded by kMicroTaskMax units).
//
// K' construction: 0-updates are assigned to the snapshot slabs containing
// them and each touched slab is cut into the rows above, the split row
// pieces between update columns, and the rows below; 1-updates outside every
// slab become 1x1 slabs, 1-updates inside a slab are already represented and
// are dropped. |K'| <= |P| + 3|Q|.

#include <cassert>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "twm/core.hpp"
#include "twm/decompose.hpp"
#include "twm/pending.hpp"
#include "twm/pointloc.hpp"
#include "twm/work.hpp"

namespace twm {

enum class RebuildPhase { extract, sweeps, locator, replay, done };

class RebuildStateMachine {
public:
    // `log` may be null (no replay phase). `decomposer` provides reusable
    // scratch; it must not be shared with another in-flight machine.
    RebuildStateMachine(Index n, std::shared_ptr<const PointLocator> snapshot,
                        const PendingUpdateMap& snapshot_pending, Decomposer& decomposer,
                        PlBackend backend, const std::vector<Cell>* log,
                        std::uint64_t pending_seed)
        : n_(n),
          snapshot_(std::move(snapshot)),
          snap_pending_(snapshot_pending),
          decomposer_(decomposer),
          backend_(backend),
          log_(log),
          pending_mut_(pending_seed),
          pending_frozen_(pending_seed ^ 0x517cc1b727220a95ull),
          it_(snap_pending_.begin()) {
        k_prime_.reserve(snapshot_->slab_count() + 2 * snap_pending_.size() + 1);
    }

    RebuildPhase phase() const { return phase_; }
    bool build_done() const {
        return phase_ == RebuildPhase::replay || phase_ == RebuildPhase::done;
    }
    bool caught_up() const {
        return build_done() && (log_ == nullptr || replay_cursor_ == log_->size());
    }
    std::size_t replay_cursor() const { return replay_cursor_; }
    std::size_t extracted_slabs() const { return extracted_; }
    std::uint64_t total_units() const { return total_units_; }

    // Runs micro-tasks while they fit in `budget` work units; returns the
    // units actually spent.
    std::uint64_t step(std::uint64_t budget) {
        WorkMeter m;
        while (!blocked() && m.units + kMicroTaskMax <= budget) advance_micro(m);
        total_units_ += m.units;
        return m.units;
    }

    // Consumes replay entries until `target_cursor` (or the log tail),
    // ignoring budgets. Used for the two-per-update catch-up rule and for
    // deadline recovery.
    std::uint64_t force_replay_to(std::size_t target_cursor) {
        WorkMeter m;
        while (!build_done()) advance_micro(m);
        while (log_ && replay_cursor_ < std::min(target_cursor, log_->size()))
            advance_micro(m);
        total_units_ += m.units;
        return m.units;
    }

    std::uint64_t finish_build() {
        WorkMeter m;
        while (!build_done()) advance_micro(m);
        total_units_ += m.units;
        return m.units;
    }

    std::uint64_t run_to_completion() {
        WorkMeter m;
        while (!blocked()) advance_micro(m);
        total_units_ += m.units;
        return m.units;
    }

    struct Products {
        std::shared_ptr<const PointLocator> locator;
        PendingUpdateMap pending_mut;
        PendingUpdateMap pending_frozen;
    };

    // Valid once caught_up(); the machine is spent afterwards.
    Products harvest() {
        if (!caught_up()) throw std::logic_error("rebuild: harvest before catch-up");
        return {std::move(new_locator_), std::move(pending_mut_), std::move(pending_frozen_)};
    }

private:
    enum class ExtractSub { enumerate, sort, alloc_lists, assign, emit };

    bool blocked() const {
        if (phase_ == RebuildPhase::done) return true;
        if (phase_ == RebuildPhase::replay)
            return log_ == nullptr || replay_cursor_ >= log_->size();
        return false;
    }

    void advance_micro(WorkMeter& m) {
        switch (phase_) {
            case RebuildPhase::extract:
                step_extract(m);
                return;
            case RebuildPhase::sweeps:
                if (!decomposer_.advance(m)) {
                    builder_.emplace(n_, decomposer_.take_result(), backend_);
                    phase_ = RebuildPhase::locator;
                }
                return;
            case RebuildPhase::locator:
                if (!builder_->advance(m)) {
                    new_locator_ =
                        std::make_shared<const PointLocator>(builder_->finish());
                    builder_.reset();
                    phase_ = log_ ? RebuildPhase::replay : RebuildPhase::done;
                }
                return;
            case RebuildPhase::replay: {
                if (log_ && replay_cursor_ < log_->size()) {
                    apply_replay((*log_)[replay_cursor_++], m);
                }
                return;
            }
            case RebuildPhase::done:
                return;
        }
    }

    void apply_replay(const Cell& p, WorkMeter& m) {
        auto v = pending_mut_.get(p);
        m.charge(1);
        bool bit;
        if (v) {
            bit = !*v;
        } else {
            bit = new_locator_->locate_id(p) < 0;  // flip of the located value
            m.charge(1);
        }
        pending_mut_.set(p, bit);
        pending_frozen_.set(p, bit);
        m.charge(2);
    }

    struct Update {
        Index row;
        Index col;
        bool bit;
    };

    void step_extract(WorkMeter& m) {
        switch (ex_sub_) {
            case ExtractSub::enumerate: {
                m.charge(1);
                if (it_ != snap_pending_.end()) {
                    Cell p = PendingUpdateMap::decode(it_->first);
                    updates_.push_back({p.row, p.col, it_->second != 0});
                    ++it_;
                    return;
                }
                ex_sub_ = ExtractSub::sort;
                sort_width_ = 1;
                sort_lo_ = 0;
                sort_buf_.resize(updates_.size());
                return;
            }
            case ExtractSub::sort:
                step_sort(m);
                return;
            case ExtractSub::alloc_lists: {
                m.charge(1);
                std::size_t target = snapshot_->slab_count();
                if (slab_lists_.size() < target) {
                    if (slab_lists_.capacity() < target) slab_lists_.reserve(target);
                    std::size_t stop = std::min(target, slab_lists_.size() + 64);
                    while (slab_lists_.size() < stop) slab_lists_.emplace_back();
                    return;
                }
                ex_sub_ = ExtractSub::assign;
                cursor_ = 0;
                return;
            }
            case ExtractSub::assign: {
                if (cursor_ < updates_.size()) {
                    const Update& u = updates_[cursor_++];
                    std::int32_t id = snapshot_->locate_id({u.row, u.col});
                    m.charge(2);
                    if (!u.bit) {
                        // 0-update: cut it out of its slab; already-zero cells
                        // outside every slab need nothing.
                        if (id >= 0) slab_lists_[id].push_back({u.row, u.col});
                    } else {
                        // 1-update: covered slabs already represent it.
                        if (id < 0) {
                            k_prime_.push_back({u.row, u.row, u.col, u.col});
                            m.charge(1);
                        }
                    }
                    return;
                }
                m.charge(1);
                ex_sub_ = ExtractSub::emit;
                cursor_ = 0;
                emit_pos_ = 0;
                return;
            }
            case ExtractSub::emit:
                step_emit(m);
                return;
        }
    }

    // Bottom-up mergesort of updates_ by (row, col), eight moves per task.
    void step_sort(WorkMeter& m) {
        m.charge(2);
        const std::size_t k = updates_.size();
        if (sort_width_ >= k || k < 2) {
            updates_.shrink_to_fit();
            ex_sub_ = ExtractSub::alloc_lists;
            return;
        }
        if (!merge_active_) {
            if (sort_lo_ >= k) {
                sort_width_ *= 2;
                sort_lo_ = 0;
                return;
            }
            merge_active_ = true;
            mi_ = sort_lo_;
            mj_ = std::min(sort_lo_ + sort_width_, k);
            mid_ = mj_;
            mhi_ = std::min(sort_lo_ + 2 * sort_width_, k);
            mo_ = sort_lo_;
            return;
        }
        auto less = [](const Update& a, const Update& b) {
            return a.row != b.row ? a.row < b.row : a.col < b.col;
        };
        int moves = 0;
        while (moves < 8 && mo_ < mhi_) {
            if (mi_ < mid_ && (mj_ >= mhi_ || !less(updates_[mj_], updates_[mi_])))
                sort_buf_[mo_++] = updates_[mi_++];
            else
                sort_buf_[mo_++] = updates_[mj_++];
            ++moves;
        }
        m.charge(std::uint64_t(moves) / 2);
        if (mo_ >= mhi_) {
            for (std::size_t i = sort_lo_; i < mhi_; ++i) updates_[i] = sort_buf_[i];
            merge_active_ = false;
            sort_lo_ += 2 * sort_width_;
        }
    }

    void emit(const Slab& s, WorkMeter& m) {
        k_prime_.push_back(s);
        ++extracted_;
        m.charge(1);
    }

    void step_emit(WorkMeter& m) {
        const auto& slabs = snapshot_->slabs();
        if (cursor_ >= slabs.size()) {
            m.charge(1);
            extracted_ = k_prime_.size();
            decomposer_.start(std::move(k_prime_));
            k_prime_.clear();
            phase_ = RebuildPhase::sweeps;
            return;
        }
        const Slab& P = slabs[cursor_];
        auto& list = slab_lists_[cursor_];
        if (list.empty()) {
            emit(P, m);
            ++cursor_;
            return;
        }
        if (emit_pos_ == 0) {
            remaining_top_ = P.row_lo;
            open_row_ = 0;
            prev_col_ = 0;
        }
        if (emit_pos_ < list.size()) {
            auto [row, col] = list[emit_pos_++];
            if (open_row_ != row) {
                if (open_row_ != 0 && prev_col_ <= P.col_hi)
                    emit({open_row_, open_row_, prev_col_, P.col_hi}, m);
                if (remaining_top_ <= row - 1)
                    emit({remaining_top_, row - 1, P.col_lo, P.col_hi}, m);
                open_row_ = row;
                prev_col_ = P.col_lo;
                remaining_top_ = row + 1;
            }
            if (prev_col_ <= col - 1) emit({row, row, prev_col_, col - 1}, m);
            prev_col_ = col + 1;
            m.charge(1);
            return;
        }
        if (open_row_ != 0 && prev_col_ <= P.col_hi)
            emit({open_row_, open_row_, prev_col_, P.col_hi}, m);
        if (remaining_top_ <= P.row_hi)
            emit({remaining_top_, P.row_hi, P.col_lo, P.col_hi}, m);
        m.charge(1);
        ++cursor_;
        emit_pos_ = 0;
        return;
    }

    Index n_;
    std::shared_ptr<const PointLocator> snapshot_;
    const PendingUpdateMap& snap_pending_;
    Decomposer& decomposer_;
    PlBackend backend_;
    const std::vector<Cell>* log_;

    RebuildPhase phase_ = RebuildPhase::extract;
    ExtractSub ex_sub_ = ExtractSub::enumerate;
    PendingUpdateMap pending_mut_;
    PendingUpdateMap pending_frozen_;
    PendingUpdateMap::Map::const_iterator it_;
    std::vector<Update> updates_;
    std::vector<Update> sort_buf_;
    std::size_t sort_width_ = 1, sort_lo_ = 0;
    bool merge_active_ = false;
    std::size_t mi_ = 0, mid_ = 0, mj_ = 0, mhi_ = 0, mo_ = 0;
    std::vector<std::vector<std::pair<Index, Index>>> slab_lists_;
    std::vector<Slab> k_prime_;
    std::size_t cursor_ = 0;
    std::size_t emit_pos_ = 0;
    Index remaining_top_ = 0, open_row_ = 0, prev_col_ = 0;
    std::size_t extracted_ = 0;
    std::optional<PointLocatorBuilder> builder_;
    std::shared_ptr<const PointLocator> new_locator_;
    std::size_t replay_cursor_ = 0;
    std::uint64_t total_units_ = 0;
};

}  // namespace twm
