#pragma once

// Worst-case dynamic matrix: two alternating generations of the amortized
// structure with the rebuild distributed over an epoch of updates.
//
// A generation consists of a shared immutable locator and two pending maps:
// the mutable copy serves queries and updates for two epochs, the frozen
// copy stops changing at takeover and acts as the snapshot the next
// generation is built from. While generation g serves its first epoch, the
// successor's state machine consumes a per-update work budget to extract,
// decompose, and build; during the second epoch it catches up by replaying
// two logged updates per incoming one. At the next boundary roles rotate.
//
// A successor that misses its deadline is completed synchronously and the
// violation counter is incremented; with adequate budgets it stays zero.
// Inner structures never rebuild on their own (the threshold mechanism is
// replaced by the epoch schedule), so no update ever pays for a full
// rebuild.

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "twm/core.hpp"
#include "twm/decompose.hpp"
#include "twm/dynmatrix.hpp"
#include "twm/pending.hpp"
#include "twm/pointloc.hpp"
#include "twm/rebuild.hpp"

namespace twm {

struct WcConfig {
    std::uint64_t epoch = 0;   // L; 0 = default_threshold(n)
    std::uint64_t budget = 0;  // B per update; 0 = 2 * W_est / L, clamped
    EngineConfig engine;       // hash seed and locator backend
    bool collect_stats = false;
};

class WorstCaseMatrix {
public:
    explicit WorstCaseMatrix(const SlabDecomposition& init, WcConfig cfg = {})
        : n_(init.n), cfg_(cfg), decomposer_(init.n) {
        require_valid(init, "wc_init");
        epoch_len_ = cfg.epoch == 0 ? default_threshold(init.n) : cfg.epoch;
        seed_ = cfg.engine.resolve_seed();
        active_.locator = std::make_shared<const PointLocator>(
            build_point_locator(decompose(init), cfg_.engine.backend));
        active_.q_mut = PendingUpdateMap(seed_);
        active_.q_frozen = PendingUpdateMap(seed_ ^ 0xd1b54a32d192ed03ull);
    }

    Index n() const { return n_; }
    std::uint64_t epoch_length() const { return epoch_len_; }

    bool query(const Cell& p) const {
        require_cell(n_, p, "wc_query");
        if (auto v = active_.q_mut.get(p)) return *v;
        return active_.locator->locate_id(p) >= 0;
    }

    void update(const Cell& p) {
        require_cell(n_, p, "wc_update");
        WorkMeter m;

        if (serve_count_ == epoch_len_ && successor_ && !successor_->machine.build_done()) {
            // Construction epoch over, build phases unfinished.
            ++violations_;
            m.charge(successor_->machine.finish_build());
        }
        if (serve_count_ == 2 * epoch_len_) take_over(m);
        if (!successor_) begin_successor();

        // The active mutable copy absorbs the flip; the frozen copy stays at
        // its takeover state.
        auto v = active_.q_mut.get(p);
        m.charge(1);
        if (v) {
            active_.q_mut.set(p, !*v);
        } else {
            bool bit = active_.locator->locate_id(p) >= 0;
            m.charge(1);
            active_.q_mut.set(p, !bit);
        }
        m.charge(1);

        log_.push_back(p);
        m.charge(1);

        std::size_t before = successor_->machine.replay_cursor();
        m.charge(successor_->machine.step(budget_));
        if (serve_count_ >= epoch_len_) {
            // Catch-up epoch: two replayed entries per incoming update.
            std::size_t consumed = successor_->machine.replay_cursor() - before;
            if (consumed < 2 && successor_->machine.build_done())
                m.charge(successor_->machine.force_replay_to(before + 2));
        }

        ++serve_count_;
        last_update_units_ = m.units;
        max_update_units_ = std::max(max_update_units_, m.units);
        if (cfg_.collect_stats) unit_trace_.push_back(m.units);
    }

    std::uint64_t handoffs() const { return handoffs_; }
    std::uint64_t violations() const { return violations_; }
    std::uint64_t budget() const { return budget_; }
    std::uint64_t last_update_units() const { return last_update_units_; }
    std::uint64_t max_update_units() const { return max_update_units_; }
    const std::vector<std::uint64_t>& unit_trace() const { return unit_trace_; }

    RebuildPhase successor_phase() const {
        return successor_ ? successor_->machine.phase() : RebuildPhase::done;
    }
    std::uint64_t frozen_digest() const { return active_.q_frozen.digest(); }
    const PointLocator& active_locator() const { return *active_.locator; }
    std::size_t active_pending_size() const { return active_.q_mut.size(); }

private:
    struct Generation {
        std::shared_ptr<const PointLocator> locator;
        PendingUpdateMap q_mut{1};
        PendingUpdateMap q_frozen{2};
    };

    struct SuccessorJob {
        RebuildStateMachine machine;
    };

    void begin_successor() {
        std::uint64_t build_seed = seed_ + 0x9e37 * (handoffs_ + 1);
        successor_.emplace(SuccessorJob{
            RebuildStateMachine(n_, active_.locator, active_.q_frozen, decomposer_,
                                cfg_.engine.backend, &log_, build_seed)});
        if (cfg_.budget != 0) {
            budget_ = std::max(cfg_.budget, kMicroTaskMax);
            return;
        }
        // W_est upper-bounds the distributed work: the column passes cost a
        // low constant per matrix column, per-slab and per-update costs carry
        // the locator's log factor, and the replay tail consumes a few units
        // per logged entry. Constants measured against the unit ledger.
        std::uint64_t snap = active_.locator->slab_count() + active_.q_frozen.size();
        int lg = 1;
        while ((std::uint64_t(1) << lg) < snap + 2) ++lg;
        std::uint64_t w_est = 22 * std::uint64_t(n_) +
                              std::uint64_t(6 * lg + 30) * snap +
                              12 * std::uint64_t(epoch_len_);
        budget_ = std::max<std::uint64_t>(2 * w_est / epoch_len_ + 1, kMicroTaskMax);
    }

    void take_over(WorkMeter& m) {
        if (!successor_->machine.caught_up()) {
            ++violations_;
            m.charge(successor_->machine.force_replay_to(log_.size()));
        }
        auto products = successor_->machine.harvest();
        successor_.reset();
        active_.locator = std::move(products.locator);
        active_.q_mut = std::move(products.pending_mut);
        active_.q_frozen = std::move(products.pending_frozen);
        log_.clear();
        serve_count_ = 0;
        ++handoffs_;
    }

    Index n_;
    WcConfig cfg_;
    Decomposer decomposer_;
    std::uint64_t epoch_len_ = 0;
    std::uint64_t seed_ = 0;
    std::uint64_t budget_ = kMicroTaskMax;
    Generation active_;
    std::optional<SuccessorJob> successor_;
    std::vector<Cell> log_;
    std::uint64_t serve_count_ = 0;
    std::uint64_t handoffs_ = 0;
    std::uint64_t violations_ = 0;
    std::uint64_t last_update_units_ = 0;
    std::uint64_t max_update_units_ = 0;
    std::vector<std::uint64_t> unit_trace_;
};

}  // namespace twm
