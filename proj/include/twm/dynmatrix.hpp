#pragma once

// Amortized dynamic matrix: a frozen point locator P over the canonical slab
// decomposition plus a pending-update dictionary Q. Representation
// invariant: if (i,j) is in Q then M[i,j] = Q[i,j]; otherwise M[i,j] = 1 iff
// (i,j) lies in a slab of P. When |Q| reaches the threshold, the rebuild
// pipeline folds Q into a fresh decomposition and Q empties.

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "twm/core.hpp"
#include "twm/decompose.hpp"
#include "twm/pending.hpp"
#include "twm/pointloc.hpp"
#include "twm/rebuild.hpp"

namespace twm {

class AmortizedMatrix {
public:
    explicit AmortizedMatrix(const SlabDecomposition& init, EngineConfig cfg = {})
        : n_(init.n),
          cfg_(cfg),
          threshold_(cfg.resolve_threshold(init.n)),
          seed_(cfg.resolve_seed()),
          pending_(seed_),
          decomposer_(init.n) {
        require_valid(init, "am_init");
        locator_ = std::make_shared<const PointLocator>(
            build_point_locator(decompose(init), cfg_.backend));
    }

    Index n() const { return n_; }
    std::uint64_t threshold() const { return threshold_; }

    bool query(const Cell& p) const {
        require_cell(n_, p, "am_query");
        if (auto v = pending_.get(p)) return *v;
        return locator_->locate_id(p) >= 0;
    }

    void update(const Cell& p) {
        require_cell(n_, p, "am_update");
        WorkMeter m;
        auto v = pending_.get(p);
        m.charge(1);
        if (v) {
            pending_.set(p, !*v);
        } else {
            bool bit = locator_->locate_id(p) >= 0;
            m.charge(1);
            pending_.set(p, !bit);
        }
        m.charge(1);
        if (threshold_ != kNeverRebuild && pending_.size() >= threshold_) rebuild(&m);
        last_update_units_ = m.units;
    }

    // Folds Q into the locator immediately; callable explicitly in tests.
    void rebuild(WorkMeter* meter = nullptr) {
        RebuildStateMachine machine(n_, locator_, pending_, decomposer_, cfg_.backend,
                                    nullptr, seed_ + (++rebuild_count_));
        std::uint64_t units = machine.run_to_completion();
        if (meter) meter->charge(units);
        last_rebuild_input_ = machine.extracted_slabs();
        locator_ = machine.harvest().locator;
        pending_.clear();
    }

    const PointLocator& locator() const { return *locator_; }
    std::shared_ptr<const PointLocator> locator_ptr() const { return locator_; }
    const std::vector<Slab>& slabs() const { return locator_->slabs(); }
    std::size_t pending_size() const { return pending_.size(); }
    std::optional<bool> pending_bit(const Cell& p) const { return pending_.get(p); }

    std::uint64_t rebuild_count() const { return rebuild_count_; }
    std::uint64_t last_update_units() const { return last_update_units_; }
    std::size_t last_rebuild_input_size() const { return last_rebuild_input_; }

private:
    Index n_;
    EngineConfig cfg_;
    std::uint64_t threshold_;
    std::uint64_t seed_;
    std::shared_ptr<const PointLocator> locator_;
    PendingUpdateMap pending_;
    Decomposer decomposer_;
    std::uint64_t rebuild_count_ = 0;
    std::uint64_t last_update_units_ = 0;
    std::size_t last_rebuild_input_ = 0;
};

}  // namespace twm
