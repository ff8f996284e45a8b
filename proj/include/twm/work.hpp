#pragma once

// Work-unit accounting for budgeted incremental rebuilds. One unit is one
// elementary structure operation: a dictionary call, a hash probe, a slab
// emission, a locator node copy. Pausable pipelines advance in micro-tasks
// of at most kMicroTaskMax units, so a driver that stops once
// spent + kMicroTaskMax would exceed its budget never overshoots.

#include <cstdint>

namespace twm {

struct WorkMeter {
    std::uint64_t units = 0;

    void charge(std::uint64_t u) { units += u; }
};

inline constexpr std::uint64_t kMicroTaskMax = 8;

}  // namespace twm
