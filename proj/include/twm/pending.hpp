#pragma once

// Pending-update dictionary: (row, col) -> bit for flips not yet folded into
// the static point locator, plus the engine configuration shared by the
// amortized and worst-case engines.

#include <cstdint>
#include <optional>
#include <random>
#include <unordered_map>

#include "twm/core.hpp"
#include "twm/oracle.hpp"
#include "twm/pointloc.hpp"

namespace twm {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

}  // namespace detail

struct SeededCellHash {
    std::uint64_t seed = 0;
    std::size_t operator()(std::uint64_t key) const {
        return std::size_t(detail::splitmix64(key ^ seed));
    }
};

class PendingUpdateMap {
public:
    explicit PendingUpdateMap(std::uint64_t seed = 1) : map_(8, SeededCellHash{seed}) {}

    static std::uint64_t encode(const Cell& p) {
        return (std::uint64_t(std::uint32_t(p.row)) << 32) | std::uint32_t(p.col);
    }
    static Cell decode(std::uint64_t key) {
        return {Index(key >> 32), Index(key & 0xffffffffu)};
    }

    std::optional<bool> get(const Cell& p) const {
        auto it = map_.find(encode(p));
        if (it == map_.end()) return std::nullopt;
        return it->second != 0;
    }

    void set(const Cell& p, bool bit) { map_[encode(p)] = bit ? 1 : 0; }

    std::size_t size() const { return map_.size(); }
    bool empty() const { return map_.empty(); }
    void clear() { map_.clear(); }

    using Map = std::unordered_map<std::uint64_t, std::uint8_t, SeededCellHash>;
    Map::const_iterator begin() const { return map_.begin(); }
    Map::const_iterator end() const { return map_.end(); }

    // Order-independent digest of the stored entries, for snapshot checks.
    std::uint64_t digest() const {
        std::uint64_t d = 0x51ab2937u ^ (std::uint64_t(map_.size()) << 17);
        for (const auto& [key, bit] : map_) d ^= detail::splitmix64(key * 2 + bit);
        return d;
    }

private:
    Map map_;
};

inline constexpr std::uint64_t kNeverRebuild = ~std::uint64_t(0);

inline std::uint64_t default_threshold(Index n) {
    return std::max<std::uint64_t>(16, 8 * std::uint64_t(n));
}

// The pending-map capacity matching the theoretical analysis, 8 f_d (n+2).
// Astronomical at desk scale; saturates to "never" on overflow.
inline std::uint64_t analysis_threshold(int d, Index n) {
    FdConstant f = f_d_constant(d);
    __int128 v = 8 * f.num * (n + 2) / f.den;
    if (v > __int128(kNeverRebuild - 1)) return kNeverRebuild;
    return std::uint64_t(v);
}

struct EngineConfig {
    std::uint64_t threshold = 0;  // 0 = default_threshold(n), kNeverRebuild = never
    std::uint64_t hash_seed = 0;  // 0 = randomized at construction
    PlBackend backend = PlBackend::baseline;

    std::uint64_t resolve_seed() const {
        if (hash_seed != 0) return hash_seed;
        std::random_device rd;
        return (std::uint64_t(rd()) << 32) ^ rd() ^ 0x6d5f3c71u;
    }
    std::uint64_t resolve_threshold(Index n) const {
        return threshold == 0 ? default_threshold(n) : threshold;
    }
};

}  // namespace twm
