#pragma once

// Shared coordinate and geometry types for binary n x n matrices described
// by disjoint all-ones rectangles ("slabs"). All public indices are 1-based
// and inclusive.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace twm {

using Index = std::int32_t;

struct Cell {
    Index row = 0;
    Index col = 0;

    friend bool operator==(const Cell&, const Cell&) = default;
};

// Inclusive integer interval [lo, hi] of row indices.
struct Segment {
    Index lo = 0;
    Index hi = 0;

    bool contains(Index x) const { return lo <= x && x <= hi; }
    bool contains(const Segment& other) const { return lo <= other.lo && other.hi <= hi; }
    bool intersects(const Segment& other) const {
        return std::max(lo, other.lo) <= std::min(hi, other.hi);
    }
    // Touching without overlap: [2,4] and [5,7] are adjacent, [2,4] and [6,7] are not.
    bool adjacent_to(const Segment& other) const {
        return hi + 1 == other.lo || other.hi + 1 == lo;
    }
    Index length() const { return hi - lo + 1; }

    friend bool operator==(const Segment&, const Segment&) = default;
    friend auto operator<=>(const Segment&, const Segment&) = default;
};

// All-ones rectangle: rows [row_lo, row_hi] x columns [col_lo, col_hi].
struct Slab {
    Index row_lo = 0;
    Index row_hi = 0;
    Index col_lo = 0;
    Index col_hi = 0;

    Segment rows() const { return {row_lo, row_hi}; }
    Segment cols() const { return {col_lo, col_hi}; }

    bool contains(const Cell& p) const {
        return row_lo <= p.row && p.row <= row_hi && col_lo <= p.col && p.col <= col_hi;
    }
    bool intersects(const Slab& other) const {
        return rows().intersects(other.rows()) && cols().intersects(other.cols());
    }
    std::int64_t area() const {
        return std::int64_t(row_hi - row_lo + 1) * (col_hi - col_lo + 1);
    }

    friend bool operator==(const Slab&, const Slab&) = default;
};

// Canonical file/order key: (row_lo, col_lo, row_hi, col_hi).
inline bool slab_order(const Slab& a, const Slab& b) {
    return std::tie(a.row_lo, a.col_lo, a.row_hi, a.col_hi) <
           std::tie(b.row_lo, b.col_lo, b.row_hi, b.col_hi);
}

inline std::string to_string(const Slab& s) {
    return "(" + std::to_string(s.row_lo) + "," + std::to_string(s.row_hi) + "," +
           std::to_string(s.col_lo) + "," + std::to_string(s.col_hi) + ")";
}

inline bool slab_contains(const Slab& s, const Cell& p) { return s.contains(p); }

// A set of pairwise disjoint slabs covering exactly the 1-entries of an
// n x n matrix. Disjointness is a caller obligation; validate_decomposition
// checks it.
struct SlabDecomposition {
    Index n = 0;
    std::vector<Slab> slabs;

    std::size_t size() const { return slabs.size(); }
};

inline bool slab_in_range(const Slab& s, Index n) {
    return 1 <= s.row_lo && s.row_lo <= s.row_hi && s.row_hi <= n && 1 <= s.col_lo &&
           s.col_lo <= s.col_hi && s.col_hi <= n;
}

namespace detail {

// Sweep over column events; at every moment the active row intervals must be
// pairwise disjoint. O(K log K).
inline std::optional<std::pair<std::size_t, std::size_t>>
find_overlap_by_sweep(const std::vector<Slab>& slabs) {
    struct Event {
        Index col;
        bool open;
        std::size_t id;
    };
    std::vector<Event> events;
    events.reserve(2 * slabs.size());
    for (std::size_t i = 0; i < slabs.size(); ++i) {
        events.push_back({slabs[i].col_lo, true, i});
        events.push_back({slabs[i].col_hi + 1, false, i});
    }
    std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
        if (a.col != b.col) return a.col < b.col;
        return a.open < b.open;  // closes before opens at the same column
    });
    // Active intervals keyed by row_lo; disjointness makes the key unique.
    std::vector<std::pair<Index, std::size_t>> active;  // (row_lo, id), sorted
    for (const Event& e : events) {
        const Slab& s = slabs[e.id];
        auto pos = std::lower_bound(active.begin(), active.end(),
                                    std::make_pair(s.row_lo, std::size_t(0)));
        if (e.open) {
            if (pos != active.end() && slabs[pos->second].rows().intersects(s.rows()))
                return std::make_pair(e.id, pos->second);
            if (pos != active.begin()) {
                auto prev = std::prev(pos);
                if (slabs[prev->second].rows().intersects(s.rows()))
                    return std::make_pair(e.id, prev->second);
            }
            active.insert(pos, {s.row_lo, e.id});
        } else {
            if (pos != active.end() && pos->first == s.row_lo && pos->second == e.id)
                active.erase(pos);
        }
    }
    return std::nullopt;
}

}  // namespace detail

// Returns a pair of indices of two intersecting slabs, or nullopt if the
// decomposition is valid. Out-of-range slabs are reported as overlapping
// with themselves.
inline std::optional<std::pair<std::size_t, std::size_t>>
find_conflict(const SlabDecomposition& dec) {
    for (std::size_t i = 0; i < dec.slabs.size(); ++i)
        if (!slab_in_range(dec.slabs[i], dec.n)) return std::make_pair(i, i);
    return detail::find_overlap_by_sweep(dec.slabs);
}

inline bool validate_decomposition(const SlabDecomposition& dec) {
    return !find_conflict(dec).has_value();
}

inline void require_valid(const SlabDecomposition& dec, const char* what) {
    if (auto c = find_conflict(dec)) {
        if (c->first == c->second)
            throw std::invalid_argument(std::string(what) + ": slab " +
                                        to_string(dec.slabs[c->first]) +
                                        " out of range for n=" + std::to_string(dec.n));
        throw std::invalid_argument(std::string(what) + ": slabs " +
                                    to_string(dec.slabs[c->first]) + " and " +
                                    to_string(dec.slabs[c->second]) + " overlap");
    }
}

inline void require_cell(Index n, const Cell& p, const char* what) {
    if (p.row < 1 || p.row > n || p.col < 1 || p.col > n)
        throw std::out_of_range(std::string(what) + ": cell (" + std::to_string(p.row) +
                                "," + std::to_string(p.col) + ") outside [1," +
                                std::to_string(n) + "]^2");
}

// Set equality of slab lists irrespective of order.
inline bool same_slab_set(std::vector<Slab> a, std::vector<Slab> b) {
    std::sort(a.begin(), a.end(), slab_order);
    std::sort(b.begin(), b.end(), slab_order);
    return a == b;
}

// One operation of an update/query trace.
struct TraceOp {
    bool is_query = false;
    Cell cell;

    friend bool operator==(const TraceOp&, const TraceOp&) = default;
};

}  // namespace twm
