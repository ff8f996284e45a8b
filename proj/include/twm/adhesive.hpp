#pragma once

// Adhesive segment set: a dynamic family of pairwise disjoint, pairwise
// non-adjacent segments over {1,...,n}. Endpoints live in a van Emde Boas
// dictionary; a static side array records for each present key whether it is
// the first coordinate, the second, or both (one-point segment). Disjointness
// plus non-adjacency make the stored keys alternate first/second in
// increasing order, which is what every query below leans on.
//
// Every operation issues at most four dictionary calls.

#include <cassert>
#include <cstdint>
#include <optional>
#include <vector>

#include "twm/core.hpp"
#include "twm/veb.hpp"

namespace twm {

class AdhesiveSegmentSet {
public:
    explicit AdhesiveSegmentSet(Index n) : n_(n), dict_(n), role_(n + 2, kNone) {
        if (n < 1) throw std::invalid_argument("adhesive: n must be >= 1");
    }

    Index universe() const { return n_; }
    std::size_t segment_count() const { return count_; }
    bool empty() const { return count_ == 0; }
    std::uint64_t dictionary_calls() const { return dict_.op_count(); }

    // The segment of S containing q, if any. Equality counts as containment.
    std::optional<Segment> containing(const Segment& q) const {
        check(q);
        auto lo = dict_.predecessor(q.lo + 1);  // largest endpoint <= q.lo
        if (!lo) return std::nullopt;
        std::uint8_t r = role_[*lo];
        if (r == kSecond) {
            // q can only be the one-point tail of the segment ending here.
            if (*lo != q.lo || q.hi != q.lo) return std::nullopt;
            auto start = dict_.predecessor(*lo);
            assert(start && role_[*start] == kFirst);
            return Segment{*start, *lo};
        }
        if (r == kBoth) {
            if (q.hi <= *lo) return Segment{*lo, *lo};
            return std::nullopt;
        }
        // *lo opens a segment; its closing endpoint is the next key.
        auto hi = dict_.successor(*lo);
        assert(hi);
        if (q.hi <= *hi) return Segment{*lo, *hi};
        return std::nullopt;
    }

    // The at most two stored segments touching q at q.lo-1 or q.hi+1,
    // in increasing order.
    std::vector<Segment> adjacent(const Segment& q) const {
        check(q);
        std::vector<Segment> out;
        if (q.lo >= 2 && dict_.contains(q.lo - 1)) {
            std::uint8_t r = role_[q.lo - 1];
            if (r == kBoth) {
                out.push_back({q.lo - 1, q.lo - 1});
            } else if (r == kSecond) {
                auto start = dict_.predecessor(q.lo - 1);
                assert(start);
                out.push_back({*start, q.lo - 1});
            }
            // r == kFirst cannot happen: the segment opening at q.lo-1 would
            // cover q.lo, but then q.lo-1 is not a boundary toward q.
        }
        if (q.hi <= n_ - 1 && dict_.contains(q.hi + 1)) {
            std::uint8_t r = role_[q.hi + 1];
            if (r == kBoth) {
                out.push_back({q.hi + 1, q.hi + 1});
            } else if (r == kFirst) {
                auto end = dict_.successor(q.hi + 1);
                assert(end);
                out.push_back({q.hi + 1, *end});
            }
        }
        return out;
    }

    bool disjoint(const Segment& q) const {
        check(q);
        auto inside = dict_.successor(q.lo - 1);  // smallest endpoint >= q.lo
        if (inside && *inside <= q.hi) return false;
        auto below = dict_.predecessor(q.lo);
        return !(below && role_[*below] == kFirst);  // strictly interior to a segment
    }

    // Insert q coalesced with its adjacent neighbors; no-op unless q is
    // disjoint from every stored segment.
    void merge(const Segment& q) {
        check(q);
        auto inside = dict_.successor(q.lo - 1);
        if (inside && *inside <= q.hi) return;
        auto below = dict_.predecessor(q.lo);
        if (below && role_[*below] == kFirst) return;

        // No endpoint inside q, so the successor of q.lo-1 is also the
        // successor of q.hi.
        bool left = below && *below == q.lo - 1;    // role kSecond or kBoth
        bool right = inside && *inside == q.hi + 1; // role kFirst or kBoth

        if (left) {
            if (role_[*below] == kBoth) {
                role_[*below] = kFirst;
            } else {
                remove_key(*below);  // the opening endpoint further left stays
            }
        } else {
            add_key(q.lo, kFirst);
        }
        if (right) {
            if (role_[*inside] == kBoth) {
                role_[*inside] = kSecond;
            } else {
                remove_key(*inside);
            }
        } else {
            add_key(q.hi, kSecond);
        }
        if (!left && !right && q.lo == q.hi) role_[q.lo] = kBoth;
        count_ -= (left ? 1 : 0) + (right ? 1 : 0);
        ++count_;
    }

    // Remove q from the segment containing it, keeping the (possibly empty)
    // remainders; no-op if no stored segment contains q.
    void split(const Segment& q) {
        check(q);
        auto seg = containing(q);
        if (!seg) return;
        Index a = seg->lo, b = seg->hi;
        --count_;
        // Left remainder [a, q.lo-1]
        if (a < q.lo) {
            ++count_;
            if (a == q.lo - 1) {
                role_[a] = kBoth;
            } else {
                add_key(q.lo - 1, kSecond);  // a stays as the opener
            }
        } else {
            if (a == b) {
                remove_key(a);
                return;  // one-point segment removed entirely
            }
            remove_key(a);
        }
        // Right remainder [q.hi+1, b]
        if (q.hi < b) {
            ++count_;
            if (b == q.hi + 1) {
                role_[b] = kBoth;
            } else {
                add_key(q.hi + 1, kFirst);
            }
        } else {
            remove_key(b);
        }
    }

    // All stored segments in increasing order. Costs O(k) dictionary calls;
    // meant for tests and debugging, not for the sweep hot path.
    std::vector<Segment> segments() const {
        std::vector<Segment> out;
        Index x = 0;
        while (auto lo = dict_.successor(x)) {
            if (role_[*lo] == kBoth) {
                out.push_back({*lo, *lo});
                x = *lo;
                continue;
            }
            auto hi = dict_.successor(*lo);
            assert(hi && role_[*hi] == kSecond);
            out.push_back({*lo, *hi});
            x = *hi;
        }
        return out;
    }

private:
    static constexpr std::uint8_t kNone = 0;
    static constexpr std::uint8_t kFirst = 1;
    static constexpr std::uint8_t kSecond = 2;
    static constexpr std::uint8_t kBoth = 3;

    void check(const Segment& q) const {
        if (q.lo < 1 || q.hi > n_ || q.lo > q.hi)
            throw std::out_of_range("adhesive: segment [" + std::to_string(q.lo) + "," +
                                    std::to_string(q.hi) + "] invalid for n=" +
                                    std::to_string(n_));
    }

    void add_key(Index x, std::uint8_t role) {
        dict_.insert(x);
        role_[x] = role;
    }

    void remove_key(Index x) {
        dict_.erase(x);
        role_[x] = kNone;
    }

    Index n_;
    VebDictionary dict_;
    std::vector<std::uint8_t> role_;  // meaningful only for present keys
    std::size_t count_ = 0;
};

}  // namespace twm
