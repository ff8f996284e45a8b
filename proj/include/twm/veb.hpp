#pragma once

// van Emde Boas dictionary over the universe {1,...,U}.
//
// Layout: a node for a 2^b universe either is a flat two-level bitmask
// (b <= 12: one summary word over up to 64 leaf words, every operation a
// handful of word scans) or splits into 2^high clusters of 2^low keys plus a
// recursive summary, with low = max(12, ceil(b/2)). The clamp keeps every
// cluster chain bottoming out at full 64-bit leaf words, so memory stays
// close to U/64 words across all universe sizes. The minimum of a recursive
// node is kept outside its clusters (lazy-min), giving one effective
// recursive call per operation.

#include <bit>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "twm/core.hpp"

namespace twm {

class VebDictionary {
public:
    explicit VebDictionary(Index universe) : universe_(universe) {
        if (universe < 1) throw std::invalid_argument("veb: universe must be >= 1");
        int bits = 1;
        while ((std::int64_t(1) << bits) < universe) ++bits;
        root_ = Node::build(bits);
    }

    Index universe() const { return universe_; }
    std::size_t size() const { return size_; }
    bool empty() const { return size_ == 0; }

    // Number of lookup/insert/erase/successor/predecessor calls issued so far.
    std::uint64_t op_count() const { return ops_; }

    void insert(Index x) {
        ++ops_;
        check_key(x, 1, universe_);
        if (root_.insert(x)) ++size_;
    }

    void erase(Index x) {
        ++ops_;
        check_key(x, 1, universe_);
        if (root_.erase(x)) --size_;
    }

    bool contains(Index x) const {
        ++ops_;
        check_key(x, 1, universe_);
        return root_.contains(x);
    }

    // Smallest stored key strictly greater than x; x = 0 fetches the minimum.
    std::optional<Index> successor(Index x) const {
        ++ops_;
        check_key(x, 0, universe_);
        Index r = root_.successor(x);
        if (r == 0 || r > universe_) return std::nullopt;
        return r;
    }

    // Largest stored key strictly smaller than x; x = U+1 fetches the maximum.
    std::optional<Index> predecessor(Index x) const {
        ++ops_;
        check_key(x, 1, universe_ + 1);
        Index r = root_.predecessor(x);
        if (r == 0) return std::nullopt;
        return r;
    }

    // Coarse footprint in 64-bit words, for memory-scaling checks.
    std::size_t footprint_words() const { return root_.footprint(); }

private:
    static constexpr int kLeafBits = 6;   // 64-key bitmask word
    static constexpr int kBaseBits = 12;  // flat summary-over-words node

    static void check_key(Index x, Index lo, Index hi) {
        if (x < lo || x > hi)
            throw std::out_of_range("veb: key " + std::to_string(x) + " outside [" +
                                    std::to_string(lo) + "," + std::to_string(hi) + "]");
    }

    struct Node {
        // Flat node state (bits <= kBaseBits)
        std::uint64_t summary_word = 0;
        std::vector<std::uint64_t> words;
        // Recursive node state
        Index min_key = 0;  // 0 = empty; stored outside the clusters
        Index max_key = 0;
        std::unique_ptr<Node> summary;
        std::vector<Node> clusters;
        std::uint8_t bits = 0;
        std::uint8_t low_bits = 0;

        static Node build(int b) {
            Node node;
            node.bits = static_cast<std::uint8_t>(b);
            if (b <= kBaseBits) {
                node.words.assign(std::size_t(1) << std::max(0, b - kLeafBits), 0);
            } else {
                int low = std::max(kBaseBits, (b + 1) / 2);
                int high = b - low;
                node.low_bits = static_cast<std::uint8_t>(low);
                node.summary = std::make_unique<Node>(build(high));
                node.clusters.reserve(std::size_t(1) << high);
                for (std::size_t i = 0; i < (std::size_t(1) << high); ++i)
                    node.clusters.push_back(build(low));
            }
            return node;
        }

        bool is_flat() const { return bits <= kBaseBits; }
        bool node_empty() const { return is_flat() ? summary_word == 0 : min_key == 0; }

        Index cluster_of(Index x) const { return ((x - 1) >> low_bits) + 1; }
        Index pos_of(Index x) const {
            return ((x - 1) & ((Index(1) << low_bits) - 1)) + 1;
        }
        Index index_of(Index c, Index p) const { return ((c - 1) << low_bits) + p; }

        Index node_min() const {
            if (!is_flat()) return min_key;
            if (summary_word == 0) return 0;
            int w = std::countr_zero(summary_word);
            return Index(w) * 64 + std::countr_zero(words[w]) + 1;
        }

        Index node_max() const {
            if (!is_flat()) return max_key;
            if (summary_word == 0) return 0;
            int w = 63 - std::countl_zero(summary_word);
            return Index(w) * 64 + (63 - std::countl_zero(words[w])) + 1;
        }

        bool contains(Index x) const {
            if (is_flat()) {
                Index b = x - 1;
                return (words[b >> 6] >> (b & 63)) & 1;
            }
            if (min_key == 0) return false;
            if (x == min_key) return true;
            if (x > max_key) return false;
            return clusters[cluster_of(x) - 1].contains(pos_of(x));
        }

        bool insert(Index x) {
            if (is_flat()) {
                Index b = x - 1;
                std::uint64_t bit = std::uint64_t(1) << (b & 63);
                if (words[b >> 6] & bit) return false;
                words[b >> 6] |= bit;
                summary_word |= std::uint64_t(1) << (b >> 6);
                return true;
            }
            if (min_key == 0) {
                min_key = max_key = x;
                return true;
            }
            if (x == min_key) return false;
            if (x < min_key) std::swap(x, min_key);
            if (x > max_key) max_key = x;
            Index c = cluster_of(x);
            Node& cl = clusters[c - 1];
            if (cl.node_empty()) summary->insert(c);  // cl.insert below is then O(1)
            return cl.insert(pos_of(x));
        }

        bool erase(Index x) {
            if (is_flat()) {
                Index b = x - 1;
                std::uint64_t bit = std::uint64_t(1) << (b & 63);
                if (!(words[b >> 6] & bit)) return false;
                words[b >> 6] &= ~bit;
                if (words[b >> 6] == 0) summary_word &= ~(std::uint64_t(1) << (b >> 6));
                return true;
            }
            if (min_key == 0) return false;
            if (x == min_key) {
                if (summary->node_empty()) {
                    min_key = max_key = 0;
                    return true;
                }
                // Pull the global second-smallest key up into min_key.
                Index c = summary->node_min();
                Index p = clusters[c - 1].node_min();
                min_key = index_of(c, p);
                clusters[c - 1].erase(p);
                if (clusters[c - 1].node_empty()) summary->erase(c);
                if (min_key == max_key || summary->node_empty()) {
                    max_key = min_key;
                } else {
                    Index cm = summary->node_max();
                    max_key = index_of(cm, clusters[cm - 1].node_max());
                }
                return true;
            }
            if (x > max_key) return false;
            Index c = cluster_of(x);
            Node& cl = clusters[c - 1];
            if (!cl.erase(pos_of(x))) return false;
            if (cl.node_empty()) summary->erase(c);
            if (x == max_key) {
                if (summary->node_empty()) {
                    max_key = min_key;
                } else {
                    Index cm = summary->node_max();
                    max_key = index_of(cm, clusters[cm - 1].node_max());
                }
            }
            return true;
        }

        // Smallest stored key > x, 0 if none. Local x in [0, 2^bits].
        Index successor(Index x) const {
            if (is_flat()) {
                if (x >= Index(words.size()) * 64) return 0;
                Index w = x >> 6;
                std::uint64_t m = words[w] & (~std::uint64_t(0) << (x & 63));
                if (m) return w * 64 + std::countr_zero(m) + 1;
                if (w + 1 >= 64) return 0;
                std::uint64_t s = summary_word & (~std::uint64_t(0) << (w + 1));
                if (!s) return 0;
                Index w2 = std::countr_zero(s);
                return w2 * 64 + std::countr_zero(words[w2]) + 1;
            }
            if (min_key == 0 || x >= max_key) return 0;
            if (x < min_key) return min_key;
            Index c = cluster_of(x);
            const Node& cl = clusters[c - 1];
            if (!cl.node_empty() && cl.node_max() > pos_of(x))
                return index_of(c, cl.successor(pos_of(x)));
            Index cs = summary->successor(c);
            if (cs == 0) return 0;
            return index_of(cs, clusters[cs - 1].node_min());
        }

        // Largest stored key < x, 0 if none. Local x in [1, 2^bits + 1].
        Index predecessor(Index x) const {
            if (is_flat()) {
                if (x <= 1) return 0;
                Index b = std::min<Index>(x - 2, Index(words.size()) * 64 - 1);
                Index w = b >> 6;
                std::uint64_t m = words[w] & (~std::uint64_t(0) >> (63 - (b & 63)));
                if (m) return w * 64 + (63 - std::countl_zero(m)) + 1;
                std::uint64_t s =
                    w == 0 ? 0 : summary_word & ((std::uint64_t(1) << w) - 1);
                if (!s) return 0;
                Index w2 = 63 - std::countl_zero(s);
                return w2 * 64 + (63 - std::countl_zero(words[w2])) + 1;
            }
            if (min_key == 0 || x <= min_key) return 0;
            if (x > max_key) return max_key;
            Index c = cluster_of(x);
            const Node& cl = clusters[c - 1];
            if (!cl.node_empty() && cl.node_min() < pos_of(x))
                return index_of(c, cl.predecessor(pos_of(x)));
            Index cp = summary->predecessor(c);
            if (cp == 0) return min_key;
            return index_of(cp, clusters[cp - 1].node_max());
        }

        std::size_t footprint() const {
            if (is_flat()) return 2 + words.size();
            std::size_t total = 4 + summary->footprint();
            for (const Node& c : clusters) total += c.footprint();
            return total;
        }
    };

    Index universe_;
    Node root_;
    std::size_t size_ = 0;
    mutable std::uint64_t ops_ = 0;
};

}  // namespace twm
