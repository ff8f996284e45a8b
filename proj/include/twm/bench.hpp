#pragma once

// Timing harness over the dynamic engines: a doubling grid of matrix sizes,
// per-size medians over repeated runs after a warm-up pass. Numbers are
// reports, not proofs; the only hard check offered is a regression guard on
// the largest-to-smallest per-query time ratio.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "twm/deamort.hpp"
#include "twm/dynmatrix.hpp"
#include "twm/gen.hpp"
#include "twm/oracle.hpp"

namespace twm {

struct BenchConfig {
    Index n_min = 1 << 10;
    Index n_max = 1 << 20;
    std::size_t ops = 20000;
    int reps = 5;
    std::uint64_t seed = 1;
    int d_reference = 1;
    bool amortized = true;
    bool worstcase = true;
    PlBackend backend = PlBackend::baseline;
};

struct BenchRow {
    Index n = 0;
    std::string engine;
    std::string backend;
    std::size_t ops = 0;
    double ns_per_query = 0;
    double ns_per_update = 0;
    std::uint64_t max_work_units_per_update = 0;
    std::size_t canonical_slabs = 0;
    std::uint64_t d_bound_reference = 0;  // d(2n-2)+1
};

namespace detail {

template <typename Engine>
BenchRow bench_engine(Engine& engine, const char* name, const BenchConfig& cfg, Index n,
                      std::size_t slab_count) {
    using clock = std::chrono::steady_clock;
    auto trace = gen_trace(n, cfg.ops, cfg.seed ^ (std::uint64_t(n) << 20), 0.5);
    std::vector<Cell> queries, updates;
    for (const TraceOp& op : trace) (op.is_query ? queries : updates).push_back(op.cell);

    // Warm-up: applies the updates once so timed queries see a mixed state.
    std::uint64_t sink = 0;
    for (const Cell& p : updates) engine.update(p);
    for (const Cell& p : queries) sink += engine.query(p);

    std::vector<double> q_ns, u_ns;
    std::uint64_t max_units = 0;
    for (int rep = 0; rep < cfg.reps; ++rep) {
        auto t0 = clock::now();
        for (const Cell& p : updates) {
            engine.update(p);
            max_units = std::max(max_units, engine.last_update_units());
        }
        auto t1 = clock::now();
        for (const Cell& p : queries) sink += engine.query(p);
        auto t2 = clock::now();
        u_ns.push_back(
            std::chrono::duration<double, std::nano>(t1 - t0).count() / updates.size());
        q_ns.push_back(
            std::chrono::duration<double, std::nano>(t2 - t1).count() / queries.size());
    }
    std::sort(q_ns.begin(), q_ns.end());
    std::sort(u_ns.begin(), u_ns.end());

    BenchRow row;
    row.n = n;
    row.engine = name;
    row.backend = cfg.backend == PlBackend::baseline ? "baseline" : "fast";
    row.ops = cfg.ops;
    row.ns_per_query = q_ns[q_ns.size() / 2];
    row.ns_per_update = u_ns[u_ns.size() / 2];
    row.max_work_units_per_update = max_units;
    row.canonical_slabs = slab_count;
    row.d_bound_reference =
        std::uint64_t(cfg.d_reference) * (2 * std::uint64_t(n) - 2) + 1;
    if (sink == ~std::uint64_t(0)) throw std::logic_error("sink overflow");
    return row;
}

}  // namespace detail

inline std::vector<BenchRow> run_bench(const BenchConfig& cfg) {
    std::vector<BenchRow> rows;
    for (Index n = cfg.n_min; n <= cfg.n_max; n *= 2) {
        SlabDecomposition init =
            gen_disjoint_slabs(n, std::max<std::size_t>(16, std::size_t(n) / 32),
                               cfg.seed ^ std::uint64_t(n));
        if (cfg.amortized) {
            EngineConfig ec;
            ec.hash_seed = cfg.seed + 1;
            ec.backend = cfg.backend;
            AmortizedMatrix am(init, ec);
            rows.push_back(detail::bench_engine(am, "amortized", cfg, n,
                                                am.slabs().size()));
        }
        if (cfg.worstcase) {
            WcConfig wc;
            wc.engine.hash_seed = cfg.seed + 2;
            wc.engine.backend = cfg.backend;
            WorstCaseMatrix w(init, wc);
            rows.push_back(detail::bench_engine(w, "worstcase", cfg, n,
                                                w.active_locator().slab_count()));
        }
    }
    return rows;
}

inline std::string bench_csv(const std::vector<BenchRow>& rows) {
    std::string out =
        "n,engine,backend,ops,ns_per_query,ns_per_update,max_work_units_per_update,"
        "canonical_slabs,d_bound_reference\n";
    for (const BenchRow& r : rows) {
        out += std::to_string(r.n) + "," + r.engine + "," + r.backend + "," +
               std::to_string(r.ops) + "," + std::to_string(r.ns_per_query) + "," +
               std::to_string(r.ns_per_update) + "," +
               std::to_string(r.max_work_units_per_update) + "," +
               std::to_string(r.canonical_slabs) + "," +
               std::to_string(r.d_bound_reference) + "\n";
    }
    return out;
}

// Largest-to-smallest per-query time ratio of one engine's rows.
inline double query_time_ratio(const std::vector<BenchRow>& rows,
                               const std::string& engine) {
    double lo_n = 0, hi_n = 0, lo_t = 0, hi_t = 0;
    for (const BenchRow& r : rows) {
        if (r.engine != engine) continue;
        if (lo_n == 0 || r.n < lo_n) {
            lo_n = r.n;
            lo_t = r.ns_per_query;
        }
        if (r.n > hi_n) {
            hi_n = r.n;
            hi_t = r.ns_per_query;
        }
    }
    return lo_t > 0 ? hi_t / lo_t : 0.0;
}

}  // namespace twm
