// Command-line front end: instance generation, canonical decomposition,
// trace execution on either dynamic engine, verification against the
// brute-force oracles, and benchmarking.
//
// Exit codes: 0 success, 1 verification failure, 2 input error.

#include <CLI11.hpp>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <variant>

#include "twm/bench.hpp"
#include "twm/deamort.hpp"
#include "twm/decompose.hpp"
#include "twm/dynmatrix.hpp"
#include "twm/gen.hpp"
#include "twm/io.hpp"
#include "twm/oracle.hpp"

namespace {

using namespace twm;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFail = 1;
constexpr int kExitInputError = 2;

struct CommonFlags {
    std::string engine = "amortized";
    std::string backend = "baseline";
    std::string threshold = "auto";
    std::uint64_t epoch = 0;
    std::uint64_t budget = 0;
    std::uint64_t hash_seed = 1;
};

PlBackend parse_backend(const std::string& name) {
    if (name == "baseline") return PlBackend::baseline;
    if (name == "fast") return PlBackend::fast;
    throw CLI::ValidationError("--backend", "expected 'baseline' or 'fast'");
}

std::uint64_t parse_threshold(const std::string& text, Index n) {
    if (text == "auto") return 0;
    if (text == "never") return kNeverRebuild;
    if (text.rfind("analysis:", 0) == 0) {
        int d = std::stoi(text.substr(9));
        return analysis_threshold(d, n);
    }
    return std::stoull(text);
}

// Uniform front over the two engines.
class DynamicEngine {
public:
    DynamicEngine(const SlabDecomposition& init, const CommonFlags& flags) {
        EngineConfig ec;
        ec.backend = parse_backend(flags.backend);
        ec.hash_seed = flags.hash_seed;
        ec.threshold = parse_threshold(flags.threshold, init.n);
        if (flags.engine == "amortized") {
            amortized_.emplace(init, ec);
        } else if (flags.engine == "worstcase") {
            WcConfig wc;
            wc.engine = ec;
            wc.epoch = flags.epoch;
            wc.budget = flags.budget;
            wc.collect_stats = true;
            worstcase_.emplace(init, wc);
        } else {
            throw CLI::ValidationError("--engine", "expected 'amortized' or 'worstcase'");
        }
    }

    bool query(const Cell& p) {
        return amortized_ ? amortized_->query(p) : worstcase_->query(p);
    }
    void update(const Cell& p) {
        if (amortized_)
            amortized_->update(p);
        else
            worstcase_->update(p);
    }
    std::uint64_t last_update_units() const {
        return amortized_ ? amortized_->last_update_units()
                          : worstcase_->last_update_units();
    }

private:
    std::optional<AmortizedMatrix> amortized_;
    std::optional<WorstCaseMatrix> worstcase_;
};

int cmd_gen(const std::string& mode, Index n, std::size_t k, int d, std::uint64_t seed,
            std::size_t ops, double query_ratio, int flips, const std::string& out,
            const std::string& witness_out) {
    if (mode == "slabs") {
        auto file = open_output(out);
        write_slab_file(file, gen_disjoint_slabs(n, k, seed));
        return kExitOk;
    }
    if (mode == "width") {
        WitnessedMatrix w = gen_bounded_width(n, d, seed, flips);
        auto file = open_output(out);
        write_dense_file(file, w.matrix);
        if (!witness_out.empty()) {
            auto wfile = open_output(witness_out);
            write_witness_file(wfile, n, w.witness);
        }
        return kExitOk;
    }
    if (mode == "trace") {
        auto file = open_output(out);
        write_trace_file(file, gen_trace(n, ops, seed, query_ratio));
        return kExitOk;
    }
    std::cerr << "gen: unknown mode '" << mode << "'\n";
    return kExitInputError;
}

int cmd_decompose(const std::string& in, const std::string& out) {
    auto file = open_input(in);
    SlabDecomposition input = read_slab_file(file);
    SlabDecomposition canonical = decompose(input);
    auto ofile = open_output(out);
    write_slab_file(ofile, canonical);
    std::cout << "input_slabs=" << input.slabs.size()
              << " canonical_slabs=" << canonical.slabs.size() << "\n";
    return kExitOk;
}

int cmd_run(const std::string& init_path, const std::string& trace_path,
            const CommonFlags& flags, const std::string& out,
            const std::string& csv_path) {
    auto init_file = open_input(init_path);
    SlabDecomposition init = read_slab_file(init_file);
    auto trace_file = open_input(trace_path);
    std::vector<TraceOp> trace = read_trace_file(trace_file);

    DynamicEngine engine(init, flags);
    std::ostream* sink = &std::cout;
    std::ofstream out_file;
    if (!out.empty()) {
        out_file = open_output(out);
        sink = &out_file;
    }
    std::ofstream csv;
    if (!csv_path.empty()) {
        csv = open_output(csv_path);
        csv << "op_index,kind,work_units\n";
    }
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const TraceOp& op = trace[i];
        try {
            if (op.is_query) {
                *sink << (engine.query(op.cell) ? '1' : '0') << '\n';
                if (csv.is_open()) csv << i << ",Q,0\n";
            } else {
                engine.update(op.cell);
                if (csv.is_open()) csv << i << ",U," << engine.last_update_units() << "\n";
            }
        } catch (const std::out_of_range& e) {
            std::cerr << "run: op " << i << ": " << e.what() << "\n";
            return kExitInputError;
        }
    }
    return kExitOk;
}

int verify_oracle(const std::string& init_path, const std::string& trace_path,
                  const CommonFlags& flags) {
    auto init_file = open_input(init_path);
    SlabDecomposition init = read_slab_file(init_file);
    auto trace_file = open_input(trace_path);
    std::vector<TraceOp> trace = read_trace_file(trace_file);

    DynamicEngine engine(init, flags);
    DenseMatrix ref = dense_from_slabs(init);
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const TraceOp& op = trace[i];
        if (op.is_query) {
            bool got = engine.query(op.cell);
            bool expected = ref.get(op.cell);
            if (got != expected) {
                std::cout << "FAIL op " << i << ": query (" << op.cell.row << ","
                          << op.cell.col << ") engine=" << got
                          << " oracle=" << expected << "\n";
                return kExitVerifyFail;
            }
        } else {
            engine.update(op.cell);
            ref.flip(op.cell);
        }
    }
    std::cout << "PASS " << trace.size() << " ops\n";
    return kExitOk;
}

int verify_canonical(const std::string& in, const std::string& candidate_path) {
    auto file = open_input(in);
    SlabDecomposition input = read_slab_file(file);
    SlabDecomposition expected = naive_canonical(dense_from_slabs(input));
    SlabDecomposition got = candidate_path.empty() ? decompose(input) : [&] {
        auto cfile = open_input(candidate_path);
        return read_slab_file(cfile);
    }();
    if (same_slab_set(got.slabs, expected.slabs)) {
        std::cout << "PASS canonical_slabs=" << expected.slabs.size() << "\n";
        return kExitOk;
    }
    // Name a witnessing cell: either covered differently or carved
    // differently into slabs.
    DenseMatrix want = dense_from_slabs(expected);
    DenseMatrix have(input.n);
    for (const Slab& s : got.slabs)
        for (Index r = s.row_lo; r <= s.row_hi; ++r)
            for (Index c = s.col_lo; c <= s.col_hi; ++c) have.set(r, c, true);
    for (Index r = 1; r <= input.n; ++r)
        for (Index c = 1; c <= input.n; ++c)
            if (want.get(r, c) != have.get(r, c)) {
                std::cout << "FAIL coverage differs at cell (" << r << "," << c << ")\n";
                return kExitVerifyFail;
            }
    for (const Slab& s : expected.slabs)
        if (std::find(got.slabs.begin(), got.slabs.end(), s) == got.slabs.end()) {
            std::cout << "FAIL slab containing cell (" << s.row_lo << "," << s.col_lo
                      << ") is not canonical\n";
            return kExitVerifyFail;
        }
    std::cout << "FAIL slab sets differ\n";
    return kExitVerifyFail;
}

int verify_witness(const std::string& matrix_path, const std::string& witness_path,
                   int d) {
    auto mfile = open_input(matrix_path);
    DenseMatrix m = read_dense_file(mfile);
    auto wfile = open_input(witness_path);
    auto [n, seq] = read_witness_file(wfile);
    if (n != m.n()) {
        std::cerr << "verify: matrix is " << m.n() << "x" << m.n() << " but witness is for n="
                  << n << "\n";
        return kExitInputError;
    }
    int width = verify_contraction_width(m, seq);
    if (width <= d) {
        std::cout << "PASS width=" << width << " bound=" << d << "\n";
        return kExitOk;
    }
    std::cout << "FAIL width=" << width << " exceeds bound=" << d << "\n";
    return kExitVerifyFail;
}

int cmd_bench(Index n_min, Index n_max, std::size_t ops, int reps, std::uint64_t seed,
              int d, const std::string& engine, const std::string& backend,
              const std::string& csv_path, double max_ratio) {
    BenchConfig cfg;
    cfg.n_min = n_min;
    cfg.n_max = n_max;
    cfg.ops = ops;
    cfg.reps = reps;
    cfg.seed = seed;
    cfg.d_reference = d;
    cfg.amortized = engine == "amortized" || engine == "both";
    cfg.worstcase = engine == "worstcase" || engine == "both";
    cfg.backend = parse_backend(backend);
    std::vector<BenchRow> rows = run_bench(cfg);
    std::string csv = bench_csv(rows);
    if (!csv_path.empty()) {
        auto file = open_output(csv_path);
        file << csv;
    }
    std::cout << csv;
    for (const char* name : {"amortized", "worstcase"}) {
        double ratio = query_time_ratio(rows, name);
        if (ratio > 0) std::cout << "# " << name << " query_time_ratio=" << ratio << "\n";
        if (max_ratio > 0 && ratio > max_ratio) {
            std::cout << "FAIL " << name << " ratio " << ratio << " exceeds "
                      << max_ratio << "\n";
            return kExitVerifyFail;
        }
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dynamic bounded-twin-width matrix toolkit"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate slab sets, witnessed matrices, traces");
    std::string gen_mode = "slabs", gen_out, gen_witness_out;
    Index gen_n = 16;
    std::size_t gen_k = 16, gen_ops = 1000;
    int gen_d = 1, gen_flips = 1;
    std::uint64_t gen_seed = 1;
    double gen_ratio = 0.5;
    gen->add_option("--mode", gen_mode, "slabs | width | trace");
    gen->add_option("--n", gen_n, "matrix side length")->required();
    gen->add_option("--k", gen_k, "slab count target (mode slabs)");
    gen->add_option("--d", gen_d, "width bound (mode width)");
    gen->add_option("--flips", gen_flips, "zone flips per split step (mode width)");
    gen->add_option("--ops", gen_ops, "trace length (mode trace)");
    gen->add_option("--query-ratio", gen_ratio, "query fraction (mode trace)");
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("--out", gen_out, "output file")->required();
    gen->add_option("--witness-out", gen_witness_out, "witness output (mode width)");

    // decompose
    auto* dec = app.add_subcommand("decompose", "canonical slab decomposition of a slab file");
    std::string dec_in, dec_out;
    dec->add_option("--in", dec_in, "input slab file")->required();
    dec->add_option("--out", dec_out, "output slab file")->required();

    // run
    auto* run = app.add_subcommand("run", "execute a trace, print one line per query");
    std::string run_init, run_trace, run_out, run_csv;
    CommonFlags run_flags;
    run->add_option("--init", run_init, "initial slab file")->required();
    run->add_option("--trace", run_trace, "trace file")->required();
    run->add_option("--engine", run_flags.engine, "amortized | worstcase");
    run->add_option("--backend", run_flags.backend, "baseline | fast");
    run->add_option("--threshold", run_flags.threshold,
                    "rebuild threshold: auto | never | analysis:D | number");
    run->add_option("--epoch", run_flags.epoch, "epoch length L (worstcase)");
    run->add_option("--budget", run_flags.budget, "per-update work budget B (worstcase)");
    run->add_option("--hash-seed", run_flags.hash_seed, "pending-map hash seed");
    run->add_option("--out", run_out, "query output file (default stdout)");
    run->add_option("--csv", run_csv, "per-op work-unit dump");

    // verify
    auto* verify = app.add_subcommand("verify", "check engines and files against oracles");
    std::string verify_mode, verify_init, verify_trace, verify_in, verify_candidate;
    std::string verify_matrix_path, verify_witness_path;
    CommonFlags verify_flags;
    int verify_d = 1;
    verify->add_option("--mode", verify_mode, "oracle | canonical | witness")->required();
    verify->add_option("--init", verify_init, "initial slab file (oracle)");
    verify->add_option("--trace", verify_trace, "trace file (oracle)");
    verify->add_option("--engine", verify_flags.engine, "amortized | worstcase");
    verify->add_option("--backend", verify_flags.backend, "baseline | fast");
    verify->add_option("--threshold", verify_flags.threshold, "rebuild threshold");
    verify->add_option("--epoch", verify_flags.epoch, "epoch length (worstcase)");
    verify->add_option("--budget", verify_flags.budget, "work budget (worstcase)");
    verify->add_option("--hash-seed", verify_flags.hash_seed, "pending-map hash seed");
    verify->add_option("--in", verify_in, "input slab file (canonical)");
    verify->add_option("--candidate", verify_candidate, "candidate slab file (canonical)");
    verify->add_option("--matrix", verify_matrix_path, "dense matrix file (witness)");
    verify->add_option("--witness", verify_witness_path, "witness file (witness)");
    verify->add_option("--d", verify_d, "claimed width bound (witness)");

    // bench
    auto* bench = app.add_subcommand("bench", "timing grid, CSV output");
    Index bench_nmin = 1 << 10, bench_nmax = 1 << 20;
    std::size_t bench_ops = 20000;
    int bench_reps = 5, bench_d = 1;
    std::uint64_t bench_seed = 1;
    std::string bench_engine = "both", bench_backend = "baseline", bench_csv_path;
    double bench_max_ratio = 0;
    bench->add_option("--nmin", bench_nmin, "smallest n (doubling grid)");
    bench->add_option("--nmax", bench_nmax, "largest n");
    bench->add_option("--ops", bench_ops, "trace length per size");
    bench->add_option("--reps", bench_reps, "repetitions (median reported)");
    bench->add_option("--seed", bench_seed, "instance seed");
    bench->add_option("--d", bench_d, "d for the d(2n-2)+1 reference column");
    bench->add_option("--engine", bench_engine, "amortized | worstcase | both");
    bench->add_option("--backend", bench_backend, "baseline | fast");
    bench->add_option("--csv", bench_csv_path, "CSV output file");
    bench->add_option("--max-ratio", bench_max_ratio,
                      "fail if query-time ratio exceeds this (0 = report only)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed())
            return cmd_gen(gen_mode, gen_n, gen_k, gen_d, gen_seed, gen_ops, gen_ratio,
                           gen_flips, gen_out, gen_witness_out);
        if (dec->parsed()) return cmd_decompose(dec_in, dec_out);
        if (run->parsed()) return cmd_run(run_init, run_trace, run_flags, run_out, run_csv);
        if (verify->parsed()) {
            if (verify_mode == "oracle")
                return verify_oracle(verify_init, verify_trace, verify_flags);
            if (verify_mode == "canonical")
                return verify_canonical(verify_in, verify_candidate);
            if (verify_mode == "witness")
                return verify_witness(verify_matrix_path, verify_witness_path, verify_d);
            std::cerr << "verify: unknown mode '" << verify_mode << "'\n";
            return kExitInputError;
        }
        if (bench->parsed())
            return cmd_bench(bench_nmin, bench_nmax, bench_ops, bench_reps, bench_seed,
                             bench_d, bench_engine, bench_backend, bench_csv_path,
                             bench_max_ratio);
    } catch (const ParseError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInputError;
    } catch (const CLI::ValidationError& e) {
        std::cerr << e.what() << "\n";
        return kExitInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitInputError;
}
