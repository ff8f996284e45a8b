#pragma once

// Text file formats:
//   slab file:    "n K" then K lines "a b c d" (1-based inclusive)
//   dense file:   "n" then n lines of n characters '0'/'1'
//   trace file:   one op per line, "U i j" (flip) or "Q i j" (query)
//   witness file: "n p" then p lines "R k" or "C k" (merge blocks k, k+1)
// Parse errors carry the offending 1-based line number.

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "twm/core.hpp"
#include "twm/oracle.hpp"

namespace twm {

struct ParseError : std::runtime_error {
    int line;
    ParseError(int line_no, const std::string& what)
        : std::runtime_error("line " + std::to_string(line_no) + ": " + what),
          line(line_no) {}
};

namespace detail {

inline bool next_content_line(std::istream& in, std::string& line, int& line_no) {
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
}

inline long long parse_int(const std::string& tok, int line_no) {
    try {
        std::size_t pos = 0;
        long long v = std::stoll(tok, &pos);
        if (pos != tok.size()) throw std::invalid_argument(tok);
        return v;
    } catch (const std::exception&) {
        throw ParseError(line_no, "expected an integer, got '" + tok + "'");
    }
}

inline std::vector<std::string> split_tokens(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

}  // namespace detail

inline SlabDecomposition read_slab_file(std::istream& in) {
    int line_no = 0;
    std::string line;
    if (!detail::next_content_line(in, line, line_no))
        throw ParseError(1, "missing header 'n K'");
    auto head = detail::split_tokens(line);
    if (head.size() != 2) throw ParseError(line_no, "expected header 'n K'");
    long long n = detail::parse_int(head[0], line_no);
    long long k = detail::parse_int(head[1], line_no);
    if (n < 1 || n > (1 << 26)) throw ParseError(line_no, "n out of range");
    if (k < 0) throw ParseError(line_no, "negative slab count");
    SlabDecomposition dec;
    dec.n = Index(n);
    dec.slabs.reserve(std::size_t(k));
    for (long long i = 0; i < k; ++i) {
        if (!detail::next_content_line(in, line, line_no))
            throw ParseError(line_no + 1, "expected " + std::to_string(k) +
                                              " slabs, file ends after " +
                                              std::to_string(i));
        auto tok = detail::split_tokens(line);
        if (tok.size() != 4) throw ParseError(line_no, "expected 'a b c d'");
        Slab s{Index(detail::parse_int(tok[0], line_no)),
               Index(detail::parse_int(tok[1], line_no)),
               Index(detail::parse_int(tok[2], line_no)),
               Index(detail::parse_int(tok[3], line_no))};
        if (!slab_in_range(s, dec.n))
            throw ParseError(line_no, "slab " + to_string(s) + " out of range for n=" +
                                          std::to_string(n));
        dec.slabs.push_back(s);
    }
    return dec;
}

inline void write_slab_file(std::ostream& out, SlabDecomposition dec) {
    std::sort(dec.slabs.begin(), dec.slabs.end(), slab_order);
    out << dec.n << ' ' << dec.slabs.size() << '\n';
    for (const Slab& s : dec.slabs)
        out << s.row_lo << ' ' << s.row_hi << ' ' << s.col_lo << ' ' << s.col_hi << '\n';
}

inline DenseMatrix read_dense_file(std::istream& in) {
    int line_no = 0;
    std::string line;
    if (!detail::next_content_line(in, line, line_no)) throw ParseError(1, "missing 'n'");
    auto head = detail::split_tokens(line);
    if (head.size() != 1) throw ParseError(line_no, "expected a single 'n'");
    long long n = detail::parse_int(head[0], line_no);
    if (n < 1 || n > 1 << 14) throw ParseError(line_no, "n out of range for dense files");
    DenseMatrix m{Index(n)};
    for (Index r = 1; r <= n; ++r) {
        if (!detail::next_content_line(in, line, line_no))
            throw ParseError(line_no + 1, "expected " + std::to_string(n) + " rows");
        std::string row;
        for (char ch : line)
            if (ch != ' ' && ch != '\t' && ch != '\r') row.push_back(ch);
        if (Index(row.size()) != n)
            throw ParseError(line_no, "row has " + std::to_string(row.size()) +
                                          " entries, expected " + std::to_string(n));
        for (Index c = 1; c <= n; ++c) {
            if (row[c - 1] != '0' && row[c - 1] != '1')
                throw ParseError(line_no, std::string("bad entry '") + row[c - 1] + "'");
            m.set(r, c, row[c - 1] == '1');
        }
    }
    return m;
}

inline void write_dense_file(std::ostream& out, const DenseMatrix& m) {
    out << m.n() << '\n';
    for (Index r = 1; r <= m.n(); ++r) {
        for (Index c = 1; c <= m.n(); ++c) out << (m.get(r, c) ? '1' : '0');
        out << '\n';
    }
}

inline std::vector<TraceOp> read_trace_file(std::istream& in) {
    int line_no = 0;
    std::string line;
    std::vector<TraceOp> ops;
    while (detail::next_content_line(in, line, line_no)) {
        auto tok = detail::split_tokens(line);
        if (tok.size() != 3 || (tok[0] != "U" && tok[0] != "Q"))
            throw ParseError(line_no, "expected 'U i j' or 'Q i j'");
        ops.push_back({tok[0] == "Q",
                       {Index(detail::parse_int(tok[1], line_no)),
                        Index(detail::parse_int(tok[2], line_no))}});
    }
    return ops;
}

inline void write_trace_file(std::ostream& out, const std::vector<TraceOp>& ops) {
    for (const TraceOp& op : ops)
        out << (op.is_query ? 'Q' : 'U') << ' ' << op.cell.row << ' ' << op.cell.col
            << '\n';
}

inline std::pair<Index, ContractionSequence> read_witness_file(std::istream& in) {
    int line_no = 0;
    std::string line;
    if (!detail::next_content_line(in, line, line_no))
        throw ParseError(1, "missing header 'n steps'");
    auto head = detail::split_tokens(line);
    if (head.size() != 2) throw ParseError(line_no, "expected header 'n steps'");
    long long n = detail::parse_int(head[0], line_no);
    long long p = detail::parse_int(head[1], line_no);
    if (n < 1) throw ParseError(line_no, "n out of range");
    ContractionSequence seq;
    for (long long i = 0; i < p; ++i) {
        if (!detail::next_content_line(in, line, line_no))
            throw ParseError(line_no + 1, "expected " + std::to_string(p) + " steps");
        auto tok = detail::split_tokens(line);
        if (tok.size() != 2 || (tok[0] != "R" && tok[0] != "C"))
            throw ParseError(line_no, "expected 'R k' or 'C k'");
        seq.steps.push_back({tok[0] == "R", Index(detail::parse_int(tok[1], line_no))});
    }
    return {Index(n), seq};
}

inline void write_witness_file(std::ostream& out, Index n, const ContractionSequence& seq) {
    out << n << ' ' << seq.steps.size() << '\n';
    for (const ContractionStep& s : seq.steps)
        out << (s.row_axis ? 'R' : 'C') << ' ' << s.index << '\n';
}

// Path-based wrappers.

inline std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
    return in;
}

inline std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    return out;
}

}  // namespace twm
