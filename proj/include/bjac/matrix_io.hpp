#pragma once

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "bjac/matcore.hpp"

namespace bjac {

/// A square complex matrix with an attached partition, as stored on disk. No symmetry is implied.
struct PartitionedMatrix {
    cmat a;
    BlockPartition partition;
};

namespace detail {

inline std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline cplx parse_complex(const std::string& tok) {
    const auto colon = tok.find(':');
    if (colon == std::string::npos) throw ParseError("matrix entry '" + tok + "' is not of the form re:im");
    try {
        std::size_t used_re = 0, used_im = 0;
        const std::string re = tok.substr(0, colon);
        const std::string im = tok.substr(colon + 1);
        const double x = std::stod(re, &used_re);
        const double y = std::stod(im, &used_im);
        if (used_re != re.size() || used_im != im.size()) throw ParseError("trailing characters in '" + tok + "'");
        return {x, y};
    } catch (const std::logic_error&) {
        throw ParseError("cannot parse matrix entry '" + tok + "'");
    }
}

} // namespace detail

/// Text format: "n m", then the m partition sizes, then n rows of n "re:im" entries.
inline void write_matrix(std::ostream& os, const cmat& a, const BlockPartition& p) {
    if (!a.is_square() || a.rows() != p.n()) throw DimensionMismatch("write_matrix: partition does not match matrix");
    os << p.n() << ' ' << p.m() << '\n';
    for (std::size_t b = 0; b < p.m(); ++b) os << (b ? " " : "") << p.size(b);
    os << '\n';
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (std::size_t c = 0; c < a.cols(); ++c) {
            if (c) os << ' ';
            os << detail::format_double(a(r, c).real()) << ':' << detail::format_double(a(r, c).imag());
        }
        os << '\n';
    }
}

inline PartitionedMatrix read_matrix(std::istream& is) {
    std::size_t n = 0, m = 0;
    if (!(is >> n >> m)) throw ParseError("matrix header must be 'n m'");
    if (m == 0 || m > n) throw ParseError("invalid block count " + std::to_string(m) + " for n=" + std::to_string(n));
    std::vector<std::size_t> sizes(m);
    for (auto& s : sizes)
        if (!(is >> s)) throw ParseError("missing partition size");
    BlockPartition p(sizes);
    if (p.n() != n) throw ParseError("partition sizes do not sum to n");
    cmat a(n, n);
    std::string tok;
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) {
            if (!(is >> tok)) throw ParseError("matrix has fewer than n*n entries");
            a(r, c) = detail::parse_complex(tok);
        }
    return {std::move(a), std::move(p)};
}

inline void save_matrix(const std::string& path, const cmat& a, const BlockPartition& p) {
    std::ofstream os(path);
    if (!os) throw Error("cannot open '" + path + "' for writing");
    write_matrix(os, a, p);
}

inline PartitionedMatrix load_matrix(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error("cannot open '" + path + "'");
    return read_matrix(is);
}

} // namespace bjac
