#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "bjac/errors.hpp"
#include "bjac/random.hpp"

namespace bjac {

/// Block index pair with r < s, 0-based.
struct PivotPair {
    std::size_t r = 0;
    std::size_t s = 1;

    friend bool operator==(const PivotPair&, const PivotPair&) = default;
    bool shares_index(const PivotPair& o) const noexcept { return r == o.r || r == o.s || s == o.r || s == o.s; }
};

inline PivotPair make_pair_sorted(std::size_t a, std::size_t b) {
    if (a == b) throw InvalidOrdering("pivot pair with equal indices");
    return a < b ? PivotPair{a, b} : PivotPair{b, a};
}

/// A cyclic pivot ordering over m blocks together with the chain that produced it.
struct PivotOrdering {
    std::vector<PivotPair> pairs;
    std::size_t m = 0;
    std::size_t shift_count = 0;
    std::vector<std::string> chain_log;

    std::size_t size() const noexcept { return pairs.size(); }
    const PivotPair& operator[](std::size_t k) const { return pairs[k]; }

    friend bool operator==(const PivotOrdering& a, const PivotOrdering& b) { return a.m == b.m && a.pairs == b.pairs; }
};

inline std::size_t pair_count(std::size_t m) { return m * (m - 1) / 2; }

/// Dense index of a pair, column-major over the strict upper triangle.
inline std::size_t pair_index(const PivotPair& p) { return p.s * (p.s - 1) / 2 + p.r; }

inline bool is_valid_cyclic(const std::vector<PivotPair>& pairs, std::size_t m) {
    if (m < 2 || pairs.size() != pair_count(m)) return false;
    std::vector<char> seen(pairs.size(), 0);
    for (const auto& p : pairs) {
        if (!(p.r < p.s) || p.s >= m) return false;
        auto& flag = seen[pair_index(p)];
        if (flag) return false;
        flag = 1;
    }
    return true;
}

inline bool is_valid_cyclic(const PivotOrdering& o, std::size_t m) { return o.m == m && is_valid_cyclic(o.pairs, m); }
inline bool is_valid_cyclic(const PivotOrdering& o) { return is_valid_cyclic(o.pairs, o.m); }

inline void require_valid(const PivotOrdering& o) {
    if (!is_valid_cyclic(o)) throw InvalidOrdering("sequence does not cover every pivot pair exactly once");
}

inline PivotOrdering column_cyclic(std::size_t m) {
    if (m < 2) throw InvalidOrdering("cyclic ordering needs m >= 2");
    PivotOrdering o{{}, m, 0, {}};
    for (std::size_t s = 1; s < m; ++s)
        for (std::size_t r = 0; r < s; ++r) o.pairs.push_back({r, s});
    return o;
}

inline PivotOrdering row_cyclic(std::size_t m) {
    if (m < 2) throw InvalidOrdering("cyclic ordering needs m >= 2");
    PivotOrdering o{{}, m, 0, {}};
    for (std::size_t r = 0; r + 1 < m; ++r)
        for (std::size_t s = r + 1; s < m; ++s) o.pairs.push_back({r, s});
    return o;
}

enum class SerialMode { column, row };

namespace detail {

inline void check_permutation_of(const std::vector<std::size_t>& t, std::size_t lo, std::size_t hi) {
    if (t.size() != hi - lo + 1) throw InvalidOrdering("permutation has wrong length");
    std::vector<char> seen(t.size(), 0);
    for (std::size_t v : t) {
        if (v < lo || v > hi || seen[v - lo]) throw InvalidOrdering("not a permutation of the required range");
        seen[v - lo] = 1;
    }
}

} // namespace detail

/// Members of B_c (column mode) and B_r (row mode).
/// Column mode: taus[k] permutes {0..k+1} and orders column k+2.
/// Row mode: taus[k] permutes {k+1..m-1} and orders row k; rows run bottom-up from (m-2, m-1).
inline PivotOrdering serial_with_permutations(std::size_t m, SerialMode mode,
                                              const std::vector<std::vector<std::size_t>>& taus) {
    if (m < 2) throw InvalidOrdering("cyclic ordering needs m >= 2");
    if (taus.size() != m - 2) throw InvalidOrdering("expected m-2 permutations");
    PivotOrdering o{{}, m, 0, {}};
    if (mode == SerialMode::column) {
        o.pairs.push_back({0, 1});
        for (std::size_t s = 2; s < m; ++s) {
            const auto& t = taus[s - 2];
            detail::check_permutation_of(t, 0, s - 1);
            for (std::size_t v : t) o.pairs.push_back({v, s});
        }
    } else {
        o.pairs.push_back({m - 2, m - 1});
        for (std::size_t r = m - 2; r-- > 0;) {
            const auto& t = taus[r];
            detail::check_permutation_of(t, r + 1, m - 1);
            for (std::size_t v : t) o.pairs.push_back({r, v});
        }
    }
    return o;
}

inline std::vector<std::vector<std::size_t>> identity_taus(std::size_t m, SerialMode mode) {
    std::vector<std::vector<std::size_t>> taus;
    for (std::size_t k = 0; k + 2 < m; ++k) {
        std::vector<std::size_t> t(mode == SerialMode::column ? k + 2 : m - k - 1);
        std::iota(t.begin(), t.end(), mode == SerialMode::column ? 0 : k + 1);
        taus.push_back(std::move(t));
    }
    return taus;
}

inline PivotOrdering reverse(PivotOrdering o) {
    std::reverse(o.pairs.begin(), o.pairs.end());
    o.chain_log.push_back("reverse");
    return o;
}

/// [O_2, O_1] where O_1 holds the first k pairs.
inline PivotOrdering shift(PivotOrdering o, std::size_t k) {
    if (k > o.pairs.size()) throw InvalidOrdering("shift position out of range");
    if (k == 0 || k == o.pairs.size()) return o;
    std::rotate(o.pairs.begin(), o.pairs.begin() + static_cast<std::ptrdiff_t>(k), o.pairs.end());
    ++o.shift_count;
    o.chain_log.push_back("shift " + std::to_string(k));
    return o;
}

/// Maps every pair (i,j) to the sorted pair (q(i), q(j)); q also relabels the blocks of the partition.
inline PivotOrdering apply_permutation(PivotOrdering o, const std::vector<std::size_t>& q) {
    if (q.size() != o.m) throw InvalidOrdering("permutation length differs from m");
    detail::check_permutation_of(q, 0, o.m - 1);
    for (auto& p : o.pairs) p = make_pair_sorted(q[p.r], q[p.s]);
    std::string entry = "permute";
    for (std::size_t v : q) entry += ' ' + std::to_string(v + 1);
    entry += " (relabels partition blocks)";
    o.chain_log.push_back(std::move(entry));
    return o;
}

inline bool is_admissible(const PivotOrdering& o, std::size_t r) {
    return r + 1 < o.pairs.size() && !o.pairs[r].shares_index(o.pairs[r + 1]);
}

/// Swaps the terms at positions r and r+1, which must have disjoint index sets.
inline PivotOrdering admissible_transpose(PivotOrdering o, std::size_t r) {
    if (r + 1 >= o.pairs.size()) throw InvalidOrdering("transposition position out of range");
    if (o.pairs[r].shares_index(o.pairs[r + 1]))
        throw NotAdmissible("terms " + std::to_string(r) + " and " + std::to_string(r + 1) + " share an index");
    std::swap(o.pairs[r], o.pairs[r + 1]);
    o.chain_log.push_back("transpose " + std::to_string(r));
    return o;
}

/// True iff every two index-sharing pairs appear in the same relative order in both orderings.
inline bool are_equivalent(const PivotOrdering& a, const PivotOrdering& b) {
    if (a.m != b.m) throw InvalidOrdering("orderings over different m");
    require_valid(a);
    require_valid(b);
    const std::size_t n = a.pairs.size();
    std::vector<std::size_t> pa(n), pb(n);
    for (std::size_t k = 0; k < n; ++k) {
        pa[pair_index(a.pairs[k])] = k;
        pb[pair_index(b.pairs[k])] = k;
    }
    for (std::size_t x = 0; x < n; ++x)
        for (std::size_t y = x + 1; y < n; ++y) {
            const PivotPair& p = a.pairs[x];
            const PivotPair& q = a.pairs[y];
            if (!p.shares_index(q)) continue;
            if (pb[pair_index(p)] > pb[pair_index(q)]) return false;
        }
    return true;
}

namespace detail {

inline std::vector<std::size_t> random_permutation(std::size_t lo, std::size_t hi, engine& g) {
    std::vector<std::size_t> t(hi - lo + 1);
    std::iota(t.begin(), t.end(), lo);
    for (std::size_t k = t.size(); k > 1; --k) {
        std::uniform_int_distribution<std::size_t> d(0, k - 1);
        std::swap(t[k - 1], t[d(g)]);
    }
    return t;
}

} // namespace detail

/// Seeded random member of B_sp: random mode, random within-column/row permutations, optional reverse.
inline PivotOrdering random_serial_with_permutations(std::size_t m, engine& g) {
    if (m < 2) throw InvalidOrdering("cyclic ordering needs m >= 2");
    std::bernoulli_distribution coin(0.5);
    const SerialMode mode = coin(g) ? SerialMode::column : SerialMode::row;
    std::vector<std::vector<std::size_t>> taus;
    for (std::size_t k = 0; k + 2 < m; ++k)
        taus.push_back(mode == SerialMode::column ? detail::random_permutation(0, k + 1, g)
                                                  : detail::random_permutation(k + 1, m - 1, g));
    PivotOrdering o = serial_with_permutations(m, mode, taus);
    o.chain_log.push_back(mode == SerialMode::column ? "serial column" : "serial row");
    if (coin(g)) o = reverse(std::move(o));
    return o;
}

/// B_sp start followed by `chain_length` random transpositions, shifts and permutations.
inline PivotOrdering random_generalized_serial(std::size_t m, std::uint64_t seed, std::size_t chain_length) {
    engine g = make_engine(seed, 0x70697674ULL);
    PivotOrdering o = random_serial_with_permutations(m, g);
    const std::size_t n = o.pairs.size();
    std::uniform_int_distribution<int> pick(0, 2);
    for (std::size_t step = 0; step < chain_length; ++step) {
        const int kind = pick(g);
        if (kind == 0) {
            std::vector<std::size_t> spots;
            for (std::size_t r = 0; r + 1 < n; ++r)
                if (is_admissible(o, r)) spots.push_back(r);
            if (spots.empty()) continue;
            std::uniform_int_distribution<std::size_t> d(0, spots.size() - 1);
            o = admissible_transpose(std::move(o), spots[d(g)]);
        } else if (kind == 1) {
            if (n < 2) continue;
            std::uniform_int_distribution<std::size_t> d(1, n - 1);
            o = shift(std::move(o), d(g));
        } else {
            o = apply_permutation(std::move(o), detail::random_permutation(0, m - 1, g));
        }
    }
    return o;
}

/// Symmetric m x m matrix with entry k at positions of the k-th pair; diagonal -1.
struct OrderingMatrix {
    std::size_t m = 0;
    std::vector<long> entries;

    long operator()(std::size_t r, std::size_t s) const { return entries[r * m + s]; }
    friend bool operator==(const OrderingMatrix&, const OrderingMatrix&) = default;
};

inline OrderingMatrix ordering_matrix(const PivotOrdering& o) {
    require_valid(o);
    OrderingMatrix mo{o.m, std::vector<long>(o.m * o.m, -1)};
    for (std::size_t k = 0; k < o.pairs.size(); ++k) {
        const auto& p = o.pairs[k];
        mo.entries[p.r * o.m + p.s] = static_cast<long>(k);
        mo.entries[p.s * o.m + p.r] = static_cast<long>(k);
    }
    return mo;
}

inline PivotOrdering ordering_from_matrix(const OrderingMatrix& mo) {
    const std::size_t m = mo.m;
    if (m < 2 || mo.entries.size() != m * m) throw InvalidOrdering("ordering matrix has wrong shape");
    std::vector<PivotPair> pairs(pair_count(m));
    std::vector<char> seen(pairs.size(), 0);
    for (std::size_t s = 1; s < m; ++s)
        for (std::size_t r = 0; r < s; ++r) {
            const long k = mo(r, s);
            if (k != mo(s, r) || k < 0 || static_cast<std::size_t>(k) >= pairs.size() || seen[k])
                throw InvalidOrdering("ordering matrix entries are not a symmetric permutation of 0..M-1");
            seen[k] = 1;
            pairs[k] = {r, s};
        }
    return {std::move(pairs), m, 0, {}};
}

inline std::ostream& operator<<(std::ostream& os, const OrderingMatrix& mo) {
    for (std::size_t r = 0; r < mo.m; ++r) {
        for (std::size_t s = 0; s < mo.m; ++s) {
            if (s) os << ' ';
            if (r == s)
                os << '*';
            else
                os << mo(r, s);
        }
        os << '\n';
    }
    return os;
}

/// 1-based display "(r,s),(r,s),...".
inline std::string to_string(const PivotOrdering& o) {
    std::string out;
    for (std::size_t k = 0; k < o.pairs.size(); ++k) {
        if (k) out += ',';
        out += '(' + std::to_string(o.pairs[k].r + 1) + ',' + std::to_string(o.pairs[k].s + 1) + ')';
    }
    return out;
}

/// Text format: "m d", then one 1-based "r s" pair per line.
inline void write_ordering(std::ostream& os, const PivotOrdering& o) {
    os << o.m << ' ' << o.shift_count << '\n';
    for (const auto& p : o.pairs) os << p.r + 1 << ' ' << p.s + 1 << '\n';
}

inline PivotOrdering read_ordering(std::istream& is) {
    long m = 0, d = 0;
    if (!(is >> m >> d) || m < 2 || d < 0) throw ParseError("ordering header must be 'm d' with m >= 2, d >= 0");
    PivotOrdering o{{}, static_cast<std::size_t>(m), static_cast<std::size_t>(d), {}};
    for (std::size_t k = 0; k < pair_count(o.m); ++k) {
        long r = 0, s = 0;
        if (!(is >> r >> s)) throw ParseError("ordering has fewer than m(m-1)/2 pairs");
        if (r < 1 || s < 1 || r > m || s > m || r == s) throw ParseError("pair out of range");
        o.pairs.push_back(make_pair_sorted(static_cast<std::size_t>(r - 1), static_cast<std::size_t>(s - 1)));
    }
    if (!is_valid_cyclic(o)) throw InvalidOrdering("loaded ordering does not cover every pair exactly once");
    if (d > 0) o.chain_log.push_back("loaded with d=" + std::to_string(d));
    return o;
}

inline PivotOrdering load_ordering(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error("cannot open '" + path + "'");
    return read_ordering(is);
}

inline void save_ordering(const std::string& path, const PivotOrdering& o) {
    std::ofstream os(path);
    if (!os) throw Error("cannot open '" + path + "' for writing");
    write_ordering(os, o);
}

} // namespace bjac
