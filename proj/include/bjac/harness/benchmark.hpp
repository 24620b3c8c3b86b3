#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "bjac/annihilator.hpp"
#include "bjac/blocksolve.hpp"
#include "bjac/errors.hpp"
#include "bjac/harness/generators.hpp"
#include "bjac/harness/oracle.hpp"
#include "bjac/pivot.hpp"

namespace bjac::bench {

inline std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string partition_label(const BlockPartition& p) {
    std::ostringstream os;
    const auto& s = p.sizes();
    if (std::all_of(s.begin(), s.end(), [&](std::size_t x) { return x == s.front(); })) {
        os << s.front() << "x" << s.size();
    } else {
        for (std::size_t k = 0; k < s.size(); ++k) os << (k ? "-" : "") << s[k];
    }
    return os.str();
}

/// Case label carrying n, partition, matrix seed and strategy seed.
inline std::string case_id(const std::string& prefix, std::size_t n, const BlockPartition& p, std::uint64_t matrix_seed,
                           std::uint64_t strategy_seed) {
    return prefix + "_n" + std::to_string(n) + "_pi" + partition_label(p) + "_ms" + std::to_string(matrix_seed) +
           "_ss" + std::to_string(strategy_seed);
}

inline BlockPartition uniform_partition(std::size_t n, std::size_t block) {
    if (block == 0 || n % block != 0)
        throw ConfigError("n = " + std::to_string(n) + " is not divisible by block size " + std::to_string(block));
    return BlockPartition::uniform(n, block);
}

struct Common {
    std::size_t n = 100;
    std::uint64_t matrix_seed = 1;
    double tol = 1e-13;
    std::size_t max_cycles = 30;
    double rho = 1.0;
    bool attr_R = true;
};

struct TraceCase {
    std::string experiment;
    std::string id;
    BlockPartition partition;
    PivotOrdering ordering;
    std::uint64_t strategy_seed = 0;
    SolveResult result;
};

inline SolverConfig make_config(const Common& c, const PivotOrdering& o, std::uint64_t seed) {
    SolverConfig cfg;
    cfg.ordering = o;
    cfg.rho = c.rho;
    cfg.tol = c.tol;
    cfg.max_cycles = c.max_cycles;
    cfg.use_attr_R = c.attr_R;
    cfg.seed = seed;
    return cfg;
}

/// Random generalized serial ordering used for strategy seed s on m blocks.
inline PivotOrdering strategy(std::size_t m, std::uint64_t s) {
    return m >= 2 ? random_generalized_serial(m, s, m) : PivotOrdering{{}, m, 0, {}};
}

inline TraceCase run_trace_case(const std::string& experiment, const cmat& a, const BlockPartition& p, const Common& c,
                                std::uint64_t strategy_seed) {
    TraceCase tc{experiment, case_id(experiment, a.rows(), p, c.matrix_seed, strategy_seed), p,
                 strategy(p.m(), strategy_seed), strategy_seed, {}};
    SolverConfig cfg = make_config(c, tc.ordering, strategy_seed);
    cfg.strategy_id = tc.id;
    tc.result = solve_hermitian(PartitionedHermitian(a, p), cfg);
    return tc;
}

/// Per-cycle off-norms of five (or more) strategies on one random Hermitian matrix.
inline std::vector<TraceCase> strategies(const Common& c, std::size_t block, const std::vector<std::uint64_t>& seeds) {
    const cmat a = gen_random_hermitian(c.n, c.matrix_seed);
    const BlockPartition p = uniform_partition(c.n, block);
    std::vector<TraceCase> out;
    for (auto s : seeds) out.push_back(run_trace_case("strategies", a, p, c, s));
    return out;
}

/// Per-cycle off-norms for several block sizes with one strategy seed.
inline std::vector<TraceCase> blocksizes(const Common& c, const std::vector<std::size_t>& blocks,
                                         std::uint64_t strategy_seed) {
    const cmat a = gen_random_hermitian(c.n, c.matrix_seed);
    std::vector<TraceCase> out;
    for (auto b : blocks) out.push_back(run_trace_case("blocksizes", a, uniform_partition(c.n, b), c, strategy_seed));
    return out;
}

inline void write_trace_header(std::ostream& os) { os << "experiment,case_id,cycle,off_norm,off_rel\n"; }

inline void write_trace(std::ostream& os, const TraceCase& tc) {
    const auto& tr = tc.result.trace;
    for (std::size_t k = 0; k < tr.per_cycle_off.size(); ++k)
        os << tc.experiment << ',' << tc.id << ',' << k << ',' << fmt(tr.per_cycle_off[k]) << ','
           << fmt(tr.per_cycle_off[k] / tr.norm) << '\n';
}

struct AccuracyRow {
    std::string id;
    std::size_t block = 0;
    std::size_t index = 0;
    double oracle = 0.0;
    double estimate = 0.0;
    double rel_err = 0.0;
};

struct AccuracyCase {
    std::string id;
    std::size_t block = 0;
    bool converged = false;
    double max_rel_err = 0.0;
    std::vector<AccuracyRow> rows;
};

struct AccuracyReport {
    std::vector<double> oracle;
    std::vector<AccuracyCase> cases;
};

inline double relative_error(double est, double ref) {
    return ref == 0.0 ? std::abs(est) : std::abs(est - ref) / std::abs(ref);
}

/// Block Jacobi eigenvalues of A = DMD against the double-double oracle, one case per block size.
inline AccuracyReport accuracy(const Common& c, const std::vector<std::size_t>& blocks, double cond_exp,
                               std::uint64_t strategy_seed) {
    const cmat a = gen_ill_conditioned(c.n, c.matrix_seed, cond_exp);
    AccuracyReport rep;
    rep.oracle = oracle_eigen(a).values;
    for (auto b : blocks) {
        const BlockPartition p = uniform_partition(c.n, b);
        AccuracyCase ac;
        ac.block = b;
        ac.id = case_id("accuracy", c.n, p, c.matrix_seed, strategy_seed) + "_ce" + fmt(cond_exp);
        SolverConfig cfg = make_config(c, strategy(p.m(), strategy_seed), strategy_seed);
        const SolveResult r = solve_hermitian(PartitionedHermitian(a, p), cfg);
        ac.converged = r.trace.converged;
        std::vector<double> est(r.lambda.size());
        for (std::size_t k = 0; k < est.size(); ++k) est[k] = r.lambda[k].real();
        std::sort(est.begin(), est.end());
        for (std::size_t k = 0; k < est.size(); ++k) {
            const double e = relative_error(est[k], rep.oracle[k]);
            ac.max_rel_err = std::max(ac.max_rel_err, e);
            ac.rows.push_back({ac.id, b, k, rep.oracle[k], est[k], e});
        }
        rep.cases.push_back(std::move(ac));
    }
    return rep;
}

inline void write_accuracy_header(std::ostream& os) {
    os << "case_id,block_size,eig_index,lambda_oracle_re,lambda_oracle_im,lambda_est_re,lambda_est_im,rel_err\n";
}

inline void write_accuracy(std::ostream& os, const AccuracyCase& ac) {
    for (const auto& r : ac.rows)
        os << r.id << ',' << r.block << ',' << r.index << ',' << fmt(r.oracle) << ",0," << fmt(r.estimate) << ",0,"
           << fmt(r.rel_err) << '\n';
}

struct VerifyRow {
    std::string id;
    double max_structure_dev = 0.0;
    double annihilator_norm = 0.0;
    double operator_norm = 0.0;
    double mu = 0.0;
    bool null_two_block_ok = true;
};

/// Randomized annihilator structure checks plus empirical mu on small mixed partitions.
inline std::vector<VerifyRow> verify_annihilators(std::size_t cases, std::size_t mu_trials, double rho,
                                                  std::uint64_t seed) {
    std::vector<VerifyRow> out;
    engine g = make_engine(seed, 0x76657269);
    for (std::size_t k = 0; k < cases; ++k) {
        const std::size_t n = 3 + g() % 6;
        std::vector<std::size_t> sizes;
        for (std::size_t left = n; left > 0;) {
            std::size_t s = 1 + g() % std::min<std::size_t>(left, 3);
            if (sizes.empty() && s == left) s = left - 1;
            sizes.push_back(s);
            left -= s;
        }
        const BlockPartition p(sizes);
        const std::size_t j = 1 + g() % (p.m() - 1), i = g() % j;
        const VecIndexer ix(p);
        const cmat u = random_unitary(p.size(i) + p.size(j), g);
        const cmat ro = build_annihilator_oracle(ix, i, j, u);
        const cmat rs = build_annihilator_structured(ix, i, j, u);
        VerifyRow row;
        row.id = "annihilator_n" + std::to_string(n) + "_pi" + partition_label(p) + "_pair" + std::to_string(i + 1) +
                 "-" + std::to_string(j + 1) + "_case" + std::to_string(k);
        row.max_structure_dev = max_abs_diff(ro, rs);
        row.annihilator_norm = spectral_norm(rs);
        std::vector<cmat> ts;
        const PivotOrdering o = random_generalized_serial(p.m() >= 2 ? p.m() : 2, g(), 2);
        for (const auto& pr : o.pairs)
            ts.push_back(random_unitary(p.size(pr.r) + p.size(pr.s), g));
        row.operator_norm = spectral_norm(build_operator(ix, o, ts));
        out.push_back(row);
    }
    // (n_i, n_j) partitions: the annihilator is the null matrix.
    for (std::size_t a = 1; a <= 3; ++a)
        for (std::size_t b = 1; b <= 3; ++b) {
            const BlockPartition p({a, b});
            const VecIndexer ix(p);
            VerifyRow row;
            row.id = "null_pi" + partition_label(p);
            const cmat u = random_unitary(a + b, g);
            const cmat r = build_annihilator_structured(ix, 0, 1, u);
            const cmat ro = build_annihilator_oracle(ix, 0, 1, u);
            row.max_structure_dev = max_abs_diff(ro, r);
            row.annihilator_norm = spectral_norm(r);
            row.null_two_block_ok = max_abs(r) == 0.0 && max_abs(ro) == 0.0;
            out.push_back(row);
        }
    for (const auto& sizes : std::vector<std::vector<std::size_t>>{{1, 2, 1}, {2, 1, 2}, {1, 2, 1, 2}, {2, 1, 1, 2}}) {
        const BlockPartition p(sizes);
        for (const auto& [name, o] : std::vector<std::pair<std::string, PivotOrdering>>{
                 {"col", column_cyclic(p.m())}, {"row", row_cyclic(p.m())},
                 {"gs", random_generalized_serial(p.m(), seed + p.m(), 3)}}) {
            const auto rep = empirical_mu_report(p, o, rho, mu_trials, seed);
            VerifyRow row;
            row.id = "mu_pi" + partition_label(p) + "_" + name + "_d" + std::to_string(o.shift_count);
            row.annihilator_norm = rep.max_annihilator_norm;
            row.operator_norm = rep.max_operator_norm;
            row.mu = rep.mu;
            out.push_back(row);
        }
    }
    return out;
}

inline void write_verify_header(std::ostream& os) {
    os << "case_id,max_structure_dev,annihilator_norm,operator_norm,empirical_mu\n";
}

inline void write_verify(std::ostream& os, const VerifyRow& r) {
    os << r.id << ',' << fmt(r.max_structure_dev) << ',' << fmt(r.annihilator_norm) << ',' << fmt(r.operator_norm)
       << ',' << fmt(r.mu) << '\n';
}

inline std::ofstream open_output(const std::filesystem::path& dir, const std::string& name) {
    std::filesystem::create_directories(dir);
    std::ofstream f(dir / name);
    if (!f) throw Error("cannot open " + (dir / name).string() + " for writing");
    return f;
}

} // namespace bjac::bench
