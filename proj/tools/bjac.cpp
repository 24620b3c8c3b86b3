// bjac: block Jacobi eigensolvers and benchmark experiments.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "bjac/bjac.hpp"

namespace fs = std::filesystem;
using namespace bjac;

namespace {

struct Options {
    std::size_t n = 100;
    std::vector<std::size_t> blocks;
    std::vector<std::uint64_t> strategy_seeds;
    std::uint64_t matrix_seed = 1;
    double tol = 1e-13;
    std::size_t max_cycles = 30;
    double rho = 1.0;
    bool attr_R = true;
    std::string out;
    bool paper_scale = false;
    std::string input;
    std::string output;
    std::string ordering_file;
    std::size_t nu = 0;
    std::string driver = "hermitian";
    double gap = 0.5;
    double cond_exp = 10.0;
    std::string kind = "hermitian";
    std::size_t cases = 50;
    std::size_t trials = 100;
    bool quiet = false;
};

void add_common(CLI::App* c, Options& o) {
    c->add_option("--n", o.n, "matrix dimension")->check(CLI::PositiveNumber);
    c->add_option("--blocks", o.blocks, "block size(s)");
    c->add_option("--strategy-seed", o.strategy_seeds, "pivot strategy seed(s)");
    c->add_option("--matrix-seed", o.matrix_seed, "test matrix seed");
    c->add_option("--tol", o.tol, "relative off-norm tolerance")->check(CLI::PositiveNumber);
    c->add_option("--max-cycles", o.max_cycles, "cycle limit")->check(CLI::PositiveNumber);
    c->add_option("--rho", o.rho, "UBC factor in (0,1]");
    c->add_option("--attr-r", o.attr_R, "apply attribute R to the UBC permutation (0/1)");
    c->add_option("--out", o.out, "output directory for CSV files");
    c->add_flag("--paper-scale", o.paper_scale, "use n = 200");
}

void add_input(CLI::App* c, Options& o) {
    c->add_option("--input", o.input, "matrix file (text format); generated when omitted");
    c->add_option("--ordering", o.ordering_file, "pivot ordering file");
    c->add_flag("--quiet", o.quiet, "print the summary only");
}

std::size_t dim(const Options& o) { return o.paper_scale ? 200 : o.n; }

bench::Common common(const Options& o) {
    bench::Common c;
    c.n = dim(o);
    c.matrix_seed = o.matrix_seed;
    c.tol = o.tol;
    c.max_cycles = o.max_cycles;
    c.rho = o.rho;
    c.attr_R = o.attr_R;
    return c;
}

std::uint64_t first_seed(const Options& o) { return o.strategy_seeds.empty() ? 1 : o.strategy_seeds.front(); }

SolverConfig solver_config(const Options& o, const BlockPartition& p) {
    SolverConfig cfg = bench::make_config(common(o), bench::strategy(p.m(), first_seed(o)), first_seed(o));
    if (!o.ordering_file.empty()) cfg.ordering = load_ordering(o.ordering_file);
    return cfg;
}

PartitionedMatrix input_or(const Options& o, const cmat& generated, std::size_t default_block) {
    if (!o.input.empty()) return load_matrix(o.input);
    const std::size_t b = o.blocks.empty() ? default_block : o.blocks.front();
    return {generated, bench::uniform_partition(generated.rows(), b)};
}

void print_values(const std::vector<cplx>& l, bool complex_values) {
    for (std::size_t k = 0; k < l.size(); ++k) {
        if (complex_values)
            std::printf("%zu %s %s\n", k + 1, bench::fmt(l[k].real()).c_str(), bench::fmt(l[k].imag()).c_str());
        else
            std::printf("%zu %s\n", k + 1, bench::fmt(l[k].real()).c_str());
    }
}

void print_summary(const SolveResult& r) {
    const auto& t = r.trace;
    std::printf("converged %d cycles %zu off %s off_rel %s\n", t.converged ? 1 : 0, t.cycles_used,
                bench::fmt(t.per_cycle_off.back()).c_str(), bench::fmt(t.per_cycle_off.back() / t.norm).c_str());
    for (const auto& w : t.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
}

void write_single_trace(const Options& o, const std::string& experiment, const std::string& id, const SolveResult& r,
                        const BlockPartition& p) {
    if (o.out.empty()) return;
    auto f = bench::open_output(o.out, "trace.csv");
    bench::write_trace_header(f);
    bench::write_trace(f, bench::TraceCase{experiment, id, p, {}, first_seed(o), r});
}

int solve_hermitian_cmd(const Options& o) {
    const auto pm = input_or(o, gen_random_hermitian(dim(o), o.matrix_seed), 2);
    const auto r = solve_hermitian(PartitionedHermitian(pm.a, pm.partition), solver_config(o, pm.partition));
    if (!o.quiet) print_values(r.lambda, false);
    print_summary(r);
    write_single_trace(o, "solve_hermitian",
                       bench::case_id("solve_hermitian", pm.a.rows(), pm.partition, o.matrix_seed, first_seed(o)), r,
                       pm.partition);
    return r.trace.converged ? 0 : 2;
}

int solve_normal_cmd(const Options& o) {
    const std::size_t n = o.paper_scale ? 200 : (o.n == 100 ? 20 : o.n);
    const auto pm = input_or(o, gen_random_normal(n, o.matrix_seed, o.gap).a, 4);
    NormalOptions no;
    if (o.driver == "skew") no.driver = NormalDriver::skew_part;
    else if (o.driver != "hermitian") throw ConfigError("--driver must be hermitian or skew");
    const auto r = solve_normal(pm.a, pm.partition, solver_config(o, pm.partition), no);
    if (!o.quiet) print_values(r.lambda, true);
    print_summary(r);
    write_single_trace(o, "solve_normal",
                       bench::case_id("solve_normal", pm.a.rows(), pm.partition, o.matrix_seed, first_seed(o)), r,
                       pm.partition);
    return r.trace.converged ? 0 : 2;
}

int solve_j_cmd(const Options& o) {
    const std::size_t n = o.paper_scale ? 200 : (o.n == 100 ? 24 : o.n);
    const auto pm = input_or(o, gen_spd(n, o.matrix_seed), 3);
    const std::size_t nu = o.nu ? o.nu : pm.a.rows() / 2;
    const auto r = solve_j_hermitian(PartitionedHermitian(pm.a, pm.partition), nu, solver_config(o, pm.partition));
    if (!o.quiet) {
        const auto pe = pencil_eigenvalues(r, nu);
        for (std::size_t k = 0; k < pe.size(); ++k) std::printf("%zu %s\n", k + 1, bench::fmt(pe[k]).c_str());
    }
    print_summary(r);
    std::printf("j_defect %s\n", bench::fmt(j_unitarity_defect(r.transform, nu)).c_str());
    write_single_trace(o, "solve_jjacobi",
                       bench::case_id("solve_jjacobi", pm.a.rows(), pm.partition, o.matrix_seed, first_seed(o)), r,
                       pm.partition);
    return r.trace.converged ? 0 : 2;
}

int trace_report(const Options& o, const std::vector<bench::TraceCase>& cases) {
    bool all = true;
    for (const auto& c : cases) {
        std::printf("%s converged %d cycles %zu d %zu\n", c.id.c_str(), c.result.trace.converged ? 1 : 0,
                    c.result.trace.cycles_used, c.ordering.shift_count);
        all = all && c.result.trace.converged;
    }
    if (!o.out.empty()) {
        auto f = bench::open_output(o.out, "trace.csv");
        bench::write_trace_header(f);
        for (const auto& c : cases) bench::write_trace(f, c);
    }
    return all ? 0 : 2;
}

int bench_strategies_cmd(const Options& o) {
    std::vector<std::uint64_t> seeds = o.strategy_seeds;
    if (seeds.empty()) seeds = {1, 2, 3, 4, 5};
    return trace_report(o, bench::strategies(common(o), o.blocks.empty() ? 2 : o.blocks.front(), seeds));
}

int bench_blocksizes_cmd(const Options& o) {
    std::vector<std::size_t> blocks = o.blocks;
    if (blocks.empty()) blocks = {2, 5, 10, 20};
    return trace_report(o, bench::blocksizes(common(o), blocks, first_seed(o)));
}

int bench_accuracy_cmd(const Options& o) {
    std::vector<std::size_t> blocks = o.blocks;
    if (blocks.empty()) blocks = {2, 5, 10, 20};
    const auto rep = bench::accuracy(common(o), blocks, o.cond_exp, first_seed(o));
    bool all = true;
    for (const auto& c : rep.cases) {
        std::printf("%s converged %d max_rel_err %s\n", c.id.c_str(), c.converged ? 1 : 0,
                    bench::fmt(c.max_rel_err).c_str());
        all = all && c.converged;
    }
    if (!o.out.empty()) {
        auto f = bench::open_output(o.out, "accuracy.csv");
        bench::write_accuracy_header(f);
        for (const auto& c : rep.cases) bench::write_accuracy(f, c);
    }
    return all ? 0 : 2;
}

int verify_cmd(const Options& o) {
    const auto rows = bench::verify_annihilators(o.cases, o.trials, o.rho, o.matrix_seed);
    double dev = 0, an = 0, op = 0, mu = 0;
    for (const auto& r : rows) {
        dev = std::max(dev, r.max_structure_dev);
        an = std::max(an, r.annihilator_norm);
        op = std::max(op, r.operator_norm);
        mu = std::max(mu, r.mu);
    }
    std::printf("cases %zu max_structure_dev %s max_annihilator_norm %s max_operator_norm %s max_empirical_mu %s\n",
                rows.size(), bench::fmt(dev).c_str(), bench::fmt(an).c_str(), bench::fmt(op).c_str(),
                bench::fmt(mu).c_str());
    if (!o.out.empty()) {
        auto f = bench::open_output(o.out, "verify.csv");
        bench::write_verify_header(f);
        for (const auto& r : rows) bench::write_verify(f, r);
    }
    return 0;
}

int gen_matrix_cmd(const Options& o) {
    const std::size_t n = dim(o);
    cmat a;
    if (o.kind == "hermitian") a = gen_random_hermitian(n, o.matrix_seed);
    else if (o.kind == "ill") a = gen_ill_conditioned(n, o.matrix_seed, o.cond_exp);
    else if (o.kind == "normal") a = gen_random_normal(n, o.matrix_seed, o.gap).a;
    else if (o.kind == "spd") a = gen_spd(n, o.matrix_seed);
    else throw ConfigError("--kind must be hermitian, ill, normal or spd");
    const auto p = bench::uniform_partition(n, o.blocks.empty() ? 1 : o.blocks.front());
    if (o.output.empty() || o.output == "-") write_matrix(std::cout, a, p);
    else save_matrix(o.output, a, p);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Complex block Jacobi eigensolvers"};
    app.require_subcommand(1);
    Options o;

    auto* sh = app.add_subcommand("solve-hermitian", "block Jacobi for a Hermitian matrix");
    add_common(sh, o);
    add_input(sh, o);

    auto* sn = app.add_subcommand("solve-normal", "block Jacobi for a normal matrix");
    add_common(sn, o);
    add_input(sn, o);
    sn->add_option("--driver", o.driver, "hermitian or skew");
    sn->add_option("--gap", o.gap, "minimum real-part gap of the generated spectrum");

    auto* sj = app.add_subcommand("solve-jjacobi", "block J-Jacobi for a positive definite pencil (A, J)");
    add_common(sj, o);
    add_input(sj, o);
    sj->add_option("--nu", o.nu, "size of the positive part of J (default n/2)");

    auto* bs = app.add_subcommand("bench-strategies", "off-norm per cycle for several pivot strategies");
    add_common(bs, o);
    auto* bb = app.add_subcommand("bench-blocksizes", "off-norm per cycle for several block sizes");
    add_common(bb, o);
    auto* ba = app.add_subcommand("bench-accuracy", "eigenvalue accuracy on A = DMD");
    add_common(ba, o);
    ba->add_option("--cond-exp", o.cond_exp, "exponent of the diagonal scaling")->check(CLI::NonNegativeNumber);

    auto* va = app.add_subcommand("verify-annihilators", "annihilator structure and operator contraction checks");
    add_common(va, o);
    va->add_option("--cases", o.cases, "randomized annihilator cases");
    va->add_option("--trials", o.trials, "trials per empirical mu estimate")->check(CLI::PositiveNumber);

    auto* gm = app.add_subcommand("gen-matrix", "write a generated test matrix");
    add_common(gm, o);
    gm->add_option("--kind", o.kind, "hermitian, ill, normal or spd");
    gm->add_option("--cond-exp", o.cond_exp, "exponent of the diagonal scaling (kind ill)");
    gm->add_option("--gap", o.gap, "minimum real-part gap (kind normal)");
    gm->add_option("-o,--output", o.output, "output file (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sh) return solve_hermitian_cmd(o);
        if (*sn) return solve_normal_cmd(o);
        if (*sj) return solve_j_cmd(o);
        if (*bs) return bench_strategies_cmd(o);
        if (*bb) return bench_blocksizes_cmd(o);
        if (*ba) return bench_accuracy_cmd(o);
        if (*va) return verify_cmd(o);
        if (*gm) return gen_matrix_cmd(o);
    } catch (const CoreNonConvergence& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
