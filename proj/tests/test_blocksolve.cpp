#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "bjac/blocksolve.hpp"
#include "bjac/harness/oracle.hpp"
#include "support.hpp"

using namespace bjac;
using testsupport::random_hermitian;
using testsupport::random_unitary;

namespace {

std::vector<double> sorted_real(const std::vector<cplx>& l) {
    std::vector<double> out;
    for (auto z : l) out.push_back(z.real());
    std::sort(out.begin(), out.end());
    return out;
}

double max_rel_error(const std::vector<double>& got, const std::vector<double>& ref) {
    double scale = 0;
    for (double x : ref) scale = std::max(scale, std::abs(x));
    double e = 0;
    for (std::size_t k = 0; k < ref.size(); ++k) e = std::max(e, std::abs(got[k] - ref[k]));
    return e / scale;
}

cmat diag_of(const std::vector<cplx>& l) { return cmat::diagonal(std::span<const cplx>(l)); }

} // namespace

TEST(Config, Validation) {
    SolverConfig c;
    EXPECT_NO_THROW(validate(c));
    c.rho = 0;
    EXPECT_THROW(validate(c), ConfigError);
    c = {};
    c.tol = 0;
    EXPECT_THROW(validate(c), ConfigError);
    c = {};
    c.max_cycles = 0;
    EXPECT_THROW(validate(c), ConfigError);
    c = {};
    c.ordering = column_cyclic(3);
    EXPECT_THROW(solve_hermitian(PartitionedHermitian(random_hermitian(4, 1), make_partition({2, 2})), c),
                 ConfigError);
}

TEST(Preprocess, DiagonalBlocksUnchanged) {
    cmat a = random_hermitian(4, 3);
    a(0, 1) = a(1, 0) = 0;
    a(2, 3) = a(3, 2) = 0;
    auto [a0, u0] = preprocess_diagonal_blocks(PartitionedHermitian(a, make_partition({2, 2})));
    EXPECT_EQ(u0, cmat::identity(4));
    EXPECT_EQ(a0.matrix(), hermitian_part(a));
}

TEST(Preprocess, SwapBlock) {
    cmat a(4, 4);
    a(0, 1) = a(1, 0) = 1;
    a(2, 2) = 3, a(3, 3) = 4;
    a(0, 2) = 0.5, a(2, 0) = 0.5;
    auto p = make_partition({2, 2});
    auto [a0, u0] = preprocess_diagonal_blocks(PartitionedHermitian(a, p));
    std::vector<double> d{a0.matrix()(0, 0).real(), a0.matrix()(1, 1).real()};
    std::sort(d.begin(), d.end());
    EXPECT_NEAR(d[0], -1, 1e-15);
    EXPECT_NEAR(d[1], 1, 1e-15);
    EXPECT_NEAR(diagonal_blocks_off2(a0.matrix(), p), 0, 1e-30);
}

TEST(Preprocess, OffDecreasesByDiagonalBlockOff) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto p = make_partition({3, 1, 4, 2});
        PartitionedHermitian a(random_hermitian(10, seed), p);
        auto [a0, u0] = preprocess_diagonal_blocks(a);
        const double want = std::pow(off_norm(a), 2) - diagonal_blocks_off2(a.matrix(), p);
        EXPECT_NEAR(std::pow(off_norm(a0), 2), want, 1e-13 * std::pow(frobenius_norm(a.matrix()), 2));
        EXPECT_LE(unitarity_defect(u0), 1e-13);
        EXPECT_LE(max_abs_diff(u0.adjoint() * a.matrix() * u0, a0.matrix()), 1e-13);
        for (std::size_t c = 0; c < 10; ++c)
            for (std::size_t r = 0; r < 10; ++r)
                if (p.block_of(r) != p.block_of(c)) {
                    EXPECT_EQ(u0(r, c), cplx{});
                }
    }
}

TEST(BlockStep, DiagonalPivotIsPermutation) {
    cmat a = random_hermitian(4, 5);
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 4; ++c)
            if (r != c && r < 2 && c < 2) a(r, c) = 0;
    a(0, 2) = a(2, 0) = a(0, 3) = a(3, 0) = a(1, 2) = a(2, 1) = a(1, 3) = a(3, 1) = 0;
    a(2, 3) = a(3, 2) = 0;
    a = hermitian_part(a);
    const cmat before = a;
    auto p = make_partition({1, 1, 1, 1});
    auto out = block_step(a, p, 0, 2);
    for (const auto& x : out.transform.pivot.data()) EXPECT_TRUE(std::abs(x) == 0 || std::abs(x) == 1);
    std::vector<double> d0, d1;
    for (std::size_t k = 0; k < 4; ++k) d0.push_back(before(k, k).real()), d1.push_back(a(k, k).real());
    std::sort(d0.begin(), d0.end());
    std::sort(d1.begin(), d1.end());
    EXPECT_EQ(d0, d1);
}

TEST(BlockStep, UnitBlocksMatchRotation) {
    cmat a = random_hermitian(3, 8);
    cmat b = a;
    auto out = block_step(a, make_partition({1, 1, 1}), 0, 2);
    auto rot = trig_rotation(b(0, 0).real(), b(2, 2).real(), b(0, 2));
    std::vector<double> want{b(0, 0).real() + rot.t * std::abs(b(0, 2)), b(2, 2).real() - rot.t * std::abs(b(0, 2))};
    std::sort(want.rbegin(), want.rend());
    EXPECT_NEAR(std::max(a(0, 0).real(), a(2, 2).real()), want[0], 1e-14);
    EXPECT_NEAR(std::min(a(0, 0).real(), a(2, 2).real()), want[1], 1e-14);
    EXPECT_EQ(a(0, 2), cplx{});
    EXPECT_NEAR(std::abs(a(1, 0)) * std::abs(a(1, 0)) + std::norm(a(1, 2)), std::norm(b(1, 0)) + std::norm(b(1, 2)),
                1e-14);
}

TEST(BlockStep, TwoByTwoBlocksRandom) {
    auto p = make_partition({2, 2, 2});
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        cmat a = random_hermitian(6, seed);
        const cmat before = a;
        const double nrm = frobenius_norm(a);
        auto out = block_step(a, p, 0, 2);
        // exact oracle: a = W^* before W on the pivot
        const cmat full = embed_transform(out.transform, p);
        cmat ref = full.adjoint() * before * full;
        EXPECT_LE(std::sqrt(std::norm(ref(0, 4)) + std::norm(ref(0, 5)) + std::norm(ref(1, 4)) + std::norm(ref(1, 5))),
                  1e-13 * nrm);
        EXPECT_LE(std::abs(ref(0, 1)), 1e-13 * nrm);
        EXPECT_GE(sigma_min(out.transform.block_ii(p)), gamma_ij(2, 2));
        for (std::size_t c = 0; c < 6; ++c)
            for (std::size_t r = 0; r < 6; ++r) {
                const bool pivot = p.block_of(r) != 1 && p.block_of(c) != 1;
                if (!pivot) {
                    EXPECT_NEAR(std::abs(a(r, c) - ref(r, c)), 0, 1e-13 * nrm);
                }
            }
        const double want = std::pow(off_norm(before), 2) - out.annihilated;
        EXPECT_NEAR(std::pow(off_norm(a), 2), want, 1e-12 * nrm * nrm);
        EXPECT_GE(a(0, 0).real(), a(1, 1).real());
        EXPECT_GE(a(4, 4).real(), a(5, 5).real());
    }
}

TEST(BlockStep, CoreFailureCarriesSnapshot) {
    SolverConfig c;
    c.core_options.max_sweeps = 1;
    cmat a = random_hermitian(8, 2);
    const cmat before = a;
    try {
        block_step(a, make_partition({4, 4}), 0, 1, c);
        FAIL() << "expected CoreNonConvergence";
    } catch (const CoreNonConvergence& e) {
        EXPECT_EQ(e.snapshot, before);
    }
}

TEST(SolveHermitian, DiagonalNeedsNoCycles) {
    std::vector<cplx> d{3, 1, 2, 5};
    auto r = solve_hermitian(PartitionedHermitian(diag_of(d), make_partition({2, 2})));
    EXPECT_TRUE(r.trace.converged);
    EXPECT_EQ(r.trace.cycles_used, 0u);
    EXPECT_EQ(r.trace.per_cycle_off.size(), 1u);
}

TEST(SolveHermitian, TwoByTwo) {
    cmat a(2, 2);
    a(0, 0) = a(1, 1) = 1;
    a(0, 1) = cplx(0, 1), a(1, 0) = cplx(0, -1);
    auto r = solve_hermitian(PartitionedHermitian(a, make_partition({1, 1})));
    auto l = sorted_real(r.lambda);
    EXPECT_NEAR(l[0], 0, 1e-15);
    EXPECT_NEAR(l[1], 2, 1e-15);
    EXPECT_EQ(r.trace.cycles_used, 1u);
}

struct HermCase {
    std::vector<std::size_t> sizes;
    CoreKind core;
    bool attr;
    bool preprocess;
    const char* name;
};

void PrintTo(const HermCase& c, std::ostream* os) { *os << c.name; }

class SolveHermitianRandom : public ::testing::TestWithParam<HermCase> {};

TEST_P(SolveHermitianRandom, MatchesOracleAndTraceInvariants) {
    const auto& c = GetParam();
    auto p = make_partition(c.sizes);
    const std::size_t n = p.n();
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        const cmat a = random_hermitian(n, 1000 + seed);
        SolverConfig cfg;
        cfg.core = c.core;
        cfg.use_attr_R = c.attr;
        cfg.preprocess = c.preprocess;
        cfg.seed = seed;
        cfg.ordering = p.m() >= 2 ? random_generalized_serial(p.m(), seed, 4) : PivotOrdering{};
        auto r = solve_hermitian(PartitionedHermitian(a, p), cfg);
        ASSERT_TRUE(r.trace.converged);
        const double nrm = frobenius_norm(a);
        EXPECT_LE(off_norm(r.final_matrix), cfg.tol * nrm);
        EXPECT_LE(max_rel_error(sorted_real(r.lambda), testsupport::eigen_hermitian_values(a)), 1e-12);
        EXPECT_LE(unitarity_defect(r.transform), 1e-11);
        EXPECT_LE(max_abs_diff(r.transform.adjoint() * a * r.transform, diag_of(r.lambda)), 1e-12 * nrm);
        // step recursion and monotonicity
        for (const auto& s : r.trace.steps) {
            EXPECT_NEAR(s.off2_after, s.off2_before - s.annihilated, 1e-12 * nrm * nrm);
            EXPECT_LE(s.off2_after, s.off2_before + 1e-28 * nrm * nrm);
        }
        EXPECT_EQ(r.trace.per_step_off.size(), r.trace.cycles_used * pair_count(p.m()));
        EXPECT_EQ(r.trace.per_cycle_off.size(), r.trace.cycles_used + 1);
    }
}

INSTANTIATE_TEST_SUITE_P(Partitions, SolveHermitianRandom,
                         ::testing::Values(HermCase{{1, 1, 1, 1, 1, 1}, CoreKind::random_generalized_serial, true, true, "Units"},
                                           HermCase{{2, 2, 2, 2, 2}, CoreKind::random_generalized_serial, true, true, "Pairs"},
                                           HermCase{{3, 1, 4, 2, 5}, CoreKind::random_generalized_serial, false, true, "MixedNoAttr"},
                                           HermCase{{3, 1, 4, 2, 5}, CoreKind::classical, true, false, "MixedClassical"},
                                           HermCase{{6, 6, 6}, CoreKind::random_generalized_serial, true, false, "LargeBlocks"},
                                           HermCase{{7}, CoreKind::random_generalized_serial, true, true, "SingleBlock"}),
                         [](const auto& info) { return std::string(info.param.name); });

TEST(SolveHermitian, MatchesDoubleDoubleOracle) {
    auto p = make_partition({4, 4, 4, 4, 4});
    const cmat a = random_hermitian(20, 77);
    auto r = solve_hermitian(PartitionedHermitian(a, p));
    auto ref = oracle_eigen(a);
    EXPECT_LE(max_rel_error(sorted_real(r.lambda), ref.values), 1e-13);
}

TEST(SolveHermitian, PerCycleIsStepSubsequence) {
    auto p = make_partition({2, 3, 2, 3});
    auto r = solve_hermitian(PartitionedHermitian(random_hermitian(10, 4), p));
    const std::size_t M = pair_count(p.m());
    for (std::size_t c = 1; c <= r.trace.cycles_used; ++c)
        EXPECT_NEAR(r.trace.per_cycle_off[c], r.trace.per_step_off[c * M - 1], 1e-12 * r.trace.norm);
}

TEST(SolveHermitian, ShiftedStrategiesContract) {
    auto p = make_partition({2, 2, 2, 2, 2});
    for (std::uint64_t seed = 0; seed < 8; ++seed) {
        SolverConfig cfg;
        cfg.ordering = random_generalized_serial(5, seed, 6);
        cfg.seed = seed;
        auto r = solve_hermitian(PartitionedHermitian(random_hermitian(10, seed), p), cfg);
        const std::size_t span = cfg.ordering.shift_count + 1;
        const auto& pc = r.trace.per_cycle_off;
        for (std::size_t k = 0; k + span < pc.size(); ++k)
            if (pc[k] > 1e-12 * r.trace.norm) {
                EXPECT_LT(pc[k + span], pc[k]);
            }
    }
}

TEST(SolveHermitian, DeterministicGivenSeed) {
    auto p = make_partition({3, 3, 3});
    PartitionedHermitian a(random_hermitian(9, 4), p);
    SolverConfig cfg;
    cfg.seed = 11;
    auto r1 = solve_hermitian(a, cfg);
    auto r2 = solve_hermitian(a, cfg);
    EXPECT_EQ(r1.trace.per_step_off, r2.trace.per_step_off);
    EXPECT_EQ(r1.transform, r2.transform);
}

TEST(SolveHermitian, ReportsNonConvergence) {
    SolverConfig cfg;
    cfg.max_cycles = 1;
    cfg.tol = 1e-300;
    auto r = solve_hermitian(PartitionedHermitian(random_hermitian(12, 4), make_partition({3, 3, 3, 3})), cfg);
    EXPECT_FALSE(r.trace.converged);
    EXPECT_EQ(r.trace.cycles_used, 1u);
}

TEST(SolveNormal, RejectsNonNormal) {
    cmat a(2, 2);
    a(0, 1) = 1;
    EXPECT_THROW(solve_normal(a, make_partition({1, 1})), NotNormal);
}

TEST(SolveNormal, DiagonalImmediate) {
    std::vector<cplx> d{{1, 2}, {-1, 0.5}, {3, -1}};
    auto r = solve_normal(diag_of(d), make_partition({1, 2}));
    EXPECT_TRUE(r.trace.converged);
    EXPECT_EQ(r.trace.cycles_used, 0u);
    for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(r.lambda[k], d[k]);
}

TEST(SolveNormal, SkewDriverTwoByTwo) {
    cmat a(2, 2);
    a(0, 0) = 1, a(0, 1) = 1, a(1, 0) = -1, a(1, 1) = 1;
    NormalOptions o;
    o.driver = NormalDriver::skew_part;
    auto [b, c] = normal_split(a);
    EXPECT_EQ(b, cmat::identity(2));
    EXPECT_EQ(c(0, 1), cplx(0, -1));
    EXPECT_EQ(c(1, 0), cplx(0, 1));
    auto r = solve_normal(a, make_partition({1, 1}), {}, o);
    auto l = r.lambda;
    std::sort(l.begin(), l.end(), [](cplx x, cplx y) { return x.imag() < y.imag(); });
    EXPECT_NEAR(std::abs(l[0] - cplx(1, -1)), 0, 1e-15);
    EXPECT_NEAR(std::abs(l[1] - cplx(1, 1)), 0, 1e-15);
    EXPECT_TRUE(r.trace.warnings.empty());
}

TEST(SolveNormal, FallbackWhenHermitianPartClustered) {
    cmat a(2, 2);
    a(0, 0) = 1, a(0, 1) = 1, a(1, 0) = -1, a(1, 1) = 1;
    auto r = solve_normal(a, make_partition({1, 1}));
    EXPECT_EQ(r.trace.warnings.size(), 1u);
    EXPECT_TRUE(r.trace.converged);
}

TEST(SolveNormal, ConstructedMatchesSpectrum) {
    const std::size_t n = 20;
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        auto g = make_engine(seed, 5);
        std::vector<cplx> d(n);
        for (std::size_t k = 0; k < n; ++k) d[k] = {0.5 * static_cast<double>(k) - 4.0, complex_gaussian(g).real()};
        std::shuffle(d.begin(), d.end(), g);
        const cmat u = random_unitary(n, seed + 40);
        const cmat a = u * diag_of(d) * u.adjoint();
        auto r = solve_normal(a, make_partition({4, 4, 4, 4, 4}));
        ASSERT_TRUE(r.trace.converged);
        auto got = r.lambda, want = d;
        const auto by_re = [](cplx x, cplx y) { return x.real() < y.real(); };
        std::sort(got.begin(), got.end(), by_re);
        std::sort(want.begin(), want.end(), by_re);
        for (std::size_t k = 0; k < n; ++k) EXPECT_NEAR(std::abs(got[k] - want[k]), 0, 1e-10);
        for (double c : r.trace.commutation_residual) EXPECT_LE(c, 1e-11);
        EXPECT_LE(unitarity_defect(r.transform), 1e-11);
        EXPECT_LE(max_abs_diff(r.transform.adjoint() * a * r.transform, r.final_matrix), 1e-11 * frobenius_norm(a));
        EXPECT_LT(r.trace.crs_diagnostic.back(), 1e-10 * r.trace.crs_diagnostic.front());
    }
}

TEST(SolveJ, PositiveDiagonal) {
    std::vector<cplx> d{2, 3, 1, 4};
    auto r = solve_j_hermitian(PartitionedHermitian(diag_of(d), make_partition({2, 2})), 2);
    EXPECT_EQ(r.transform, cmat::identity(4));
    EXPECT_EQ(pencil_eigenvalues(r, 2), (std::vector<double>{2, 3, -1, -4}));
}

TEST(SolveJ, TwoByTwo) {
    cmat a(2, 2);
    a(0, 0) = a(1, 1) = 2;
    a(0, 1) = a(1, 0) = 1;
    auto r = solve_j_hermitian(PartitionedHermitian(a, make_partition({1, 1})), 1);
    EXPECT_NEAR(r.lambda[0].real(), std::sqrt(3.0), 1e-14);
    EXPECT_NEAR(r.lambda[1].real(), std::sqrt(3.0), 1e-14);
    auto pe = pencil_eigenvalues(r, 1);
    EXPECT_NEAR(pe[0], std::sqrt(3.0), 1e-14);
    EXPECT_NEAR(pe[1], -std::sqrt(3.0), 1e-14);
}

TEST(SolveJ, GramMatchesPencilOracle) {
    const std::size_t n = 24, nu = 12;
    for (std::uint64_t seed = 0; seed < 2; ++seed) {
        const cmat g = testsupport::random_matrix(n, n, seed + 300);
        const cmat a = hermitian_part(g.adjoint() * g);
        auto r = solve_j_hermitian(PartitionedHermitian(a, BlockPartition::uniform(n, 3)), nu);
        ASSERT_TRUE(r.trace.converged);
        EXPECT_LE(j_unitarity_defect(r.transform, nu), 1e-11);
        for (double dft : r.trace.j_defect) EXPECT_LE(dft, 1e-11);
        for (double f : r.trace.frobenius) EXPECT_LE(f, r.trace.trace_bound * (1 + 1e-12));
        auto got = pencil_eigenvalues(r, nu);
        std::sort(got.begin(), got.end());
        auto ref = oracle_pencil(a, nu);
        for (std::size_t k = 0; k < n; ++k) EXPECT_LE(std::abs(got[k] - ref.values[k]), 1e-10 * std::abs(ref.values[k]));
    }
}

TEST(SolveJ, Rejections) {
    cmat a = cmat::identity(4);
    EXPECT_THROW(solve_j_hermitian(PartitionedHermitian(a, make_partition({1, 3})), 2), ConfigError);
    EXPECT_THROW(solve_j_hermitian(PartitionedHermitian(a, make_partition({2, 2})), 0), ConfigError);
    a(1, 1) = -1;
    EXPECT_THROW(solve_j_hermitian(PartitionedHermitian(a, make_partition({2, 2})), 2), DefinitenessViolation);
    cmat b(2, 2);
    b(0, 0) = b(1, 1) = 1;
    b(0, 1) = b(1, 0) = 2;
    EXPECT_THROW(solve_j_hermitian(PartitionedHermitian(b, make_partition({1, 1})), 1), DefinitenessViolation);
}

TEST(SolvePerturbed, ZeroDecayIsUnperturbed) {
    PartitionedHermitian a(random_hermitian(12, 6), make_partition({3, 3, 3, 3}));
    SolverConfig cfg;
    cfg.seed = 5;
    Perturbation e;
    e.decay = 0;
    auto r0 = solve_hermitian(a, cfg);
    auto r1 = solve_perturbed(a, cfg, e);
    EXPECT_EQ(r0.trace.per_step_off, r1.trace.per_step_off);
    EXPECT_EQ(r0.transform, r1.transform);
    EXPECT_THROW(solve_perturbed(a, cfg, Perturbation{1e-3, 1.0, 1, PerturbationMode::full}), ConfigError);
}

TEST(SolvePerturbed, DecayingPerturbationConverges) {
    for (auto mode : {PerturbationMode::full, PerturbationMode::off_diagonal_blocks, PerturbationMode::diagonal_blocks}) {
        PartitionedHermitian a(random_hermitian(20, 9), make_partition({4, 4, 4, 4, 4}));
        SolverConfig cfg;
        cfg.tol = 1e-8;
        cfg.max_cycles = 20;
        auto r = solve_perturbed(a, cfg, Perturbation{1e-2, 0.5, 3, mode});
        EXPECT_TRUE(r.trace.converged);
        EXPECT_LT(r.trace.per_cycle_off.back(), 1e-8 * r.trace.norm);
        EXPECT_GT(r.trace.steps.front().perturbation, 0.0);
    }
}

TEST(SolvePerturbed, DiagonalBlockModeKeepsBlockOffMonotone) {
    // E supported on diagonal blocks leaves every off-diagonal block untouched.
    auto p = make_partition({3, 3, 3});
    PartitionedHermitian a(random_hermitian(9, 2), p);
    SolverConfig cfg;
    cfg.tol = 1e-10;
    std::vector<double> block_off;
    auto r = solve_perturbed(a, cfg, Perturbation{1e-2, 0.5, 3, PerturbationMode::diagonal_blocks},
                             [&](const StepRecord&, const cmat& m) { block_off.push_back(block_off_norm(m, p)); });
    ASSERT_EQ(block_off.size(), r.trace.steps.size());
    for (std::size_t k = 1; k < block_off.size(); ++k) EXPECT_LE(block_off[k], block_off[k - 1] + 1e-14 * r.trace.norm);
    EXPECT_TRUE(r.trace.converged);
}
