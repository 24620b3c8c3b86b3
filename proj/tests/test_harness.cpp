#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "bjac/harness/benchmark.hpp"
#include "bjac/harness/generators.hpp"
#include "support.hpp"

using namespace bjac;

namespace {

double max_unitarity_defect(const cmat& u) {
    cmat g = u.adjoint() * u;
    for (std::size_t k = 0; k < u.rows(); ++k) g(k, k) -= 1.0;
    return max_abs(g);
}

TEST(Generators, RandomUnitaryIsUnitary) {
    for (std::size_t n : {1, 2, 5, 12}) EXPECT_LE(max_unitarity_defect(random_unitary(n, 3, 9)), 1e-14);
}

TEST(Generators, HermitianDeterministic) {
    const cmat a = gen_random_hermitian(7, 4);
    EXPECT_EQ(a, gen_random_hermitian(7, 4));
    EXPECT_NE(a, gen_random_hermitian(7, 5));
    EXPECT_EQ(a, a.adjoint());
}

TEST(Generators, WellConditionedSpd) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const auto ev = testsupport::eigen_hermitian_values(gen_well_conditioned_spd(30, seed));
        EXPECT_GT(ev.front(), 0.0);
        EXPECT_LE(ev.back() / ev.front(), 100.0 * (1 + 1e-12));
    }
}

TEST(Generators, DmdScalingExample) {
    const auto d = dmd_scaling(4, 6.0);
    const std::vector<double> expect{1.0, 1e-2, 1e-4, 1e-6};
    for (std::size_t k = 0; k < 4; ++k) EXPECT_NEAR(d[k], expect[k], 1e-15 * expect[k]);
    EXPECT_THROW(dmd_scaling(10, 200.0), ConfigError);
    EXPECT_THROW(dmd_scaling(10, -1.0), ConfigError);
}

TEST(Generators, IllConditionedSpectrumSpread) {
    const auto ev = testsupport::eigen_hermitian_values(gen_ill_conditioned(20, 2, 6.0));
    EXPECT_GT(ev.front(), 0.0);
    EXPECT_GT(ev.back() / ev.front(), 1e9);
}

TEST(Generators, NormalMatchesConstruction) {
    const auto t = gen_random_normal(15, 8, 0.5);
    EXPECT_LE(max_unitarity_defect(t.u), 1e-14);
    EXPECT_LE(normality_defect(t.a), 1e-12);
    auto re = t.lambda;
    std::sort(re.begin(), re.end(), [](cplx x, cplx y) { return x.real() < y.real(); });
    for (std::size_t k = 1; k < re.size(); ++k) EXPECT_GE(re[k].real() - re[k - 1].real(), 0.5);
    cmat d(15, 15);
    for (std::size_t k = 0; k < 15; ++k) d(k, k) = t.lambda[k];
    EXPECT_LE(max_abs(t.u.adjoint() * t.a * t.u - d), 1e-13);
}

TEST(Generators, NormalSingle) {
    const auto t = gen_random_normal(1, 1, 1.0);
    ASSERT_EQ(t.lambda.size(), 1u);
    EXPECT_NEAR(std::abs(t.a(0, 0) - t.lambda[0]), 0.0, 1e-15);
    EXPECT_THROW(gen_random_normal(3, 1, 0.0), ConfigError);
}

TEST(Generators, SpdPositive) {
    const auto ev = testsupport::eigen_hermitian_values(gen_spd(10, 3));
    EXPECT_GE(ev.front(), 1e-3 * 10 * (1 - 1e-12));
}

TEST(Bench, Labels) {
    EXPECT_EQ(bench::partition_label(BlockPartition::uniform(100, 2)), "2x50");
    EXPECT_EQ(bench::partition_label(BlockPartition({1, 2, 1})), "1-2-1");
    EXPECT_EQ(bench::case_id("strategies", 100, BlockPartition::uniform(100, 20), 1, 3),
              "strategies_n100_pi20x5_ms1_ss3");
    EXPECT_THROW(bench::uniform_partition(10, 3), ConfigError);
}

TEST(Bench, TraceCsvDeterministic) {
    bench::Common c;
    c.n = 20;
    auto csv = [&] {
        std::ostringstream os;
        bench::write_trace_header(os);
        for (const auto& tc : bench::strategies(c, 4, {1, 2})) bench::write_trace(os, tc);
        return os.str();
    };
    const std::string a = csv();
    EXPECT_EQ(a, csv());
    EXPECT_EQ(a.substr(0, a.find('\n')), "experiment,case_id,cycle,off_norm,off_rel");
}

TEST(Bench, AccuracySmall) {
    bench::Common c;
    c.n = 20;
    const auto rep = bench::accuracy(c, {2, 5}, 6.0, 1);
    ASSERT_EQ(rep.cases.size(), 2u);
    for (const auto& ac : rep.cases) {
        EXPECT_TRUE(ac.converged);
        EXPECT_EQ(ac.rows.size(), 20u);
        EXPECT_LE(ac.max_rel_err, 1e-11);
    }
}

TEST(Bench, VerifyAnnihilatorRows) {
    const auto rows = bench::verify_annihilators(5, 3, 1.0, 2);
    std::size_t mu_rows = 0;
    for (const auto& r : rows) {
        EXPECT_LE(r.max_structure_dev, 1e-13) << r.id;
        EXPECT_TRUE(r.null_two_block_ok) << r.id;
        if (r.id.rfind("mu_", 0) == 0) {
            ++mu_rows;
            EXPECT_LT(r.mu, 1.0) << r.id;
        }
    }
    EXPECT_EQ(mu_rows, 12u);
    EXPECT_EQ(rows.size(), 5u + 9u + 12u);
}

} // namespace
