#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numbers>

#include "bjac/ubc.hpp"
#include "support.hpp"

using namespace bjac;
using testsupport::random_unitary;

using Swaps = std::vector<std::pair<std::size_t, std::size_t>>;

TEST(Gamma, Values) {
    EXPECT_EQ(gamma_ij(1, 1), std::numbers::sqrt2 / 2);
    EXPECT_NEAR(gamma_ij(2, 2), 1 / std::sqrt(6.0), 1e-16);
    EXPECT_NEAR(3 / std::sqrt(81.0), 1.0 / 3.0, 1e-16);
    EXPECT_NEAR(gamma_ij(1, 3), 0.5, 1e-16);
    EXPECT_THROW(gamma_ij(0, 2), InvalidPartition);
}

TEST(Gamma, Tilde) {
    EXPECT_NEAR(gamma_tilde(2), 3 * std::sqrt(2.0) / 42, 1e-16);
    EXPECT_NEAR(gamma_tilde(2), 0.10102, 1e-5);
    EXPECT_NEAR(gamma_tilde(3), 0.04714, 1e-5);
    for (std::size_t a = 1; a <= 6; ++a)
        for (std::size_t b = 1; b <= 6; ++b) EXPECT_GT(gamma_ij(a, b), gamma_tilde(a + b));
}

TEST(PivotedQr, TrivialAndSwap) {
    cmat b(1, 2);
    b(0, 0) = 1;
    EXPECT_EQ(qr_column_pivoting(b).swaps.swaps, (Swaps{{0, 0}}));
    EXPECT_TRUE(qr_column_pivoting(b).swaps.is_identity());
    cmat c(1, 2);
    c(0, 1) = 1;
    EXPECT_EQ(qr_column_pivoting(c).swaps.swaps, (Swaps{{0, 1}}));
}

TEST(PivotedQr, TieGoesToLowestIndex) {
    cmat b(1, 3);
    b(0, 0) = 0.5, b(0, 1) = cplx(0, 1), b(0, 2) = 1;
    EXPECT_EQ(qr_column_pivoting(b).swaps.swaps, (Swaps{{0, 1}}));
}

TEST(PivotedQr, RejectsZero) { EXPECT_THROW(qr_column_pivoting(cmat(2, 3)), RankDeficiency); }

TEST(PivotedQr, MatchesReferenceAndNonIncreasing) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const std::size_t rows = 1 + seed % 4, cols = rows + 1 + seed % 3;
        cmat b = testsupport::random_matrix(rows, cols, seed);
        auto qr = qr_column_pivoting(b);
        for (std::size_t k = 1; k < qr.r_diag.size(); ++k) EXPECT_LE(qr.r_diag[k], qr.r_diag[k - 1] * (1 + 1e-12));
        // |r_kk| equal the pivoted Eigen QR values
        Eigen::ColPivHouseholderQR<testsupport::EMat> ref(testsupport::to_eigen(b));
        for (std::size_t k = 0; k < rows; ++k)
            EXPECT_NEAR(qr.r_diag[k], std::abs(ref.matrixQR()(k, k)), 1e-12 * qr.r_diag[0]);
        // R is the upper factor: B P = Q R, so product of |r_kk| equals the volume of the chosen columns
        cmat bp = b;
        apply_swaps(bp, qr.swaps);
        auto sv = singular_values(bp.block(0, 0, rows, rows));
        double vol = 1, prod = 1;
        for (double s : sv) vol *= s;
        for (double r : qr.r_diag) prod *= r;
        EXPECT_NEAR(vol, prod, 1e-12 * prod);
    }
}

TEST(AttributeR, Examples) {
    EXPECT_TRUE(attribute_R_filter({{{0, 1}, {1, 1}}}, 2).swaps.empty());
    EXPECT_EQ(attribute_R_filter({{{0, 2}, {1, 1}}}, 2).swaps, (Swaps{{0, 2}, {1, 1}}));
    EXPECT_EQ(attribute_R_filter({{{0, 1}, {1, 3}}}, 2).swaps, (Swaps{{1, 3}}));
}

TEST(AttributeR, Idempotent) {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        const std::size_t ni = 1 + seed % 4, nj = 1 + (seed / 4) % 4;
        auto qr = qr_column_pivoting(random_unitary(ni + nj, seed).block(0, 0, ni, ni + nj));
        auto f = attribute_R_filter(qr.swaps, ni);
        EXPECT_EQ(attribute_R_filter(f, ni), f);
    }
}

TEST(SingularValues, MatchEigen) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        cmat a = testsupport::random_matrix(4, 3 + seed % 3, seed);
        auto s = singular_values(a);
        Eigen::JacobiSVD<testsupport::EMat> svd(testsupport::to_eigen(a));
        for (std::size_t k = 0; k < s.size(); ++k) EXPECT_NEAR(s[k], svd.singularValues()(k), 1e-13);
    }
}

TEST(Enforce, IdentityUnchanged) {
    auto p = make_partition({2, 3});
    auto t = ElementaryBlockTransform::identity(p, 0, 1);
    EXPECT_EQ(enforce_ubc(t, p, 1.0, true).pivot, t.pivot);
    EXPECT_EQ(enforce_ubc(t, p, 1.0, false).pivot, t.pivot);
}

TEST(Enforce, SwapToIdentity) {
    auto p = make_partition({1, 1});
    cmat s(2, 2);
    s(0, 1) = 1, s(1, 0) = 1;
    auto out = enforce_ubc_detailed({0, 1, s, TransformKind::unitary}, p, 1.0, true);
    EXPECT_EQ(out.transform.pivot, cmat::identity(2));
    EXPECT_EQ(out.sigma_ii, 1.0);
}

TEST(Enforce, TwoByTwoBlocksThousandRandom) {
    auto p = make_partition({2, 2});
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        auto out = enforce_ubc_detailed({0, 1, random_unitary(4, seed), TransformKind::unitary}, p, 1.0, true);
        ASSERT_GE(sigma_min(out.transform.block_ii(p)), 1 / std::sqrt(6.0)) << seed;
    }
}

TEST(Enforce, InvariantsAllSmallBlocks) {
    std::map<UbcSource, int> sources;
    for (std::size_t ni = 1; ni <= 4; ++ni)
        for (std::size_t nj = 1; nj <= 4; ++nj) {
            auto p = make_partition({ni, nj});
            for (std::uint64_t seed = 0; seed < 100; ++seed) {
                for (bool attr : {false, true}) {
                    auto out = enforce_ubc_detailed({0, 1, random_unitary(ni + nj, seed * 31 + ni * 5 + nj),
                                                     TransformKind::unitary},
                                                    p, 1.0, attr);
                    ++sources[out.source];
                    const auto& u = out.transform;
                    EXPECT_LE(unitarity_defect(u.pivot), 1e-13);
                    const double sii = sigma_min(u.block_ii(p));
                    const double sjj = sigma_min(u.block_jj(p));
                    EXPECT_GE(sii, gamma_ij(ni, nj));
                    if (ni == nj) {
                        EXPECT_NEAR(sii, sjj, 1e-12);
                    } else {
                        EXPECT_GE(std::min(sii, sjj), gamma_ij(ni, nj) - 1e-12);
                    }
                }
            }
        }
    // Pivoted QR alone suffices for random unitary inputs in practice.
    EXPECT_GT(sources[UbcSource::pivoted_qr] + sources[UbcSource::attribute_r], 3000);
}

TEST(Enforce, RhoBelowOneAndValidation) {
    auto p = make_partition({3, 1});
    auto t = ElementaryBlockTransform{0, 1, random_unitary(4, 5), TransformKind::unitary};
    auto out = enforce_ubc_detailed(t, p, 0.5, true);
    EXPECT_GE(out.sigma_ii, 0.5 * gamma_ij(3, 1));
    EXPECT_THROW(enforce_ubc(t, p, 0.0, true), ConfigError);
    EXPECT_THROW(enforce_ubc(t, p, 1.5, true), ConfigError);
}
