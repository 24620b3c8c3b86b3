#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "bjac/errors.hpp"
#include "bjac/matcore.hpp"
#include "bjac/pivot.hpp"
#include "bjac/random.hpp"
#include "bjac/rotations.hpp"

namespace bjac {

namespace streams {
inline constexpr std::uint64_t hermitian = 0x68657231;
inline constexpr std::uint64_t gram = 0x6772616d;
inline constexpr std::uint64_t normal = 0x6e6f726d;
inline constexpr std::uint64_t spd = 0x73706431;
} // namespace streams

inline cmat gaussian_matrix(std::size_t rows, std::size_t cols, engine& g) {
    cmat a(rows, cols);
    for (std::size_t c = 0; c < cols; ++c)
        for (std::size_t r = 0; r < rows; ++r) a(r, c) = complex_gaussian(g);
    return a;
}

/// Haar unitary: Gram-Schmidt (two passes) of a Gaussian matrix, so R has a positive diagonal.
inline cmat random_unitary(std::size_t n, engine& g) {
    cmat q = gaussian_matrix(n, n, g);
    for (std::size_t c = 0; c < n; ++c) {
        auto qc = q.col(c);
        for (int pass = 0; pass < 2; ++pass)
            for (std::size_t k = 0; k < c; ++k) {
                auto qk = q.col(k);
                cplx d = 0.0;
                for (std::size_t r = 0; r < n; ++r) d += std::conj(qk[r]) * qc[r];
                for (std::size_t r = 0; r < n; ++r) qc[r] -= d * qk[r];
            }
        double nrm = 0.0;
        for (const auto& x : qc) nrm += std::norm(x);
        nrm = std::sqrt(nrm);
        if (!(nrm > 0.0)) throw InternalError("random_unitary: dependent columns");
        for (auto& x : qc) x /= nrm;
    }
    return q;
}

inline cmat random_unitary(std::size_t n, std::uint64_t seed, std::uint64_t stream) {
    engine g = make_engine(seed, stream);
    return random_unitary(n, g);
}

/// (G + G^*)/2 with G standard complex Gaussian.
inline cmat gen_random_hermitian(std::size_t n, std::uint64_t seed) {
    if (n < 1) throw DimensionMismatch("gen_random_hermitian: n must be positive");
    engine g = make_engine(seed, streams::hermitian);
    return hermitian_part(gaussian_matrix(n, n, g));
}

/// G^*G / n + c I with c chosen so that the condition number is at most 100.
inline cmat gen_well_conditioned_spd(std::size_t n, std::uint64_t seed) {
    engine g = make_engine(seed, streams::gram);
    const cmat gm = gaussian_matrix(n, n, g);
    cmat m = gm.adjoint() * gm;
    m *= cplx(1.0 / static_cast<double>(n));
    m = hermitian_part(m);
    double lmin = m(0, 0).real(), lmax = lmin;
    if (n > 1) {
        const auto ev = elementwise_jacobi_classical(m).lambda;
        lmin = *std::min_element(ev.begin(), ev.end());
        lmax = *std::max_element(ev.begin(), ev.end());
    }
    const double c = std::max(0.0, (lmax - 100.0 * lmin) / 99.0) + 1e-3 * lmax;
    for (std::size_t k = 0; k < n; ++k) m(k, k) += c;
    return m;
}

inline std::vector<double> dmd_scaling(std::size_t n, double cond_exp) {
    if (!(cond_exp >= 0.0)) throw ConfigError("cond_exp must be nonnegative");
    std::vector<double> d(n, 1.0);
    for (std::size_t r = 1; r < n; ++r)
        d[r] = std::pow(10.0, -cond_exp * static_cast<double>(r) / static_cast<double>(n - 1));
    if (d.back() * d.back() < std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon())
        throw ConfigError("cond_exp too large: D*M*D underflows");
    return d;
}

/// A = D M D, D = diag(10^{-cond_exp (r-1)/(n-1)}), M well-conditioned positive definite.
inline cmat gen_ill_conditioned(std::size_t n, std::uint64_t seed, double cond_exp) {
    const auto d = dmd_scaling(n, cond_exp);
    cmat m = gen_well_conditioned_spd(n, seed);
    for (std::size_t c = 0; c < n; ++c)
        for (std::size_t r = 0; r < n; ++r) m(r, c) *= d[r] * d[c];
    return hermitian_part(m);
}

struct NormalTestMatrix {
    cmat a;
    std::vector<cplx> lambda;
    cmat u;
};

/// A = U diag(lambda) U^*; real parts of lambda are pairwise at least min_real_gap apart.
inline NormalTestMatrix gen_random_normal(std::size_t n, std::uint64_t seed, double min_real_gap) {
    if (!(min_real_gap > 0.0)) throw ConfigError("min_real_gap must be positive");
    engine g = make_engine(seed, streams::normal);
    std::uniform_real_distribution<double> jitter(0.0, 0.5 * min_real_gap);
    NormalTestMatrix out;
    out.lambda.resize(n);
    const double centre = 0.75 * min_real_gap * (static_cast<double>(n) - 1.0);
    for (std::size_t k = 0; k < n; ++k) {
        const double re = 1.5 * min_real_gap * static_cast<double>(k) + jitter(g) - centre;
        out.lambda[k] = {re, 2.0 * complex_gaussian(g).real()};
    }
    std::shuffle(out.lambda.begin(), out.lambda.end(), g);
    out.u = random_unitary(n, g);
    cmat du = out.u;
    for (std::size_t c = 0; c < n; ++c)
        for (std::size_t r = 0; r < n; ++r) du(r, c) *= out.lambda[c];
    out.a = du * out.u.adjoint();
    return out;
}

/// G^*G + ridge I, positive definite.
inline cmat gen_spd(std::size_t n, std::uint64_t seed, double ridge = 1e-3) {
    if (n < 1) throw DimensionMismatch("gen_spd: n must be positive");
    engine g = make_engine(seed, streams::spd);
    const cmat gm = gaussian_matrix(n, n, g);
    cmat a = hermitian_part(gm.adjoint() * gm);
    for (std::size_t k = 0; k < n; ++k) a(k, k) += ridge * static_cast<double>(n);
    return a;
}

} // namespace bjac
