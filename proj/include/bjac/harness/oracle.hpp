#pragma once

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstddef>
#include <vector>

#include "bjac/errors.hpp"
#include "bjac/harness/double_double.hpp"
#include "bjac/matrix.hpp"

namespace bjac {

struct OracleResult {
    std::vector<double> values;     // ascending
    std::vector<dd::real> precise;  // same order, double-double
    std::size_t sweeps = 0;
};

namespace detail {

class DdHermitian {
public:
    explicit DdHermitian(const cmat& a) : n_(a.rows()), a_(n_ * n_) {
        if (!a.is_square()) throw DimensionMismatch("oracle: matrix not square");
        for (std::size_t c = 0; c < n_; ++c)
            for (std::size_t r = 0; r < n_; ++r) {
                const cplx x = 0.5 * (a(r, c) + std::conj(a(c, r)));
                at(r, c) = r == c ? dd::complex(dd::real(x.real())) : dd::complex(x);
            }
    }

    std::size_t n() const { return n_; }
    dd::complex& at(std::size_t r, std::size_t c) { return a_[c * n_ + r]; }
    const dd::complex& at(std::size_t r, std::size_t c) const { return a_[c * n_ + r]; }
    dd::real diag(std::size_t k) const { return a_[k * n_ + k].re; }

    /// Scaled size |a_rs|^2 / |a_rr a_ss| used both for pivot choice and for the stopping test.
    double weight(std::size_t r, std::size_t s) const {
        const double x = std::norm(dd::to_std(at(r, s)));
        if (x == 0.0) return 0.0;
        const double d = std::abs(double(diag(r)) * double(diag(s)));
        return x / std::max(d, DBL_MIN);
    }

    /// A <- W^* A W on (i, j); pivot entries then set exactly.
    void rotate(std::size_t i, std::size_t j, const dd::complex w[4], dd::real nii, dd::real njj) {
        for (std::size_t k = 0; k < n_; ++k) {
            if (k == i || k == j) continue;
            const dd::complex ki = at(k, i), kj = at(k, j);
            const dd::complex x = ki * w[0] + kj * w[1];
            const dd::complex y = ki * w[2] + kj * w[3];
            at(k, i) = x;
            at(k, j) = y;
            at(i, k) = dd::conj(x);
            at(j, k) = dd::conj(y);
        }
        at(i, i) = nii;
        at(j, j) = njj;
        at(i, j) = dd::real(0.0);
        at(j, i) = dd::real(0.0);
    }

private:
    std::size_t n_;
    std::vector<dd::complex> a_;
};

/// Classical pivoting with cached row maxima of the scaled weights.
/// `hyperbolic(i, j)` selects the rotation family for pair (i < j).
template <class Hyper>
inline std::size_t dd_classical_jacobi(DdHermitian& a, Hyper hyperbolic, std::size_t max_sweeps) {
    const std::size_t n = a.n();
    if (n < 2) return 0;
    constexpr double tol2 = 1e-60;  // |a_rs| <= 1e-30 sqrt(|a_rr a_ss|)
    const std::size_t per_sweep = n * (n - 1) / 2;
    std::vector<double> row_max(n, 0.0);
    std::vector<std::size_t> row_arg(n, 0);
    auto rescan = [&](std::size_t r) {
        row_max[r] = 0.0;
        row_arg[r] = r == 0 ? 1 : 0;
        for (std::size_t s = 0; s < n; ++s) {
            if (s == r) continue;
            const double w = a.weight(r, s);
            if (w > row_max[r]) row_max[r] = w, row_arg[r] = s;
        }
    };
    for (std::size_t r = 0; r < n; ++r) rescan(r);

    const std::size_t limit = max_sweeps * per_sweep;
    for (std::size_t step = 0; step < limit; ++step) {
        const std::size_t pr = static_cast<std::size_t>(std::max_element(row_max.begin(), row_max.end()) - row_max.begin());
        if (row_max[pr] <= tol2) return (step + per_sweep - 1) / per_sweep;
        std::size_t i = pr, j = row_arg[pr];
        if (i > j) std::swap(i, j);

        const dd::complex b = a.at(i, j);
        const dd::real ab = dd::abs(b);
        const dd::complex e = {b.re / ab, b.im / ab};
        const dd::real aii = a.diag(i), ajj = a.diag(j);
        dd::complex w[4];
        dd::real nii, njj;
        if (hyperbolic(i, j)) {
            const dd::real sum = aii + ajj;
            if (!(dd::real(2.0) * ab < sum)) throw DefinitenessViolation("oracle: pencil is not positive definite");
            const dd::real tau = dd::real(-2.0) * ab / sum;
            const dd::real t = tau / (dd::real(1.0) + dd::sqrt((dd::real(1.0) - tau) * (dd::real(1.0) + tau)));
            const dd::real ch = dd::real(1.0) / dd::sqrt((dd::real(1.0) - t) * (dd::real(1.0) + t));
            const dd::real sh = t * ch;
            w[0] = e * ch, w[1] = dd::complex(sh), w[2] = e * sh, w[3] = dd::complex(ch);
            nii = aii + t * ab;
            njj = ajj + t * ab;
        } else {
            const dd::real zeta = (aii - ajj) / (dd::real(2.0) * ab);
            dd::real t;
            if (std::abs(zeta.hi) > 1e100)
                t = dd::real(1.0) / (dd::real(2.0) * zeta);
            else
                t = dd::real(zeta.hi >= 0.0 ? 1.0 : -1.0) / (dd::abs(zeta) + dd::sqrt(dd::real(1.0) + zeta * zeta));
            const dd::real c = dd::real(1.0) / dd::sqrt(dd::real(1.0) + t * t);
            const dd::real s = t * c;
            // W = [[c, -e s], [conj(e) s, c]]
            w[0] = dd::complex(c), w[1] = dd::conj(e) * s, w[2] = dd::complex(-(e.re * s), -(e.im * s)),
            w[3] = dd::complex(c);
            nii = aii + t * ab;
            njj = ajj - t * ab;
        }
        a.rotate(i, j, w, nii, njj);

        rescan(i);
        rescan(j);
        for (std::size_t k = 0; k < n; ++k) {
            if (k == i || k == j) continue;
            if (row_arg[k] == i || row_arg[k] == j) {
                rescan(k);
                continue;
            }
            for (std::size_t s : {i, j}) {
                const double wk = a.weight(k, s);
                if (wk > row_max[k]) row_max[k] = wk, row_arg[k] = s;
            }
        }
    }
    throw Error("oracle: classical Jacobi did not converge");
}

inline OracleResult collect(std::vector<dd::real> d, std::size_t sweeps) {
    std::sort(d.begin(), d.end(), [](dd::real x, dd::real y) { return x < y; });
    OracleResult res;
    res.precise = d;
    for (const auto& x : d) res.values.push_back(double(x));
    res.sweeps = sweeps;
    return res;
}

} // namespace detail

/// Eigenvalues of a Hermitian matrix by classical Jacobi in double-double arithmetic.
inline OracleResult oracle_eigen(const cmat& a, std::size_t max_sweeps = 100) {
    detail::DdHermitian h(a);
    const std::size_t sweeps = detail::dd_classical_jacobi(h, [](std::size_t, std::size_t) { return false; }, max_sweeps);
    std::vector<dd::real> d;
    for (std::size_t k = 0; k < h.n(); ++k) d.push_back(h.diag(k));
    return detail::collect(std::move(d), sweeps);
}

/// Eigenvalues of the pencil (A, J), J = diag(I_nu, -I_{n-nu}), A positive definite, by J-Jacobi in double-double.
inline OracleResult oracle_pencil(const cmat& a, std::size_t nu, std::size_t max_sweeps = 100) {
    detail::DdHermitian h(a);
    if (nu > h.n()) throw ConfigError("oracle: nu exceeds dimension");
    const std::size_t sweeps =
        detail::dd_classical_jacobi(h, [nu](std::size_t i, std::size_t j) { return i < nu && j >= nu; }, max_sweeps);
    std::vector<dd::real> d;
    for (std::size_t k = 0; k < h.n(); ++k) d.push_back(k < nu ? h.diag(k) : -h.diag(k));
    return detail::collect(std::move(d), sweeps);
}

} // namespace bjac
