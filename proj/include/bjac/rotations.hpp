#pragma once

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "bjac/errors.hpp"
#include "bjac/matcore.hpp"
#include "bjac/pivot.hpp"

namespace bjac {

/// R = [[c, -e^{i alpha} s], [e^{-i alpha} s, c]] acting on indices (i, j).
struct ComplexRotation {
    std::size_t i = 0;
    std::size_t j = 1;
    double c = 1.0;
    double s = 0.0;
    double alpha = 0.0;
    double t = 0.0;  // tan(phi)

    cmat matrix() const {
        const cplx e = std::polar(1.0, alpha);
        cmat r(2, 2);
        r(0, 0) = c;
        r(0, 1) = -e * s;
        r(1, 0) = std::conj(e) * s;
        r(1, 1) = c;
        return r;
    }
    double phi() const { return std::atan(t); }
};

/// T = diag(e^{i alpha}, 1) * [[ch, sh], [sh, ch]] acting on indices (i, j).
struct HyperbolicRotation {
    std::size_t i = 0;
    std::size_t j = 1;
    double ch = 1.0;
    double sh = 0.0;
    double alpha = 0.0;
    double t = 0.0;  // tanh(theta)

    cmat matrix() const {
        const cplx e = std::polar(1.0, alpha);
        cmat r(2, 2);
        r(0, 0) = e * ch;
        r(0, 1) = e * sh;
        r(1, 0) = sh;
        r(1, 1) = ch;
        return r;
    }
};

namespace detail {

inline double safe_arg(cplx z) { return z == cplx{} ? 0.0 : std::arg(z); }

} // namespace detail

inline ComplexRotation trig_rotation(double a_ii, double a_jj, cplx a_ij) {
    ComplexRotation rot;
    const double b = std::abs(a_ij);
    if (b == 0.0) return rot;
    rot.alpha = detail::safe_arg(a_ij);
    const double zeta = (a_ii - a_jj) / (2.0 * b);
    double t;
    if (std::isinf(zeta))
        t = 1.0 / (2.0 * zeta);
    else
        t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::hypot(1.0, zeta));
    rot.t = t;
    rot.c = 1.0 / std::sqrt(1.0 + t * t);
    rot.s = t * rot.c;
    return rot;
}

inline HyperbolicRotation hyp_rotation(double a_ii, double a_jj, cplx a_ij) {
    HyperbolicRotation rot;
    const double b = std::abs(a_ij);
    if (b == 0.0) return rot;
    const double sum = a_ii + a_jj;
    if (!(2.0 * b < sum))
        throw DefinitenessViolation("hyperbolic pivot with 2|a_ij| >= a_ii + a_jj");
    rot.alpha = detail::safe_arg(a_ij);
    const double tau = -2.0 * b / sum;
    const double t = tau / (1.0 + std::sqrt((1.0 - tau) * (1.0 + tau)));
    rot.t = t;
    rot.ch = 1.0 / std::sqrt((1.0 - t) * (1.0 + t));
    rot.sh = t * rot.ch;
    return rot;
}

namespace detail {

/// A <- W^* A W on rows/columns (i, j) of Hermitian A, with W the 2x2 matrix; the pivot entries
/// are then set to the exact rotated values passed by the caller.
inline void rotate_hermitian(cmat& a, std::size_t i, std::size_t j, const cmat& w, double new_ii, double new_jj) {
    const std::size_t n = a.rows();
    const cplx w00 = w(0, 0), w01 = w(0, 1), w10 = w(1, 0), w11 = w(1, 1);
    auto ci = a.col(i);
    auto cj = a.col(j);
    for (std::size_t k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        const cplx x = ci[k] * w00 + cj[k] * w10;
        const cplx y = ci[k] * w01 + cj[k] * w11;
        ci[k] = x;
        cj[k] = y;
        a(i, k) = std::conj(x);
        a(j, k) = std::conj(y);
    }
    a(i, i) = new_ii;
    a(j, j) = new_jj;
    a(i, j) = 0.0;
    a(j, i) = 0.0;
}

inline void rotate_columns(cmat& u, std::size_t i, std::size_t j, const cmat& w) {
    const cplx w00 = w(0, 0), w01 = w(0, 1), w10 = w(1, 0), w11 = w(1, 1);
    auto ci = u.col(i);
    auto cj = u.col(j);
    for (std::size_t k = 0; k < u.rows(); ++k) {
        const cplx x = ci[k] * w00 + cj[k] * w10;
        const cplx y = ci[k] * w01 + cj[k] * w11;
        ci[k] = x;
        cj[k] = y;
    }
}

inline double off2(const cmat& a) {
    double s = 0.0;
    for (std::size_t c = 0; c < a.cols(); ++c)
        for (std::size_t r = 0; r < a.rows(); ++r)
            if (r != c) s += std::norm(a(r, c));
    return s;
}

/// off(A) <= tol * ||A||_F and every |a_rs| <= tol * sqrt(|a_rr a_ss|).
inline bool core_converged(const cmat& a, double tol, double norm_f) {
    const std::size_t n = a.rows();
    double off = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
        const double acc = std::abs(a(c, c).real());
        for (std::size_t r = 0; r < c; ++r) {
            const double x = std::abs(a(r, c));
            if (x == 0.0) continue;
            const double scale = std::max(std::sqrt(acc * std::abs(a(r, r).real())), DBL_MIN);
            if (x > tol * scale) return false;
            off += 2.0 * x * x;
        }
    }
    return std::sqrt(off) <= tol * norm_f;
}

} // namespace detail

struct CoreOptions {
    double tol = 1e-15;
    std::size_t max_sweeps = 30;
};

/// Called after each rotation with the updated matrix, the pivot indices and |a_ij| before the rotation.
using RotationObserver = std::function<void(const cmat&, std::size_t, std::size_t, double)>;

struct CoreResult {
    std::vector<double> lambda;
    cmat transform;
    std::vector<double> sweep_off;
    std::size_t sweeps = 0;
    std::size_t rotations = 0;
    bool converged = false;
    cmat final_matrix;
};

namespace detail {

inline void check_core_input(const cmat& a) {
    if (!a.is_square() || a.rows() == 0) throw DimensionMismatch("core: matrix must be square and nonempty");
}

inline CoreResult finish_core(cmat a, cmat u, std::vector<double> offs, std::size_t sweeps, std::size_t rots,
                              bool converged) {
    CoreResult res;
    res.lambda.resize(a.rows());
    for (std::size_t k = 0; k < a.rows(); ++k) res.lambda[k] = a(k, k).real();
    res.transform = std::move(u);
    res.sweep_off = std::move(offs);
    res.sweeps = sweeps;
    res.rotations = rots;
    res.converged = converged;
    res.final_matrix = std::move(a);
    return res;
}

} // namespace detail

/// Cyclic complex Jacobi on Hermitian A using the element ordering `o` (o.m must equal dim A).
inline CoreResult elementwise_jacobi(const cmat& a_in, const PivotOrdering& o, const CoreOptions& opt = {},
                                     const RotationObserver& observer = {}) {
    detail::check_core_input(a_in);
    const std::size_t n = a_in.rows();
    cmat a = hermitian_part(a_in);
    cmat u = cmat::identity(n);
    if (n == 1) return detail::finish_core(std::move(a), std::move(u), {}, 0, 0, true);
    if (o.m != n) throw InvalidOrdering("core ordering size differs from matrix dimension");
    const double nf = frobenius_norm(a);
    std::vector<double> offs;
    std::size_t sweeps = 0, rots = 0;
    bool conv = detail::core_converged(a, opt.tol, nf);
    while (!conv && sweeps < opt.max_sweeps) {
        for (const auto& p : o.pairs) {
            const cplx b = a(p.r, p.s);
            if (b == cplx{}) continue;
            const ComplexRotation rot = trig_rotation(a(p.r, p.r).real(), a(p.s, p.s).real(), b);
            const double ab = std::abs(b);
            const double nii = a(p.r, p.r).real() + rot.t * ab;
            const double njj = a(p.s, p.s).real() - rot.t * ab;
            const cmat w = rot.matrix();
            detail::rotate_hermitian(a, p.r, p.s, w, nii, njj);
            detail::rotate_columns(u, p.r, p.s, w);
            ++rots;
            if (observer) observer(a, p.r, p.s, ab);
        }
        ++sweeps;
        offs.push_back(std::sqrt(detail::off2(a)));
        conv = detail::core_converged(a, opt.tol, nf);
    }
    return detail::finish_core(std::move(a), std::move(u), std::move(offs), sweeps, rots, conv);
}

/// Classical complex Jacobi: each step pivots the largest-modulus off-diagonal entry.
/// One sweep is counted as n(n-1)/2 rotations.
inline CoreResult elementwise_jacobi_classical(const cmat& a_in, const CoreOptions& opt = {},
                                               const RotationObserver& observer = {}) {
    detail::check_core_input(a_in);
    const std::size_t n = a_in.rows();
    cmat a = hermitian_part(a_in);
    cmat u = cmat::identity(n);
    if (n == 1) return detail::finish_core(std::move(a), std::move(u), {}, 0, 0, true);
    const double nf = frobenius_norm(a);
    const std::size_t per_sweep = n * (n - 1) / 2;
    std::vector<double> offs;
    std::size_t sweeps = 0, rots = 0;
    bool conv = detail::core_converged(a, opt.tol, nf);
    while (!conv && sweeps < opt.max_sweeps) {
        for (std::size_t k = 0; k < per_sweep; ++k) {
            std::size_t bi = 0, bj = 1;
            double best = -1.0;
            for (std::size_t c = 1; c < n; ++c)
                for (std::size_t r = 0; r < c; ++r) {
                    const double x = std::norm(a(r, c));
                    if (x > best) best = x, bi = r, bj = c;
                }
            if (best <= 0.0) break;
            const cplx b = a(bi, bj);
            const ComplexRotation rot = trig_rotation(a(bi, bi).real(), a(bj, bj).real(), b);
            const double ab = std::abs(b);
            const double nii = a(bi, bi).real() + rot.t * ab;
            const double njj = a(bj, bj).real() - rot.t * ab;
            const cmat w = rot.matrix();
            detail::rotate_hermitian(a, bi, bj, w, nii, njj);
            detail::rotate_columns(u, bi, bj, w);
            ++rots;
            if (observer) observer(a, bi, bj, ab);
        }
        ++sweeps;
        offs.push_back(std::sqrt(detail::off2(a)));
        conv = detail::core_converged(a, opt.tol, nf);
    }
    return detail::finish_core(std::move(a), std::move(u), std::move(offs), sweeps, rots, conv);
}

/// Cyclic J-Jacobi on positive definite A with J = diag(I_nu, -I_{n-nu}): hyperbolic rotations
/// for pairs r < nu <= s, trigonometric rotations otherwise. The transform T satisfies T^* J T = J.
inline CoreResult elementwise_j_jacobi(const cmat& a_in, std::size_t nu, const PivotOrdering& o,
                                       const CoreOptions& opt = {}, const RotationObserver& observer = {}) {
    detail::check_core_input(a_in);
    const std::size_t n = a_in.rows();
    if (nu == 0 || nu >= n) throw ConfigError("J-Jacobi needs 1 <= nu < n");
    if (o.m != n) throw InvalidOrdering("core ordering size differs from matrix dimension");
    cmat a = hermitian_part(a_in);
    for (std::size_t k = 0; k < n; ++k)
        if (!(a(k, k).real() > 0.0)) throw DefinitenessViolation("J-Jacobi input has a nonpositive diagonal entry");
    cmat u = cmat::identity(n);
    std::vector<double> offs;
    std::size_t sweeps = 0, rots = 0;
    bool conv = detail::core_converged(a, opt.tol, frobenius_norm(a));
    while (!conv && sweeps < opt.max_sweeps) {
        for (const auto& p : o.pairs) {
            const cplx b = a(p.r, p.s);
            if (b == cplx{}) continue;
            const double aii = a(p.r, p.r).real(), ajj = a(p.s, p.s).real();
            const double ab = std::abs(b);
            cmat w;
            double nii, njj;
            if (p.r < nu && p.s >= nu) {
                const HyperbolicRotation rot = hyp_rotation(aii, ajj, b);
                w = rot.matrix();
                nii = aii + rot.t * ab;
                njj = ajj + rot.t * ab;
            } else {
                const ComplexRotation rot = trig_rotation(aii, ajj, b);
                w = rot.matrix();
                nii = aii + rot.t * ab;
                njj = ajj - rot.t * ab;
            }
            detail::rotate_hermitian(a, p.r, p.s, w, nii, njj);
            detail::rotate_columns(u, p.r, p.s, w);
            ++rots;
            if (observer) observer(a, p.r, p.s, ab);
        }
        ++sweeps;
        offs.push_back(std::sqrt(detail::off2(a)));
        conv = detail::core_converged(a, opt.tol, frobenius_norm(a));
    }
    return detail::finish_core(std::move(a), std::move(u), std::move(offs), sweeps, rots, conv);
}

} // namespace bjac
