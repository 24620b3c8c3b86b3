#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "bjac/errors.hpp"
#include "bjac/matcore.hpp"
#include "bjac/rotations.hpp"

namespace bjac {

inline double binomial(std::size_t n, std::size_t k) {
    double c = 1.0;
    for (std::size_t t = 1; t <= k; ++t) c = c * static_cast<double>(n - k + t) / static_cast<double>(t);
    return c;
}

/// max{ 3 / sqrt((n_j+1)(4^{n_i} + 6 n_j - 1)), C(n_i+n_j, n_i)^{-1/2} }
inline double gamma_ij(std::size_t ni, std::size_t nj) {
    if (ni == 0 || nj == 0) throw InvalidPartition("gamma_ij needs positive block sizes");
    const double a = 3.0 / std::sqrt((nj + 1.0) * (std::pow(4.0, static_cast<double>(ni)) + 6.0 * nj - 1.0));
    const double b = 1.0 / std::sqrt(binomial(ni + nj, ni));
    return std::max(a, b);
}

/// 3 sqrt(2) / (4^n + 26)
inline double gamma_tilde(std::size_t n) {
    if (n < 2) throw InvalidPartition("gamma_tilde needs n >= 2");
    return 3.0 * std::sqrt(2.0) / (std::pow(4.0, static_cast<double>(n)) + 26.0);
}

/// Column transpositions (r, r'), 0-based, applied left to right: P = I_{0 0'} I_{1 1'} ...
struct SwapSequence {
    std::vector<std::pair<std::size_t, std::size_t>> swaps;

    bool is_identity() const {
        return std::all_of(swaps.begin(), swaps.end(), [](const auto& s) { return s.first == s.second; });
    }
    friend bool operator==(const SwapSequence&, const SwapSequence&) = default;
};

/// Column order produced by applying the swaps to (0, 1, ..., q-1).
inline std::vector<std::size_t> permutation_of(const SwapSequence& p, std::size_t q) {
    std::vector<std::size_t> perm(q);
    std::iota(perm.begin(), perm.end(), 0);
    for (auto [a, b] : p.swaps) {
        if (a >= q || b >= q) throw DimensionMismatch("swap outside the matrix");
        std::swap(perm[a], perm[b]);
    }
    return perm;
}

inline void apply_swaps(cmat& u, const SwapSequence& p) {
    for (auto [a, b] : p.swaps) u.swap_cols(a, b);
}

struct PivotedQR {
    SwapSequence swaps;
    std::vector<double> r_diag;  // |r_kk|, k < rows
};

/// Householder QR with column pivoting of a rows x cols matrix (rows <= cols).
/// Each reflection is D * H with D a unitary diagonal that makes the pivot column real and H a real reflector.
inline PivotedQR qr_column_pivoting(const cmat& b_in) {
    const std::size_t rows = b_in.rows(), cols = b_in.cols();
    if (rows > cols) throw DimensionMismatch("qr_column_pivoting expects a wide matrix");
    cmat b = b_in;
    PivotedQR out;
    for (std::size_t k = 0; k < rows; ++k) {
        std::size_t best = k;
        double best_norm = -1.0;
        for (std::size_t c = k; c < cols; ++c) {
            double s = 0.0;
            for (std::size_t r = k; r < rows; ++r) s += std::norm(b(r, c));
            if (s > best_norm) best_norm = s, best = c;
        }
        if (!(best_norm > 0.0)) throw RankDeficiency("no remaining column with positive norm");
        out.swaps.swaps.push_back({k, best});
        b.swap_cols(k, best);

        // D^* x = |x| componentwise, then real reflector maps |x| to -||x|| e_1.
        const std::size_t len = rows - k;
        std::vector<cplx> phase(len);
        std::vector<double> y(len);
        for (std::size_t r = 0; r < len; ++r) {
            const cplx x = b(k + r, k);
            const double ax = std::abs(x);
            phase[r] = ax > 0.0 ? x / ax : cplx(1.0);
            y[r] = ax;
        }
        const double nx = std::sqrt(best_norm);
        std::vector<double> v = y;
        v[0] += nx;
        double vv = 0.0;
        for (double e : v) vv += e * e;
        for (std::size_t c = k; c < cols; ++c) {
            // column <- H D^* column
            std::vector<cplx> z(len);
            cplx dot = 0.0;
            for (std::size_t r = 0; r < len; ++r) {
                z[r] = std::conj(phase[r]) * b(k + r, c);
                dot += v[r] * z[r];
            }
            const cplx f = vv > 0.0 ? 2.0 * dot / vv : cplx{};
            for (std::size_t r = 0; r < len; ++r) b(k + r, c) = z[r] - f * v[r];
        }
        out.r_diag.push_back(std::abs(b(k, k)));
    }
    return out;
}

/// Keeps I_{r~ r~'} ... I_{n_i n_i'} where r~ is the first swap whose target leaves the first n_i columns;
/// identity if there is none.
inline SwapSequence attribute_R_filter(const SwapSequence& p, std::size_t ni) {
    for (std::size_t k = 0; k < p.swaps.size(); ++k)
        if (p.swaps[k].second >= ni) return {{p.swaps.begin() + static_cast<std::ptrdiff_t>(k), p.swaps.end()}};
    return {};
}

/// Singular values, descending, by one-sided Jacobi on the columns.
inline std::vector<double> singular_values(const cmat& a_in) {
    cmat a = a_in.rows() >= a_in.cols() ? a_in : a_in.adjoint();
    const std::size_t n = a.cols();
    for (std::size_t sweep = 0; sweep < 60; ++sweep) {
        bool rotated = false;
        for (std::size_t q = 1; q < n; ++q)
            for (std::size_t p = 0; p < q; ++p) {
                double alpha = 0.0, beta = 0.0;
                cplx g = 0.0;
                auto cp = a.col(p);
                auto cq = a.col(q);
                for (std::size_t r = 0; r < a.rows(); ++r) {
                    alpha += std::norm(cp[r]);
                    beta += std::norm(cq[r]);
                    g += std::conj(cp[r]) * cq[r];
                }
                if (std::abs(g) <= 1e-15 * std::sqrt(alpha * beta) || std::abs(g) == 0.0) continue;
                rotated = true;
                const cmat w = trig_rotation(alpha, beta, g).matrix();
                detail::rotate_columns(a, p, q, w);
            }
        if (!rotated) break;
    }
    std::vector<double> s(n);
    for (std::size_t c = 0; c < n; ++c) {
        double t = 0.0;
        for (const auto& x : a.col(c)) t += std::norm(x);
        s[c] = std::sqrt(t);
    }
    std::sort(s.rbegin(), s.rend());
    return s;
}

inline double sigma_min(const cmat& a) { return singular_values(a).back(); }

/// Which rule produced the final permutation in enforce_ubc.
enum class UbcSource { none, attribute_r, pivoted_qr, max_volume };

struct UbcOutcome {
    ElementaryBlockTransform transform;
    SwapSequence applied;
    UbcSource source = UbcSource::none;
    double sigma_ii = 0.0;
    double bound = 0.0;
};

namespace detail {

inline double sigma_ii_after(const cmat& u, std::size_t ni, const SwapSequence& p) {
    cmat v = u;
    apply_swaps(v, p);
    return sigma_min(v.block(0, 0, ni, ni));
}

/// Swaps moving the column subset with the largest sigma_min(U_ii) to the front. Cauchy-Binet gives
/// max |det|^2 >= 1 / C(q, n_i), hence the best sigma_min >= C(q, n_i)^{-1/2}.
inline SwapSequence max_volume_swaps(const cmat& u, std::size_t ni) {
    const std::size_t q = u.cols();
    std::vector<char> pick(q, 0);
    std::fill(pick.begin(), pick.begin() + static_cast<std::ptrdiff_t>(ni), 1);
    double best = -1.0;
    std::vector<std::size_t> best_cols;
    do {
        std::vector<std::size_t> cols;
        for (std::size_t c = 0; c < q; ++c)
            if (pick[c]) cols.push_back(c);
        cmat sub(ni, ni);
        for (std::size_t c = 0; c < ni; ++c)
            for (std::size_t r = 0; r < ni; ++r) sub(r, c) = u(r, cols[c]);
        const double s = sigma_min(sub);
        if (s > best) best = s, best_cols = cols;
    } while (std::prev_permutation(pick.begin(), pick.end()));
    SwapSequence p;
    std::vector<std::size_t> perm(q);
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t k = 0; k < ni; ++k) {
        const std::size_t pos = static_cast<std::size_t>(std::find(perm.begin(), perm.end(), best_cols[k]) - perm.begin());
        p.swaps.push_back({k, pos});
        std::swap(perm[k], perm[pos]);
    }
    return p;
}

} // namespace detail

/// Right-multiplies the pivot submatrix by the permutation from column-pivoted QR of its top block row
/// (filtered by attribute R when requested) so that sigma_min(U_ii) >= rho * gamma_ij.
/// When a candidate misses the bound the next rule is tried: attribute R, full pivoted QR, maximal volume.
inline UbcOutcome enforce_ubc_detailed(const ElementaryBlockTransform& t, const BlockPartition& p, double rho,
                                       bool use_attr_R) {
    check_transform(t, p);
    if (!(rho > 0.0 && rho <= 1.0)) throw ConfigError("rho must lie in (0, 1]");
    const std::size_t ni = p.size(t.i), nj = p.size(t.j);
    UbcOutcome out;
    out.bound = rho * gamma_ij(ni, nj);
    const cmat& u = t.pivot;
    const PivotedQR qr = qr_column_pivoting(u.block(0, 0, ni, ni + nj));

    std::vector<std::pair<SwapSequence, UbcSource>> candidates;
    if (use_attr_R) candidates.push_back({attribute_R_filter(qr.swaps, ni), UbcSource::attribute_r});
    candidates.push_back({qr.swaps, UbcSource::pivoted_qr});
    for (std::size_t k = 0; k <= candidates.size(); ++k) {
        SwapSequence sw;
        UbcSource src;
        if (k < candidates.size()) {
            sw = candidates[k].first;
            src = candidates[k].second;
        } else {
            sw = detail::max_volume_swaps(u, ni);
            src = UbcSource::max_volume;
        }
        const double s = detail::sigma_ii_after(u, ni, sw);
        // a few ulps of slack: a 2 x 2 rotation with c = s = 1/sqrt(2) sits exactly on gamma_11
        if (s >= out.bound * (1.0 - 8.0 * std::numeric_limits<double>::epsilon())) {
            out.transform = t;
            apply_swaps(out.transform.pivot, sw);
            out.applied = std::move(sw);
            out.source = src;
            out.sigma_ii = s;
            return out;
        }
    }
    throw InternalError("UBC bound not reached: input is not unitary");
}

inline ElementaryBlockTransform enforce_ubc(const ElementaryBlockTransform& t, const BlockPartition& p, double rho,
                                            bool use_attr_R) {
    return enforce_ubc_detailed(t, p, rho, use_attr_R).transform;
}

} // namespace bjac
