#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "bjac/errors.hpp"
#include "bjac/harness/generators.hpp"
#include "bjac/matcore.hpp"
#include "bjac/pivot.hpp"
#include "bjac/rotations.hpp"
#include "bjac/ubc.hpp"

namespace bjac {

/// 0-based position of block (i, j), i != j, in the vec ordering: (j-1)j/2 + i above the diagonal, plus M below.
inline std::size_t tau(std::size_t i, std::size_t j, std::size_t m) {
    if (i == j) throw InvalidOrdering("tau is undefined on diagonal blocks");
    if (i >= m || j >= m) throw InvalidOrdering("block index out of range");
    if (i < j) return j * (j - 1) / 2 + i;
    return tau(j, i, m) + pair_count(m);
}

/// Layout of vec_pi: upper blocks column-stacked (c_2 ... c_m), then lower blocks row-stacked (r_2 ... r_m).
class VecIndexer {
public:
    explicit VecIndexer(BlockPartition p) : p_(std::move(p)), m_(p_.m()), start_(2 * pair_count(m_) + 1, 0) {
        pos_.resize(2 * pair_count(m_));
        for (std::size_t j = 1; j < m_; ++j)
            for (std::size_t i = 0; i < j; ++i) pos_[tau(i, j, m_)] = {i, j};
        for (std::size_t i = 1; i < m_; ++i)
            for (std::size_t j = 0; j < i; ++j) pos_[tau(i, j, m_)] = {i, j};
        // c_j holds blocks (1,j),...,(j-1,j) and r_i holds (i,1),...,(i,i-1): both follow tau order.
        for (std::size_t t = 0; t < pos_.size(); ++t)
            start_[t + 1] = start_[t] + p_.size(pos_[t].first) * p_.size(pos_[t].second);
    }

    const BlockPartition& partition() const noexcept { return p_; }
    std::size_t K() const noexcept { return start_.back() / 2; }
    std::size_t length() const noexcept { return start_.back(); }
    std::size_t block_start(std::size_t r, std::size_t s) const { return start_[tau(r, s, m_)]; }
    std::size_t block_start(std::size_t t) const { return start_.at(t); }
    std::pair<std::size_t, std::size_t> block_at(std::size_t t) const { return pos_.at(t); }
    static bool row_stored(std::size_t r, std::size_t s) { return r > s; }

    /// Position in the vector of element (a, b) of block (r, s).
    std::size_t index(std::size_t r, std::size_t s, std::size_t a, std::size_t b) const {
        const std::size_t base = block_start(r, s);
        return row_stored(r, s) ? base + a * p_.size(s) + b : base + b * p_.size(r) + a;
    }

private:
    BlockPartition p_;
    std::size_t m_;
    std::vector<std::pair<std::size_t, std::size_t>> pos_;
    std::vector<std::size_t> start_;
};

inline std::size_t vec_length(const BlockPartition& p) { return VecIndexer(p).length(); }

inline std::vector<cplx> vec_pi(const cmat& a, const VecIndexer& ix) {
    const BlockPartition& p = ix.partition();
    if (!a.is_square() || a.rows() != p.n()) throw DimensionMismatch("vec_pi: dimension mismatch");
    std::vector<cplx> v(ix.length());
    for (std::size_t s = 0; s < p.m(); ++s)
        for (std::size_t r = 0; r < p.m(); ++r) {
            if (r == s) continue;
            for (std::size_t b = 0; b < p.size(s); ++b)
                for (std::size_t a2 = 0; a2 < p.size(r); ++a2)
                    v[ix.index(r, s, a2, b)] = a(p.offset(r) + a2, p.offset(s) + b);
        }
    return v;
}

inline std::vector<cplx> vec_pi(const cmat& a, const BlockPartition& p) { return vec_pi(a, VecIndexer(p)); }

inline cmat vec0_inverse(const std::vector<cplx>& v, const VecIndexer& ix) {
    if (v.size() != ix.length()) throw DimensionMismatch("vec0_inverse: wrong vector length");
    const BlockPartition& p = ix.partition();
    cmat a(p.n(), p.n());
    for (std::size_t s = 0; s < p.m(); ++s)
        for (std::size_t r = 0; r < p.m(); ++r) {
            if (r == s) continue;
            for (std::size_t b = 0; b < p.size(s); ++b)
                for (std::size_t a2 = 0; a2 < p.size(r); ++a2)
                    a(p.offset(r) + a2, p.offset(s) + b) = v[ix.index(r, s, a2, b)];
        }
    return a;
}

inline cmat vec0_inverse(const std::vector<cplx>& v, const BlockPartition& p) { return vec0_inverse(v, VecIndexer(p)); }

/// Sets blocks (i, j) and (j, i) to zero.
inline void zero_pivot_blocks(cmat& a, const BlockPartition& p, std::size_t i, std::size_t j) {
    for (std::size_t c = 0; c < p.size(j); ++c)
        for (std::size_t r = 0; r < p.size(i); ++r) {
            a(p.offset(i) + r, p.offset(j) + c) = 0.0;
            a(p.offset(j) + c, p.offset(i) + r) = 0.0;
        }
}

/// R_ij(U) a = vec(N_ij(U^* vec0^{-1}(a) U)), matrix-free.
inline std::vector<cplx> apply_annihilator(const VecIndexer& ix, std::size_t i, std::size_t j, const cmat& u,
                                           const std::vector<cplx>& a) {
    const BlockPartition& p = ix.partition();
    const ElementaryBlockTransform t{i, j, u, TransformKind::unitary};
    check_transform(t, p);
    const cmat full = embed_transform(t, p);
    cmat x = full.adjoint() * vec0_inverse(a, ix) * full;
    zero_pivot_blocks(x, p, i, j);
    return vec_pi(x, ix);
}

/// Dense 2K x 2K annihilator assembled column by column from the definition.
inline cmat build_annihilator_oracle(const VecIndexer& ix, std::size_t i, std::size_t j, const cmat& u) {
    const std::size_t len = ix.length();
    cmat r(len, len);
    std::vector<cplx> e(len);
    for (std::size_t t = 0; t < len; ++t) {
        std::fill(e.begin(), e.end(), cplx{});
        e[t] = 1.0;
        const auto col = apply_annihilator(ix, i, j, u, e);
        std::copy(col.begin(), col.end(), r.col(t).begin());
    }
    return r;
}

namespace detail {

/// X kron Y.
inline cmat kron(const cmat& x, const cmat& y) {
    cmat out(x.rows() * y.rows(), x.cols() * y.cols());
    for (std::size_t a = 0; a < x.cols(); ++a)
        for (std::size_t b = 0; b < x.rows(); ++b)
            for (std::size_t c = 0; c < y.cols(); ++c)
                for (std::size_t d = 0; d < y.rows(); ++d) out(b * y.rows() + d, a * y.cols() + c) = x(b, a) * y(d, c);
    return out;
}

/// Maps col(X) of a rows x cols block to its stored form (row(X) when the block is row-stored).
inline std::vector<std::size_t> storage_map(std::size_t rows, std::size_t cols, bool row_stored) {
    std::vector<std::size_t> s(rows * cols);
    for (std::size_t b = 0; b < cols; ++b)
        for (std::size_t a = 0; a < rows; ++a) s[b * rows + a] = row_stored ? a * cols + b : b * rows + a;
    return s;
}

/// Writes the column-convention block k (col(target) = k col(source)) into the stored coordinates.
inline void place(cmat& r, const VecIndexer& ix, std::size_t tr, std::size_t ts, std::size_t sr, std::size_t ss,
                  const cmat& k) {
    const BlockPartition& p = ix.partition();
    const auto mt = storage_map(p.size(tr), p.size(ts), VecIndexer::row_stored(tr, ts));
    const auto ms = storage_map(p.size(sr), p.size(ss), VecIndexer::row_stored(sr, ss));
    const std::size_t bt = ix.block_start(tr, ts), bs = ix.block_start(sr, ss);
    for (std::size_t c = 0; c < k.cols(); ++c)
        for (std::size_t a = 0; a < k.rows(); ++a) r(bt + mt[a], bs + ms[c]) = k(a, c);
}

} // namespace detail

/// Annihilator assembled from the Kronecker block formulas:
///   [R_{(r,i),(r,i)} R_{(r,i),(r,j)}; R_{(r,j),(r,i)} R_{(r,j),(r,j)}] = [U_ii^T, U_ji^T; U_ij^T, U_jj^T] kron I_{n_r}
///   [R_{(i,r),(i,r)} R_{(i,r),(j,r)}; R_{(j,r),(i,r)} R_{(j,r),(j,r)}] = I_{n_r} kron [U_ii^*, U_ji^*; U_ij^*, U_jj^*]
/// in column-stacked coordinates, converted to row-stacked ones for blocks below the diagonal.
inline cmat build_annihilator_structured(const VecIndexer& ix, std::size_t i, std::size_t j, const cmat& u) {
    const BlockPartition& p = ix.partition();
    const ElementaryBlockTransform t{i, j, u, TransformKind::unitary};
    check_transform(t, p);
    const std::size_t len = ix.length(), m = p.m();
    cmat r = cmat::identity(len);
    const auto zero_block = [&](std::size_t a, std::size_t b) {
        const std::size_t s = ix.block_start(a, b), e = s + p.size(a) * p.size(b);
        for (std::size_t k = s; k < e; ++k) r(k, k) = 0.0;
    };
    zero_block(i, j);
    zero_block(j, i);
    const cmat uii = t.block_ii(p), uij = t.block_ij(p), uji = t.block_ji(p), ujj = t.block_jj(p);
    for (std::size_t q = 0; q < m; ++q) {
        if (q == i || q == j) continue;
        const cmat id = cmat::identity(p.size(q));
        // A'_qi = A_qi U_ii + A_qj U_ji, A'_qj = A_qi U_ij + A_qj U_jj
        detail::place(r, ix, q, i, q, i, detail::kron(uii.transpose(), id));
        detail::place(r, ix, q, i, q, j, detail::kron(uji.transpose(), id));
        detail::place(r, ix, q, j, q, i, detail::kron(uij.transpose(), id));
        detail::place(r, ix, q, j, q, j, detail::kron(ujj.transpose(), id));
        // A'_iq = U_ii^* A_iq + U_ji^* A_jq, A'_jq = U_ij^* A_iq + U_jj^* A_jq
        detail::place(r, ix, i, q, i, q, detail::kron(id, uii.adjoint()));
        detail::place(r, ix, i, q, j, q, detail::kron(id, uji.adjoint()));
        detail::place(r, ix, j, q, i, q, detail::kron(id, uij.adjoint()));
        detail::place(r, ix, j, q, j, q, detail::kron(id, ujj.adjoint()));
    }
    return r;
}

/// J = R_{M-1} ... R_1 R_0, one annihilator per pair of the ordering.
inline cmat build_operator(const VecIndexer& ix, const PivotOrdering& o, const std::vector<cmat>& transforms) {
    require_valid(o);
    if (o.m != ix.partition().m()) throw DimensionMismatch("build_operator: ordering does not match partition");
    if (transforms.size() != o.pairs.size()) throw DimensionMismatch("build_operator: need one transform per pair");
    cmat j = cmat::identity(ix.length());
    for (std::size_t k = 0; k < o.pairs.size(); ++k)
        j = build_annihilator_structured(ix, o.pairs[k].r, o.pairs[k].s, transforms[k]) * j;
    return j;
}

/// ||X||_2 from the largest eigenvalue of X^* X.
inline double spectral_norm(const cmat& x) {
    if (x.rows() == 0 || x.cols() == 0) return 0.0;
    const cmat g = hermitian_part(x.adjoint() * x);
    if (g.rows() == 1) return std::sqrt(std::max(0.0, g(0, 0).real()));
    const auto ev = elementwise_jacobi_classical(g, {1e-15, 60}).lambda;
    return std::sqrt(std::max(0.0, *std::max_element(ev.begin(), ev.end())));
}

struct MuReport {
    double mu = 0.0;
    double max_annihilator_norm = 0.0;
    double max_operator_norm = 0.0;
    std::size_t d = 0;
    std::size_t trials = 0;
};

/// max over trials of ||J_{d+1} ... J_1||_2 with UBC-enforced random unitary transforms, d = o.shift_count.
inline MuReport empirical_mu_report(const BlockPartition& p, const PivotOrdering& o, double rho, std::size_t trials,
                                    std::uint64_t seed) {
    if (trials < 1) throw ConfigError("empirical_mu needs at least one trial");
    MuReport rep;
    rep.d = o.shift_count;
    rep.trials = trials;
    if (p.m() < 2) return rep;
    require_valid(o);
    const VecIndexer ix(p);
    for (std::size_t trial = 0; trial < trials; ++trial) {
        engine g = make_engine(seed, trial);
        cmat prod = cmat::identity(ix.length());
        for (std::size_t cyc = 0; cyc <= o.shift_count; ++cyc) {
            std::vector<cmat> ts;
            for (const auto& pr : o.pairs) {
                const std::size_t q = p.size(pr.r) + p.size(pr.s);
                ElementaryBlockTransform t{pr.r, pr.s, random_unitary(q, g), TransformKind::unitary};
                ts.push_back(enforce_ubc(t, p, rho, true).pivot);
                rep.max_annihilator_norm = std::max(
                    rep.max_annihilator_norm, spectral_norm(build_annihilator_structured(ix, pr.r, pr.s, ts.back())));
            }
            const cmat jc = build_operator(ix, o, ts);
            rep.max_operator_norm = std::max(rep.max_operator_norm, spectral_norm(jc));
            prod = jc * prod;
        }
        rep.mu = std::max(rep.mu, spectral_norm(prod));
    }
    return rep;
}

inline double empirical_mu(const BlockPartition& p, const PivotOrdering& o, double rho, std::size_t trials,
                           std::uint64_t seed) {
    return empirical_mu_report(p, o, rho, trials, seed).mu;
}

} // namespace bjac
