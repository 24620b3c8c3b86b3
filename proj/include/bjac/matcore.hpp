#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "bjac/errors.hpp"
#include "bjac/matrix.hpp"

namespace bjac {

/// Integer partition (n_1, ..., n_m) of n defining the block structure.
/// Block indices are 0-based throughout the library.
class BlockPartition {
public:
    BlockPartition() = default;

    explicit BlockPartition(std::vector<std::size_t> sizes) : sizes_(std::move(sizes)) {
        if (sizes_.empty()) throw InvalidPartition("partition must have at least one block");
        offsets_.reserve(sizes_.size() + 1);
        offsets_.push_back(0);
        for (std::size_t s : sizes_) {
            if (s == 0) throw InvalidPartition("partition block sizes must be positive");
            offsets_.push_back(offsets_.back() + s);
        }
    }

    /// Every block of size `block`; n must be divisible by it.
    static BlockPartition uniform(std::size_t n, std::size_t block) {
        if (block == 0 || n % block != 0)
            throw InvalidPartition("n=" + std::to_string(n) + " not divisible by block size " + std::to_string(block));
        return BlockPartition(std::vector<std::size_t>(n / block, block));
    }

    /// The trivial partition (1, ..., 1).
    static BlockPartition unit(std::size_t n) { return BlockPartition(std::vector<std::size_t>(n, 1)); }

    std::size_t n() const noexcept { return offsets_.empty() ? 0 : offsets_.back(); }
    std::size_t m() const noexcept { return sizes_.size(); }
    std::size_t size(std::size_t r) const { return sizes_.at(r); }
    std::size_t offset(std::size_t r) const { return offsets_.at(r); }
    const std::vector<std::size_t>& sizes() const noexcept { return sizes_; }
    /// Start index of each block (length m, without the trailing n).
    std::span<const std::size_t> offsets() const noexcept { return {offsets_.data(), sizes_.size()}; }

    /// Block containing global index `k`.
    std::size_t block_of(std::size_t k) const {
        auto it = std::upper_bound(offsets_.begin(), offsets_.end(), k);
        return static_cast<std::size_t>(it - offsets_.begin()) - 1;
    }

    /// Global indices of block i followed by block j.
    std::vector<std::size_t> pivot_indices(std::size_t i, std::size_t j) const {
        std::vector<std::size_t> idx;
        idx.reserve(size(i) + size(j));
        for (std::size_t k = 0; k < size(i); ++k) idx.push_back(offset(i) + k);
        for (std::size_t k = 0; k < size(j); ++k) idx.push_back(offset(j) + k);
        return idx;
    }

    friend bool operator==(const BlockPartition&, const BlockPartition&) = default;

private:
    std::vector<std::size_t> sizes_;
    std::vector<std::size_t> offsets_;
};

inline BlockPartition make_partition(std::vector<std::size_t> sizes) { return BlockPartition(std::move(sizes)); }

/// Dense Hermitian matrix bound to a partition. Construction symmetrizes via (A + A^*)/2.
class PartitionedHermitian {
public:
    PartitionedHermitian() = default;
    PartitionedHermitian(const cmat& a, BlockPartition p) : a_(hermitian_part(a)), p_(std::move(p)) {
        if (p_.n() != a_.rows()) throw DimensionMismatch("partition dimension differs from matrix dimension");
    }

    const cmat& matrix() const noexcept { return a_; }
    const BlockPartition& partition() const noexcept { return p_; }
    std::size_t n() const noexcept { return a_.rows(); }

    cmat block(std::size_t r, std::size_t s) const {
        return a_.block(p_.offset(r), p_.offset(s), p_.size(r), p_.size(s));
    }

private:
    cmat a_;
    BlockPartition p_;
};

enum class TransformKind { unitary, j_unitary, general };

/// Elementary block matrix E(i, j, T^) determined by its pivot submatrix.
struct ElementaryBlockTransform {
    std::size_t i = 0;
    std::size_t j = 1;
    cmat pivot;
    TransformKind kind = TransformKind::unitary;

    static ElementaryBlockTransform identity(const BlockPartition& p, std::size_t i, std::size_t j) {
        return {i, j, cmat::identity(p.size(i) + p.size(j)), TransformKind::unitary};
    }

    cmat block_ii(const BlockPartition& p) const { return pivot.block(0, 0, p.size(i), p.size(i)); }
    cmat block_ij(const BlockPartition& p) const { return pivot.block(0, p.size(i), p.size(i), p.size(j)); }
    cmat block_ji(const BlockPartition& p) const { return pivot.block(p.size(i), 0, p.size(j), p.size(i)); }
    cmat block_jj(const BlockPartition& p) const { return pivot.block(p.size(i), p.size(i), p.size(j), p.size(j)); }
};

/// ||T^* J T - J||_F with J = diag(I_plus, -I_{q - plus}).
inline double j_unitarity_defect(const cmat& t, std::size_t plus) {
    const std::size_t q = t.rows();
    cmat jt = t;
    for (std::size_t c = 0; c < q; ++c)
        for (std::size_t r = plus; r < q; ++r) jt(r, c) = -jt(r, c);
    cmat g = t.adjoint() * jt;
    for (std::size_t k = 0; k < q; ++k) g(k, k) -= (k < plus ? 1.0 : -1.0);
    return frobenius_norm(g);
}

inline void check_transform(const ElementaryBlockTransform& t, const BlockPartition& p) {
    if (!(t.i < t.j) || t.j >= p.m()) throw DimensionMismatch("transform pivot pair out of range");
    const std::size_t q = p.size(t.i) + p.size(t.j);
    if (t.pivot.rows() != q || t.pivot.cols() != q)
        throw DimensionMismatch("pivot submatrix dimension differs from n_i + n_j");
}

/// Frobenius norm of A - diag(A).
inline double off_norm(const cmat& a) {
    if (!a.is_square()) throw DimensionMismatch("off_norm: matrix not square");
    double s = 0.0;
    for (std::size_t c = 0; c < a.cols(); ++c)
        for (std::size_t r = 0; r < a.rows(); ++r)
            if (r != c) s += std::norm(a(r, c));
    return std::sqrt(s);
}

inline double off_norm(const PartitionedHermitian& a) { return off_norm(a.matrix()); }

/// Frobenius norm of A with every diagonal block removed.
inline double block_off_norm(const cmat& a, const BlockPartition& p) {
    if (!a.is_square() || a.rows() != p.n()) throw DimensionMismatch("block_off_norm: dimension mismatch");
    double s = 0.0;
    for (std::size_t c = 0; c < a.cols(); ++c) {
        const std::size_t bc = p.block_of(c);
        for (std::size_t r = 0; r < a.rows(); ++r)
            if (p.block_of(r) != bc) s += std::norm(a(r, c));
    }
    return std::sqrt(s);
}

inline double block_off_norm(const PartitionedHermitian& a) { return block_off_norm(a.matrix(), a.partition()); }

/// Sum of off^2(A_ii) over the diagonal blocks.
inline double diagonal_blocks_off2(const cmat& a, const BlockPartition& p) {
    double s = 0.0;
    for (std::size_t b = 0; b < p.m(); ++b) {
        const std::size_t o = p.offset(b);
        for (std::size_t c = 0; c < p.size(b); ++c)
            for (std::size_t r = 0; r < p.size(b); ++r)
                if (r != c) s += std::norm(a(o + r, o + c));
    }
    return s;
}

/// Identity with the (i,i), (i,j), (j,i), (j,j) blocks replaced by those of the pivot submatrix.
inline cmat embed_transform(const ElementaryBlockTransform& t, const BlockPartition& p) {
    check_transform(t, p);
    cmat u = cmat::identity(p.n());
    const auto idx = p.pivot_indices(t.i, t.j);
    for (std::size_t c = 0; c < idx.size(); ++c)
        for (std::size_t r = 0; r < idx.size(); ++r) u(idx[r], idx[c]) = t.pivot(r, c);
    return u;
}

namespace detail {

/// C = A(:, idx) * T^, an n x q panel.
inline cmat right_panel(const cmat& a, std::span<const std::size_t> idx, const cmat& t) {
    const std::size_t n = a.rows();
    const std::size_t q = idx.size();
    cmat c(n, q);
    for (std::size_t l = 0; l < q; ++l) {
        auto cl = c.col(l);
        for (std::size_t k = 0; k < q; ++k) {
            const cplx tkl = t(k, l);
            if (tkl == cplx{}) continue;
            auto ak = a.col(idx[k]);
            for (std::size_t r = 0; r < n; ++r) cl[r] += ak[r] * tkl;
        }
    }
    return c;
}

} // namespace detail

/// In-place A <- W^* A W restricted to the index set `idx` (W is |idx| x |idx|), A Hermitian.
/// With `update_pivot` false the principal submatrix on `idx` is left for the caller to overwrite.
inline void apply_similarity_on(cmat& a, std::span<const std::size_t> idx, const cmat& w, bool update_pivot = true) {
    const std::size_t q = idx.size();
    const std::size_t n = a.rows();
    if (w.rows() != q || w.cols() != q) throw DimensionMismatch("apply_similarity: transform size differs from index set");
    const cmat panel = detail::right_panel(a, idx, w);

    std::vector<char> in_pivot(n, 0);
    for (std::size_t k : idx) in_pivot[k] = 1;
    for (std::size_t l = 0; l < q; ++l) {
        for (std::size_t r = 0; r < n; ++r) {
            if (in_pivot[r]) continue;
            a(r, idx[l]) = panel(r, l);
            a(idx[l], r) = std::conj(panel(r, l));
        }
    }
    if (!update_pivot) return;

    cmat piv(q, q);
    for (std::size_t c = 0; c < q; ++c)
        for (std::size_t k = 0; k < q; ++k) {
            const cplx pk = panel(idx[k], c);
            for (std::size_t r = 0; r < q; ++r) piv(r, c) += std::conj(w(k, r)) * pk;
        }
    piv = hermitian_part(piv);
    for (std::size_t c = 0; c < q; ++c)
        for (std::size_t r = 0; r < q; ++r) a(idx[r], idx[c]) = piv(r, c);
}

/// In-place A <- T^* A T for Hermitian A, touching only block rows/columns i and j.
/// With `update_pivot` false the pivot submatrix is left for the caller to overwrite.
inline void apply_similarity_inplace(cmat& a, const BlockPartition& p, const ElementaryBlockTransform& t,
                                     bool update_pivot = true) {
    check_transform(t, p);
    if (a.rows() != p.n() || !a.is_square()) throw DimensionMismatch("apply_similarity: dimension mismatch");
    const auto idx = p.pivot_indices(t.i, t.j);
    apply_similarity_on(a, idx, t.pivot, update_pivot);
}

/// T^* A T computed by updating only the affected block rows and columns; result re-symmetrized.
inline PartitionedHermitian apply_similarity(const PartitionedHermitian& a, const ElementaryBlockTransform& t) {
    cmat out = a.matrix();
    apply_similarity_inplace(out, a.partition(), t);
    return PartitionedHermitian(out, a.partition());
}

/// V(:, idx) <- V(:, idx) * W
inline void apply_right_on(cmat& v, std::span<const std::size_t> idx, const cmat& w) {
    const cmat panel = detail::right_panel(v, idx, w);
    for (std::size_t l = 0; l < idx.size(); ++l) {
        auto dst = v.col(idx[l]);
        auto src = panel.col(l);
        std::copy(src.begin(), src.end(), dst.begin());
    }
}

/// V <- V * E(i, j, T^), touching only the pivot columns.
inline void apply_right_inplace(cmat& v, const BlockPartition& p, const ElementaryBlockTransform& t) {
    check_transform(t, p);
    if (v.cols() != p.n()) throw DimensionMismatch("apply_right: dimension mismatch");
    apply_right_on(v, p.pivot_indices(t.i, t.j), t.pivot);
}

} // namespace bjac
