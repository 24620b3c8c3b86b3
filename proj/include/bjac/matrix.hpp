#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "bjac/errors.hpp"

namespace bjac {

using cplx = std::complex<double>;

namespace detail {

template <class T>
struct real_of {
    using type = T;
};
template <class T>
struct real_of<std::complex<T>> {
    using type = T;
};

template <class T>
inline T conj_value(const T& x) {
    if constexpr (std::is_arithmetic_v<T>) {
        return x;
    } else {
        using std::conj;
        return conj(x);
    }
}

template <class T>
inline double abs2(const T& x) {
    if constexpr (std::is_arithmetic_v<T>) {
        return static_cast<double>(x) * static_cast<double>(x);
    } else {
        using std::norm;
        return static_cast<double>(norm(x));
    }
}

} // namespace detail

/// Dense column-major matrix with value semantics.
template <class T>
class Matrix {
public:
    using value_type = T;
    using real_type = typename detail::real_of<T>::type;

    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, T fill = T{})
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix id(n, n);
        for (std::size_t k = 0; k < n; ++k) id(k, k) = T{1};
        return id;
    }

    static Matrix diagonal(std::span<const T> d) {
        Matrix out(d.size(), d.size());
        for (std::size_t k = 0; k < d.size(); ++k) out(k, k) = d[k];
        return out;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool is_square() const noexcept { return rows_ == cols_; }
    bool empty() const noexcept { return data_.empty(); }

    T& operator()(std::size_t r, std::size_t c) noexcept { return data_[c * rows_ + r]; }
    const T& operator()(std::size_t r, std::size_t c) const noexcept { return data_[c * rows_ + r]; }

    std::span<T> col(std::size_t c) noexcept { return {data_.data() + c * rows_, rows_}; }
    std::span<const T> col(std::size_t c) const noexcept { return {data_.data() + c * rows_, rows_}; }

    std::span<const T> data() const noexcept { return data_; }
    std::span<T> data() noexcept { return data_; }

    Matrix adjoint() const {
        Matrix out(cols_, rows_);
        for (std::size_t c = 0; c < cols_; ++c)
            for (std::size_t r = 0; r < rows_; ++r) out(c, r) = detail::conj_value((*this)(r, c));
        return out;
    }

    Matrix transpose() const {
        Matrix out(cols_, rows_);
        for (std::size_t c = 0; c < cols_; ++c)
            for (std::size_t r = 0; r < rows_; ++r) out(c, r) = (*this)(r, c);
        return out;
    }

    Matrix conjugate() const {
        Matrix out(*this);
        for (auto& x : out.data_) x = detail::conj_value(x);
        return out;
    }

    Matrix block(std::size_t r0, std::size_t c0, std::size_t nr, std::size_t nc) const {
        if (r0 + nr > rows_ || c0 + nc > cols_) throw DimensionMismatch("block out of range");
        Matrix out(nr, nc);
        for (std::size_t c = 0; c < nc; ++c)
            for (std::size_t r = 0; r < nr; ++r) out(r, c) = (*this)(r0 + r, c0 + c);
        return out;
    }

    void set_block(std::size_t r0, std::size_t c0, const Matrix& b) {
        if (r0 + b.rows() > rows_ || c0 + b.cols() > cols_) throw DimensionMismatch("set_block out of range");
        for (std::size_t c = 0; c < b.cols(); ++c)
            for (std::size_t r = 0; r < b.rows(); ++r) (*this)(r0 + r, c0 + c) = b(r, c);
    }

    void swap_cols(std::size_t a, std::size_t b) {
        if (a == b) return;
        std::swap_ranges(col(a).begin(), col(a).end(), col(b).begin());
    }

    Matrix& operator+=(const Matrix& o) {
        check_same_shape(o);
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
        return *this;
    }
    Matrix& operator-=(const Matrix& o) {
        check_same_shape(o);
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
        return *this;
    }
    Matrix& operator*=(const T& s) {
        for (auto& x : data_) x *= s;
        return *this;
    }

    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator*(Matrix a, const T& s) { return a *= s; }
    friend Matrix operator*(const T& s, Matrix a) { return a *= s; }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_) throw DimensionMismatch("matrix product: inner dimensions differ");
        Matrix out(a.rows_, b.cols_);
        for (std::size_t c = 0; c < b.cols_; ++c) {
            T* oc = out.data_.data() + c * out.rows_;
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const T bkc = b(k, c);
                if (bkc == T{}) continue;
                const T* ak = a.data_.data() + k * a.rows_;
                for (std::size_t r = 0; r < a.rows_; ++r) oc[r] += ak[r] * bkc;
            }
        }
        return out;
    }

    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

private:
    void check_same_shape(const Matrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_) throw DimensionMismatch("matrix shapes differ");
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

using cmat = Matrix<cplx>;
using rmat = Matrix<double>;

template <class T>
inline double frobenius_norm(const Matrix<T>& a) {
    double s = 0.0;
    for (const auto& x : a.data()) s += detail::abs2(x);
    return std::sqrt(s);
}

template <class T>
inline double max_abs(const Matrix<T>& a) {
    double m = 0.0;
    for (const auto& x : a.data()) m = std::max(m, std::sqrt(detail::abs2(x)));
    return m;
}

template <class T>
inline double max_abs_diff(const Matrix<T>& a, const Matrix<T>& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionMismatch("max_abs_diff: shapes differ");
    double m = 0.0;
    for (std::size_t k = 0; k < a.data().size(); ++k)
        m = std::max(m, std::sqrt(detail::abs2(a.data()[k] - b.data()[k])));
    return m;
}

/// (A + A^*) / 2
inline cmat hermitian_part(const cmat& a) {
    if (!a.is_square()) throw DimensionMismatch("hermitian_part: matrix not square");
    cmat out(a.rows(), a.cols());
    for (std::size_t c = 0; c < a.cols(); ++c)
        for (std::size_t r = 0; r < a.rows(); ++r) out(r, c) = 0.5 * (a(r, c) + std::conj(a(c, r)));
    for (std::size_t k = 0; k < a.rows(); ++k) out(k, k) = {out(k, k).real(), 0.0};
    return out;
}

/// ||A^* A - I||_F
inline double unitarity_defect(const cmat& u) {
    return frobenius_norm(u.adjoint() * u - cmat::identity(u.cols()));
}

inline double trace_real(const cmat& a) {
    double t = 0.0;
    for (std::size_t k = 0; k < std::min(a.rows(), a.cols()); ++k) t += a(k, k).real();
    return t;
}

} // namespace bjac
