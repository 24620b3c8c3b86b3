#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <cstdint>
#include <vector>

#include "bjac/matcore.hpp"
#include "bjac/random.hpp"

namespace testsupport {

using bjac::cmat;
using bjac::cplx;
using EMat = Eigen::MatrixXcd;

inline EMat to_eigen(const cmat& a) {
    EMat e(a.rows(), a.cols());
    for (std::size_t c = 0; c < a.cols(); ++c)
        for (std::size_t r = 0; r < a.rows(); ++r) e(r, c) = a(r, c);
    return e;
}

inline cmat from_eigen(const EMat& e) {
    cmat a(e.rows(), e.cols());
    for (Eigen::Index c = 0; c < e.cols(); ++c)
        for (Eigen::Index r = 0; r < e.rows(); ++r) a(r, c) = e(r, c);
    return a;
}

inline cmat random_matrix(std::size_t r, std::size_t c, std::uint64_t seed) {
    auto g = bjac::make_engine(seed, 99);
    cmat a(r, c);
    for (auto& x : a.data()) x = bjac::complex_gaussian(g);
    return a;
}

inline cmat random_hermitian(std::size_t n, std::uint64_t seed) {
    return bjac::hermitian_part(random_matrix(n, n, seed));
}

/// Haar-like unitary from the QR factorization of a Gaussian matrix, phases fixed by diag(R).
inline cmat random_unitary(std::size_t n, std::uint64_t seed) {
    EMat g = to_eigen(random_matrix(n, n, seed));
    Eigen::HouseholderQR<EMat> qr(g);
    EMat q = qr.householderQ();
    EMat r = qr.matrixQR();
    for (Eigen::Index k = 0; k < q.cols(); ++k) {
        const cplx d = r(k, k);
        const double ad = std::abs(d);
        if (ad > 0) q.col(k) *= d / ad;
    }
    return from_eigen(q);
}

/// Eigenvalues of a Hermitian matrix, ascending, via Eigen.
inline std::vector<double> eigen_hermitian_values(const cmat& a) {
    Eigen::SelfAdjointEigenSolver<EMat> es(to_eigen(a), Eigen::EigenvaluesOnly);
    std::vector<double> v(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    return v;
}

inline std::vector<std::vector<std::size_t>> compositions(std::size_t n) {
    std::vector<std::vector<std::size_t>> out;
    for (std::uint64_t mask = 0; mask < (1ULL << (n - 1)); ++mask) {
        std::vector<std::size_t> parts;
        std::size_t run = 1;
        for (std::size_t b = 0; b + 1 < n; ++b) {
            if (mask & (1ULL << b)) {
                parts.push_back(run);
                run = 1;
            } else {
                ++run;
            }
        }
        parts.push_back(run);
        out.push_back(parts);
    }
    return out;
}

} // namespace testsupport
