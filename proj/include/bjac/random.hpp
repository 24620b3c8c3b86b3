#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace bjac {

using engine = std::mt19937_64;

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace detail

/// Independent stream `stream` of the generator family identified by `seed`.
inline engine make_engine(std::uint64_t seed, std::uint64_t stream = 0) {
    return engine(detail::splitmix64(detail::splitmix64(seed) ^ detail::splitmix64(~stream)));
}

/// Standard complex Gaussian: real and imaginary parts N(0, 1/2).
inline std::complex<double> complex_gaussian(engine& g) {
    std::normal_distribution<double> nd(0.0, 0.7071067811865476);
    const double re = nd(g);
    const double im = nd(g);
    return {re, im};
}

} // namespace bjac
