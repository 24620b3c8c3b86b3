#pragma once

#include <cmath>
#include <complex>

namespace bjac::dd {

/// Unevaluated sum hi + lo with |lo| <= ulp(hi)/2, about 106 bits of significand.
struct real {
    double hi = 0.0;
    double lo = 0.0;

    constexpr real() = default;
    constexpr real(double x) : hi(x), lo(0.0) {}
    constexpr real(double h, double l) : hi(h), lo(l) {}

    explicit operator double() const { return hi + lo; }
};

namespace detail {

inline real quick_two_sum(double a, double b) {
    const double s = a + b;
    return {s, b - (s - a)};
}

inline real two_sum(double a, double b) {
    const double s = a + b;
    const double bb = s - a;
    return {s, (a - (s - bb)) + (b - bb)};
}

inline real two_prod(double a, double b) {
    const double p = a * b;
    return {p, std::fma(a, b, -p)};
}

} // namespace detail

inline real operator-(real a) { return {-a.hi, -a.lo}; }

inline real operator+(real a, real b) {
    real s = detail::two_sum(a.hi, b.hi);
    real t = detail::two_sum(a.lo, b.lo);
    s.lo += t.hi;
    s = detail::quick_two_sum(s.hi, s.lo);
    s.lo += t.lo;
    return detail::quick_two_sum(s.hi, s.lo);
}

inline real operator-(real a, real b) { return a + (-b); }

inline real operator*(real a, real b) {
    real p = detail::two_prod(a.hi, b.hi);
    p.lo += a.hi * b.lo + a.lo * b.hi;
    return detail::quick_two_sum(p.hi, p.lo);
}

inline real operator/(real a, real b) {
    const double q1 = a.hi / b.hi;
    real r = a - real(q1) * b;
    const double q2 = r.hi / b.hi;
    r = r - real(q2) * b;
    const double q3 = r.hi / b.hi;
    return real(q1) + real(q2) + real(q3);
}

inline real& operator+=(real& a, real b) { return a = a + b; }
inline real& operator-=(real& a, real b) { return a = a - b; }
inline real& operator*=(real& a, real b) { return a = a * b; }

inline bool operator<(real a, real b) { return a.hi < b.hi || (a.hi == b.hi && a.lo < b.lo); }
inline bool operator>(real a, real b) { return b < a; }
inline bool operator==(real a, real b) { return a.hi == b.hi && a.lo == b.lo; }

inline real abs(real a) { return a.hi < 0.0 ? -a : a; }

inline real sqrt(real a) {
    if (a.hi <= 0.0) return real(0.0);
    const double x = 1.0 / std::sqrt(a.hi);
    const double ax = a.hi * x;
    const real diff = a - detail::two_prod(ax, ax);
    return detail::two_sum(ax, diff.hi * (x * 0.5));
}

inline real square(real a) { return a * a; }

/// Complex number over double-double components.
struct complex {
    real re;
    real im;

    complex() = default;
    complex(real r) : re(r), im(0.0) {}
    complex(real r, real i) : re(r), im(i) {}
    complex(std::complex<double> z) : re(z.real()), im(z.imag()) {}
};

inline complex operator+(const complex& a, const complex& b) { return {a.re + b.re, a.im + b.im}; }
inline complex operator-(const complex& a, const complex& b) { return {a.re - b.re, a.im - b.im}; }
inline complex operator*(const complex& a, const complex& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
inline complex operator*(const complex& a, real s) { return {a.re * s, a.im * s}; }
inline complex conj(const complex& a) { return {a.re, -a.im}; }
inline real norm(const complex& a) { return a.re * a.re + a.im * a.im; }
inline real abs(const complex& a) { return sqrt(norm(a)); }
inline std::complex<double> to_std(const complex& a) { return {double(a.re), double(a.im)}; }

} // namespace bjac::dd
