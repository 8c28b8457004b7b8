#pragma once

// Scalar layer: every numeric routine in the library is templated over a real
// type R. Two instantiations are supported:
//   R = double        -> complex type std::complex<double>
//   R = DoubleDouble  -> complex type Cplx<DoubleDouble>  (~31 decimal digits)
// The double-double arithmetic follows the classic error-free transformations
// (Dekker two_sum / fma-based two_prod, as in Bailey's QD library).

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <string>

namespace pfrmt {

struct DoubleDouble {
    double hi = 0.0;
    double lo = 0.0;

    constexpr DoubleDouble() = default;
    constexpr DoubleDouble(double h) : hi(h) {}
    constexpr DoubleDouble(double h, double l) : hi(h), lo(l) {}
    constexpr DoubleDouble(int v) : hi(static_cast<double>(v)) {}
    constexpr DoubleDouble(long long v) : hi(static_cast<double>(v)) {}

    explicit operator double() const { return hi + lo; }
};

namespace detail {

inline DoubleDouble renorm(double s, double e) {
    double hi = s + e;
    double lo = e - (hi - s);
    return {hi, lo};
}

inline void two_sum(double a, double b, double& s, double& err) {
    s = a + b;
    double bb = s - a;
    err = (a - (s - bb)) + (b - bb);
}

inline void two_prod(double a, double b, double& p, double& err) {
    p = a * b;
    err = std::fma(a, b, -p);
}

} // namespace detail

inline DoubleDouble operator+(DoubleDouble a, DoubleDouble b) {
    double s, e;
    detail::two_sum(a.hi, b.hi, s, e);
    e += a.lo + b.lo;
    return detail::renorm(s, e);
}

inline DoubleDouble operator-(DoubleDouble a) { return {-a.hi, -a.lo}; }
inline DoubleDouble operator-(DoubleDouble a, DoubleDouble b) { return a + (-b); }

inline DoubleDouble operator*(DoubleDouble a, DoubleDouble b) {
    double p, e;
    detail::two_prod(a.hi, b.hi, p, e);
    e += a.hi * b.lo + a.lo * b.hi;
    return detail::renorm(p, e);
}

inline DoubleDouble operator/(DoubleDouble a, DoubleDouble b) {
    double q1 = a.hi / b.hi;
    DoubleDouble r = a - DoubleDouble(q1) * b;
    double q2 = r.hi / b.hi;
    r = r - DoubleDouble(q2) * b;
    double q3 = r.hi / b.hi;
    DoubleDouble q = detail::renorm(q1, q2);
    return q + DoubleDouble(q3);
}

inline DoubleDouble& operator+=(DoubleDouble& a, DoubleDouble b) { return a = a + b; }
inline DoubleDouble& operator-=(DoubleDouble& a, DoubleDouble b) { return a = a - b; }
inline DoubleDouble& operator*=(DoubleDouble& a, DoubleDouble b) { return a = a * b; }
inline DoubleDouble& operator/=(DoubleDouble& a, DoubleDouble b) { return a = a / b; }

inline bool operator==(DoubleDouble a, DoubleDouble b) { return a.hi == b.hi && a.lo == b.lo; }
inline bool operator!=(DoubleDouble a, DoubleDouble b) { return !(a == b); }
inline bool operator<(DoubleDouble a, DoubleDouble b) {
    return a.hi < b.hi || (a.hi == b.hi && a.lo < b.lo);
}
inline bool operator>(DoubleDouble a, DoubleDouble b) { return b < a; }
inline bool operator<=(DoubleDouble a, DoubleDouble b) { return !(b < a); }
inline bool operator>=(DoubleDouble a, DoubleDouble b) { return !(a < b); }

inline DoubleDouble abs(DoubleDouble a) { return a.hi < 0.0 || (a.hi == 0.0 && a.lo < 0.0) ? -a : a; }
inline DoubleDouble fabs(DoubleDouble a) { return abs(a); }
inline bool isfinite(DoubleDouble a) { return std::isfinite(a.hi) && std::isfinite(a.lo); }

inline DoubleDouble ldexp(DoubleDouble a, int n) { return {std::ldexp(a.hi, n), std::ldexp(a.lo, n)}; }

inline DoubleDouble sqrt(DoubleDouble a) {
    if (a.hi == 0.0 && a.lo == 0.0) return {};
    double s = std::sqrt(a.hi);
    double e = double((a - DoubleDouble(s) * DoubleDouble(s)) / DoubleDouble(2.0 * s));
    return detail::renorm(s, e);
}

namespace dd_const {
// hi = nearest double, lo = nearest double to the residual.
inline constexpr DoubleDouble pi{3.141592653589793, 1.2246467991473531772e-16};
inline constexpr DoubleDouble two_pi{6.283185307179586, 2.4492935982947063544e-16};
inline constexpr DoubleDouble half_pi{1.5707963267948966, 6.123233995736766036e-17};
inline constexpr DoubleDouble ln2{0.6931471805599453, 2.3190468138462995584e-17};
} // namespace dd_const

inline DoubleDouble exp(DoubleDouble a) {
    if (a.hi > 709.0) return {std::numeric_limits<double>::infinity(), 0.0};
    if (a.hi < -709.0) return {};
    // e^a = 2^k * e^r with r = a - k ln2, |r| <= ln2/2; plain Taylor keeps the
    // rounding error at a few ulps (squaring ladders amplify it).
    double k = std::nearbyint(a.hi / dd_const::ln2.hi);
    DoubleDouble r = a - DoubleDouble(k) * dd_const::ln2;
    DoubleDouble sum = DoubleDouble(1.0) + r;
    DoubleDouble term = r;
    for (int n = 2; n <= 32; ++n) {
        term = term * r / DoubleDouble(n);
        sum += term;
        if (std::fabs(term.hi) < 1e-34 * std::fabs(sum.hi)) break;
    }
    return ldexp(sum, static_cast<int>(k));
}

inline DoubleDouble log(DoubleDouble a) {
    // Newton iteration on exp(x) = a starting from the double log.
    DoubleDouble x(std::log(a.hi));
    x = x + a * exp(-x) - DoubleDouble(1.0);
    x = x + a * exp(-x) - DoubleDouble(1.0);
    return x;
}

namespace detail {
// Taylor cosine, |x| <= pi/2 after reduction.
inline DoubleDouble cos_taylor(DoubleDouble x) {
    DoubleDouble x2 = x * x;
    DoubleDouble sum(1.0), term(1.0);
    for (int n = 1; n <= 20; ++n) {
        term = -term * x2 / DoubleDouble((2 * n - 1) * (2 * n));
        sum += term;
        if (std::fabs(term.hi) < 1e-36) break;
    }
    return sum;
}
} // namespace detail

// cos/sin with mod-2pi reduction; accurate for the moderate arguments used in
// quadrature node generation (|x| up to a few hundred).
inline DoubleDouble cos(DoubleDouble x) {
    x = abs(x);
    double k = std::nearbyint(x.hi / dd_const::two_pi.hi);
    if (k != 0.0) x = x - DoubleDouble(k) * dd_const::two_pi;
    x = abs(x);
    if (x > dd_const::pi) x = dd_const::two_pi - x;
    if (x > dd_const::half_pi) return -detail::cos_taylor(dd_const::pi - x);
    return detail::cos_taylor(x);
}

inline DoubleDouble sin(DoubleDouble x) { return cos(dd_const::half_pi - x); }

inline std::string to_string(DoubleDouble a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g%+.17g", a.hi, a.lo);
    return buf;
}

// ---------------------------------------------------------------------------
// Minimal complex type used when R is not a builtin floating-point type.

template <class R>
struct Cplx {
    R re{};
    R im{};

    constexpr Cplx() = default;
    constexpr Cplx(R r) : re(r) {}
    constexpr Cplx(R r, R i) : re(r), im(i) {}

    R real() const { return re; }
    R imag() const { return im; }
};

template <class R> Cplx<R> operator+(Cplx<R> a, Cplx<R> b) { return {a.re + b.re, a.im + b.im}; }
template <class R> Cplx<R> operator-(Cplx<R> a, Cplx<R> b) { return {a.re - b.re, a.im - b.im}; }
template <class R> Cplx<R> operator-(Cplx<R> a) { return {-a.re, -a.im}; }
template <class R> Cplx<R> operator*(Cplx<R> a, Cplx<R> b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
template <class R> Cplx<R> operator*(R s, Cplx<R> a) { return {s * a.re, s * a.im}; }
template <class R> Cplx<R> operator*(Cplx<R> a, R s) { return {a.re * s, a.im * s}; }

template <class R> Cplx<R> operator/(Cplx<R> a, Cplx<R> b) {
    // Smith's algorithm, branch on the larger denominator component.
    if (abs(b.re) >= abs(b.im)) {
        R r = b.im / b.re;
        R den = b.re + b.im * r;
        return {(a.re + a.im * r) / den, (a.im - a.re * r) / den};
    }
    R r = b.re / b.im;
    R den = b.im + b.re * r;
    return {(a.re * r + a.im) / den, (a.im * r - a.re) / den};
}
template <class R> Cplx<R> operator/(Cplx<R> a, R s) { return {a.re / s, a.im / s}; }

template <class R> Cplx<R>& operator+=(Cplx<R>& a, Cplx<R> b) { return a = a + b; }
template <class R> Cplx<R>& operator-=(Cplx<R>& a, Cplx<R> b) { return a = a - b; }
template <class R> Cplx<R>& operator*=(Cplx<R>& a, Cplx<R> b) { return a = a * b; }
template <class R> Cplx<R>& operator/=(Cplx<R>& a, Cplx<R> b) { return a = a / b; }
template <class R> bool operator==(Cplx<R> a, Cplx<R> b) { return a.re == b.re && a.im == b.im; }

template <class R> Cplx<R> conj(Cplx<R> a) { return {a.re, -a.im}; }
template <class R> R real(Cplx<R> a) { return a.re; }
template <class R> R imag(Cplx<R> a) { return a.im; }
template <class R> R norm(Cplx<R> a) { return a.re * a.re + a.im * a.im; }
template <class R> R abs(Cplx<R> a) { return sqrt(norm(a)); }

// ---------------------------------------------------------------------------

template <class R>
struct scalar_traits;

template <>
struct scalar_traits<double> {
    using complex_t = std::complex<double>;
    static constexpr double eps = 2.220446049250313e-16;
    static constexpr double rcond_floor = 1e-13;   // SingularMatrixError threshold
    static constexpr double quad_rel_tol = 5e-15;  // adaptive quadrature target
    static constexpr const char* name = "double";
};

template <>
struct scalar_traits<DoubleDouble> {
    using complex_t = Cplx<DoubleDouble>;
    static constexpr double eps = 4.93e-32;
    static constexpr double rcond_floor = 1e-28;
    static constexpr double quad_rel_tol = 1e-29;
    static constexpr const char* name = "extended";
};

template <class R>
using cplx = typename scalar_traits<R>::complex_t;

inline double to_double(double x) { return x; }
inline double to_double(DoubleDouble x) { return x.hi + x.lo; }

inline std::complex<double> to_std_complex(std::complex<double> z) { return z; }
inline std::complex<double> to_std_complex(Cplx<DoubleDouble> z) {
    return {to_double(z.re), to_double(z.im)};
}

// Relative deviation used by diagnostics and verification reports.
inline double rel_dev(std::complex<double> a, std::complex<double> b) {
    double scale = std::max({std::abs(a), std::abs(b), 1e-300});
    return std::abs(a - b) / scale;
}

template <class R>
R pi_v() {
    if constexpr (std::is_same_v<R, double>) return 3.14159265358979323846;
    else return dd_const::pi;
}

template <class R>
cplx<R> make_cplx(double re, double im) {
    return cplx<R>(R(re), R(im));
}

template <class R>
R powi(R x, int n) {
    if (n < 0) return R(1) / powi(x, -n);
    R r(1), b = x;
    while (n > 0) {
        if (n & 1) r *= b;
        b *= b;
        n >>= 1;
    }
    return r;
}

template <class R, class C>
C powi_c(C x, int n) {
    C r = C(R(1));
    C b = x;
    while (n > 0) {
        if (n & 1) r *= b;
        b *= b;
        n >>= 1;
    }
    return r;
}

template <class R>
R factorial(int n) {
    R r(1);
    for (int k = 2; k <= n; ++k) r *= R(k);
    return r;
}

// Gamma(s) for s = twice_s/2 > 0 (integer or half-integer), exact in R.
template <class R>
R gamma_half(int twice_s) {
    if (twice_s % 2 == 0) return factorial<R>(twice_s / 2 - 1);
    using std::sqrt;
    R g = sqrt(pi_v<R>());  // Gamma(1/2)
    for (int t = 1; t + 2 <= twice_s; t += 2) g *= R(t) / R(2);
    return g;
}

} // namespace pfrmt
