#pragma once

// Gauss rules via Golub-Welsch: double-precision nodes from a symmetric
// tridiagonal QL iteration, then Newton-polished with the orthonormal
// three-term recurrence in the target scalar type R (so extended-precision
// rules come out fully accurate without an extended eigensolver). Weights are
// Christoffel numbers 1/sum_k p_k(x)^2.
//
// Clenshaw-Curtis panels provide the nested adaptive rule used for the
// cumulative inner integrals of the ordered (beta = 1) reductions.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "pfrmt/errors.hpp"
#include "pfrmt/scalar.hpp"

namespace pfrmt {

template <class R>
struct Rule1D {
    std::vector<R> x;
    std::vector<R> w;
    int size() const { return static_cast<int>(x.size()); }
};

namespace detail {

// Eigenvalues of a symmetric tridiagonal matrix (QL with implicit shifts).
inline std::vector<double> st_eigenvalues(std::vector<double> d, std::vector<double> e) {
    const int n = static_cast<int>(d.size());
    e.resize(n, 0.0);
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                double scale = std::fabs(d[m]) + std::fabs(d[m + 1]);
                if (std::fabs(e[m]) <= 1e-16 * scale) break;
            }
            if (m != l) {
                if (iter++ == 80) throw NumericError("tridiagonal QL failed to converge");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = std::hypot(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                bool underflow = false;
                for (int i = m - 1; i >= l; --i) {
                    double f = s * e[i];
                    double b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        underflow = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                }
                if (underflow) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
    std::sort(d.begin(), d.end());
    return d;
}

// Orthonormal polynomial ladder for the monic recurrence
// pi_{k+1} = (x - a_k) pi_k - b_k pi_{k-1}; J has diag a_k, offdiag sqrt(b_k).
template <class R>
struct OrthoRecurrence {
    std::vector<R> a;      // a_0 .. a_{n-1}
    std::vector<R> sqrtb;  // beta_1 .. beta_n  (beta_n only scales p_n, roots unaffected)
    R mu0;

    // Value and derivative of the orthonormal p_n at x, plus the Christoffel
    // denominator sum_{k<n} p_k(x)^2.
    void eval(R x, R& pn, R& dpn, R& christoffel) const {
        using std::sqrt;
        const int n = static_cast<int>(a.size());
        R pm1(0), p0 = R(1) / sqrt(mu0);
        R dm1(0), d0(0);
        R csum = p0 * p0;
        for (int k = 0; k < n; ++k) {
            R bnext = sqrtb[k];                      // beta_{k+1}
            R bcur = (k >= 1) ? sqrtb[k - 1] : R(0); // beta_k
            R p1 = ((x - a[k]) * p0 - bcur * pm1) / bnext;
            R d1 = (p0 + (x - a[k]) * d0 - bcur * dm1) / bnext;
            pm1 = p0; p0 = p1;
            dm1 = d0; d0 = d1;
            if (k < n - 1) csum += p0 * p0;
        }
        pn = p0;
        dpn = d0;
        christoffel = csum;
    }
};

template <class R>
Rule1D<R> golub_welsch(const OrthoRecurrence<R>& rec) {
    const int n = static_cast<int>(rec.a.size());
    std::vector<double> d(n), e(n > 1 ? n - 1 : 0);
    for (int k = 0; k < n; ++k) d[k] = to_double(rec.a[k]);
    for (int k = 0; k + 1 < n; ++k) e[k] = to_double(rec.sqrtb[k]);  // beta_1..beta_{n-1}
    std::vector<double> nodes = st_eigenvalues(d, e);

    Rule1D<R> rule;
    rule.x.resize(n);
    rule.w.resize(n);
    for (int i = 0; i < n; ++i) {
        R x(nodes[i]);
        R pn, dpn, cs;
        for (int it = 0; it < 6; ++it) {
            rec.eval(x, pn, dpn, cs);
            R dx = pn / dpn;
            x = x - dx;
            using std::fabs;
            if (to_double(fabs(dx)) < 1e-30 * (1.0 + std::fabs(to_double(x)))) break;
        }
        rec.eval(x, pn, dpn, cs);
        rule.x[i] = x;
        rule.w[i] = R(1) / cs;
    }
    return rule;
}

} // namespace detail

// weight e^{-x^2} on R
template <class R>
Rule1D<R> gauss_hermite(int n) {
    using std::sqrt;
    detail::OrthoRecurrence<R> rec;
    rec.a.assign(n, R(0));
    rec.sqrtb.resize(n);
    for (int k = 1; k <= n; ++k) rec.sqrtb[k - 1] = sqrt(R(k) / R(2));
    rec.mu0 = sqrt(pi_v<R>());
    return detail::golub_welsch(rec);
}

// weight x^alpha e^{-x} on [0, inf); alpha = twice_alpha/2 (integer or half-integer)
template <class R>
Rule1D<R> gauss_laguerre(int n, int twice_alpha) {
    using std::sqrt;
    R alpha = R(twice_alpha) / R(2);
    detail::OrthoRecurrence<R> rec;
    rec.a.resize(n);
    rec.sqrtb.resize(n);
    for (int k = 0; k < n; ++k) rec.a[k] = R(2 * k) + alpha + R(1);
    for (int k = 1; k <= n; ++k) rec.sqrtb[k - 1] = sqrt(R(k) * (R(k) + alpha));
    rec.mu0 = gamma_half<R>(twice_alpha + 2);  // Gamma(alpha + 1)
    return detail::golub_welsch(rec);
}

// weight 1 on [-1, 1]
template <class R>
Rule1D<R> gauss_legendre(int n) {
    using std::sqrt;
    detail::OrthoRecurrence<R> rec;
    rec.a.assign(n, R(0));
    rec.sqrtb.resize(n);
    for (int k = 1; k <= n; ++k) rec.sqrtb[k - 1] = sqrt(R(k * k) / R(4 * k * k - 1));
    rec.mu0 = R(2);
    return detail::golub_welsch(rec);
}

template <class R>
Rule1D<R> map_to_interval(const Rule1D<R>& base, R a, R b) {
    Rule1D<R> r;
    R half = (b - a) / R(2), mid = (a + b) / R(2);
    r.x.reserve(base.x.size());
    r.w.reserve(base.w.size());
    for (std::size_t i = 0; i < base.x.size(); ++i) {
        r.x.push_back(mid + half * base.x[i]);
        r.w.push_back(half * base.w[i]);
    }
    return r;
}

// ---------------------------------------------------------------------------
// Clenshaw-Curtis

// n+1 point rule on [-1,1], n even: x_j = cos(j pi / n).
template <class R>
Rule1D<R> clenshaw_curtis(int n) {
    using std::cos;
    Rule1D<R> r;
    r.x.resize(n + 1);
    r.w.resize(n + 1);
    R pi = pi_v<R>();
    for (int j = 0; j <= n; ++j) {
        R theta = pi * R(j) / R(n);
        r.x[j] = cos(theta);
        R s(0);
        for (int k = 1; k <= n / 2; ++k) {
            R gk = (2 * k == n) ? R(1) / R(2) : R(1);
            s += gk * R(2) * cos(R(2 * k) * theta) / R(4 * k * k - 1);
        }
        R cj = (j == 0 || j == n) ? R(1) : R(2);
        r.w[j] = cj / R(n) * (R(1) - s);
    }
    return r;
}

// Nested adaptive Clenshaw-Curtis for vector integrands. f(t, out) writes nf
// complex values; the error control is on the max-norm across components.
template <class R>
class AdaptiveCC {
  public:
    using C = cplx<R>;
    using Fn = std::function<void(R, C*)>;

    AdaptiveCC() : coarse_(clenshaw_curtis<R>(16)), fine_(clenshaw_curtis<R>(32)) {}

    // Integrates f over [a,b]; accumulates into out[0..nf). tol is absolute;
    // when per-family scales are given the error test is |err_i| <= tol * scale_i.
    void integrate(R a, R b, int nf, const Fn& f, C* out, double tol,
                   const double* scales = nullptr, int depth = 0) const {
        std::vector<C> vals(static_cast<std::size_t>(33) * nf);
        R half = (b - a) / R(2), mid = (a + b) / R(2);
        for (int j = 0; j <= 32; ++j)
            f(mid + half * fine_.x[j], vals.data() + static_cast<std::size_t>(j) * nf);

        std::vector<C> fine_sum(nf, C{}), coarse_sum(nf, C{});
        for (int j = 0; j <= 32; ++j) {
            R wf = half * fine_.w[j];
            for (int i = 0; i < nf; ++i) fine_sum[i] += C(wf) * vals[std::size_t(j) * nf + i];
        }
        for (int j = 0; j <= 16; ++j) {
            R wc = half * coarse_.w[j];
            for (int i = 0; i < nf; ++i) coarse_sum[i] += C(wc) * vals[std::size_t(2 * j) * nf + i];
        }
        bool ok = true;
        for (int i = 0; i < nf && ok; ++i) {
            using std::abs;
            double err = to_double(abs(fine_sum[i] - coarse_sum[i]));
            ok = err <= tol * (scales ? scales[i] : 1.0);
        }
        if (ok || depth >= max_depth_) {
            for (int i = 0; i < nf; ++i) out[i] += fine_sum[i];
            return;
        }
        integrate(a, mid, nf, f, out, tol * 0.5, scales, depth + 1);
        integrate(mid, b, nf, f, out, tol * 0.5, scales, depth + 1);
    }

  private:
    Rule1D<R> coarse_;
    Rule1D<R> fine_;
    int max_depth_ = 28;
};

} // namespace pfrmt
