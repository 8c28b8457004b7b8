#pragma once

// Brute-force oracles, the ground truth for every formula-path value.
//
//  * z_eigenvalue_quadrature: direct tensor quadrature of the eigenvalue
//    measure prod W(E_a) |Delta(E)|^beta with the characteristic-polynomial
//    ratio. For beta = 1 the ordered sector is parametrized by gap
//    coordinates E_1 = x, E_j = x + g_1 + ... + g_{j-1} (the integrand is
//    smooth there, unlike the |Delta| form on the full space); beta = 4 keeps
//    the plain full-space tensor product since Delta^4 is smooth.
//  * z_matrix_montecarlo: averages the determinant ratio over sampled
//    matrices (real symmetric, or 2N-dimensional self-dual with entry density
//    chosen so each distinct eigenvalue carries the ensemble weight).
//  * epsilon-regularized confluent pair: the beta = 4 distributional pairing
//    evaluated at (x, x + eps) with weight -W(x)/eps; Richardson extrapolation
//    in eps recovers the closed-form reductions to O(eps^k).
//
// The hot loops run through the deterministic block-tree reduction, so any
// thread count gives bit-identical results; pfrmt::ref keeps plain serial
// references for testing and benchmarking.

#include <chrono>
#include <cstdint>
#include <vector>

#include "pfrmt/berezinian.hpp"
#include "pfrmt/dense.hpp"
#include "pfrmt/ensemble.hpp"
#include "pfrmt/philox.hpp"
#include "pfrmt/reduction.hpp"

namespace pfrmt {

struct QuadratureSpec {
    int nodes_per_dim = 0;  // 0: scheme default for the dimension
    bool ordered = true;    // beta = 1 only; beta = 4 always integrates the full space
    static constexpr std::int64_t node_cap = 100'000'000;
};

struct OracleValue {
    std::complex<double> value{};
    double error_estimate = 0.0;  // node-halving difference
    std::int64_t nodes = 0;
    double ms = 0.0;
};

struct MCSpec {
    std::int64_t samples = 1'000'000;
    std::uint64_t seed = 1;
};

struct MCValue {
    std::complex<double> mean{};
    double stderr_re = 0.0;
    double stderr_im = 0.0;
    std::int64_t samples = 0;
    double ms = 0.0;
};

namespace detail {

// Graded panel edges for the gap dimensions (integrands decay like the
// ensemble weight in each gap).
inline std::vector<double> gap_edges(bool half_line) {
    if (half_line) return {0.0, 1.0, 2.5, 5.0, 9.0, 16.0, 28.0, 48.0, 75.0};
    return {0.0, 1.0, 2.0, 3.5, 5.5, 8.0, 12.0, 18.0};
}

inline Rule1D<double> composite_gap_rule(bool half_line, int nodes) {
    auto edges = gap_edges(half_line);
    int npanels = static_cast<int>(edges.size()) - 1;
    int q = std::max(4, nodes / npanels);
    auto base = gauss_legendre<double>(q);
    Rule1D<double> rule;
    for (int p = 0; p < npanels; ++p) {
        auto seg = map_to_interval(base, edges[p], edges[p + 1]);
        rule.x.insert(rule.x.end(), seg.x.begin(), seg.x.end());
        rule.w.insert(rule.w.end(), seg.w.begin(), seg.w.end());
    }
    return rule;
}

// Weighted base rule for the lowest eigenvalue: absorbs W(E_1).
inline Rule1D<double> base_rule(const Ensemble<double>& e, int nodes) {
    if (e.half_line()) {
        int ta = (e.beta() == 1) ? e.nu() - 1 : 2 * (e.nu() + 1);
        return gauss_laguerre<double>(nodes, ta);
    }
    auto gh = gauss_hermite<double>(nodes);
    const double s2 = std::sqrt(2.0);
    Rule1D<double> r;
    r.x.resize(gh.x.size());
    r.w.resize(gh.w.size());
    for (std::size_t i = 0; i < gh.x.size(); ++i) {
        r.x[i] = s2 * gh.x[i];
        r.w[i] = s2 * gh.w[i];
    }
    return r;
}

struct QuadTerm {
    const Ensemble<double>* e;
    int ndim;
    int gamma;
    const std::vector<std::complex<double>>* kappa1;
    const std::vector<std::complex<double>>* kappa2;
    const Rule1D<double>* base;
    const Rule1D<double>* gap;  // null for the full-space (beta = 4) route

    std::complex<double> operator()(std::int64_t flat) const {
        using Cd = std::complex<double>;
        double ev[8];
        double w = 1.0;
        if (gap) {
            std::int64_t rest = flat;
            int ib = static_cast<int>(rest % base->size());
            rest /= base->size();
            ev[0] = base->x[ib];
            w = base->w[ib];
            for (int j = 1; j < ndim; ++j) {
                int ig = static_cast<int>(rest % gap->size());
                rest /= gap->size();
                ev[j] = ev[j - 1] + gap->x[ig];
                w *= gap->w[ig] * e->weight(ev[j]);
            }
            double delta = 1.0;
            for (int a = 0; a < ndim; ++a)
                for (int b = a + 1; b < ndim; ++b) delta *= ev[b] - ev[a];
            w *= delta;  // beta = 1, positive on the ordered sector
        } else {
            std::int64_t rest = flat;
            for (int j = 0; j < ndim; ++j) {
                int ib = static_cast<int>(rest % base->size());
                rest /= base->size();
                ev[j] = base->x[ib];
                w *= base->w[ib];
            }
            double delta = 1.0;
            for (int a = 0; a < ndim; ++a)
                for (int b = a + 1; b < ndim; ++b) delta *= ev[b] - ev[a];
            double d2 = delta * delta;
            w *= d2 * d2;  // beta = 4
        }
        Cd ratio = 1.0;
        for (int j = 0; j < ndim; ++j) {
            for (const auto& k2 : *kappa2) {
                Cd f = ev[j] - k2;
                ratio *= (gamma == 2) ? f * f : f;
            }
            for (const auto& k1 : *kappa1) {
                Cd f = ev[j] - k1;
                ratio /= (gamma == 2) ? f * f : f;
            }
        }
        return w * ratio;
    }
};

inline std::complex<double> quad_sum(const QuadTerm& term, std::int64_t total, bool parallel) {
    return block_tree_sum<std::complex<double>>(total, term, parallel);
}

} // namespace detail

// Direct eigenvalue-measure quadrature. ndim counts distinct eigenvalues.
inline OracleValue z_eigenvalue_quadrature(const Ensemble<double>& e, int ndim,
                                           const SpectralParams& p, QuadratureSpec q = {},
                                           bool parallel = true) {
    using Cd = std::complex<double>;
    auto t0 = std::chrono::steady_clock::now();
    p.validate();
    for (const auto& k : p.kappa1)
        if (k.imag() == 0.0 && (!e.half_line() || k.real() >= 0.0))
            throw OnSupportError("denominator shift on the ensemble support");
    const int gamma = (e.beta() == 4) ? 2 : 1;
    if (e.beta() == 1 && ndim > 4) throw BudgetError("beta=1 quadrature oracle capped at ndim=4");
    if (e.beta() == 4 && ndim > 3) throw BudgetError("beta=4 quadrature oracle capped at N=3");
    if (ndim == 0) {
        OracleValue out;
        out.value = 1.0;
        out.nodes = 1;
        return out;
    }

    int nodes = q.nodes_per_dim;
    if (nodes == 0) nodes = (ndim <= 2) ? 200 : (ndim == 3 ? 140 : 96);

    auto eval = [&](int nd) -> std::pair<Cd, std::int64_t> {
        OracleValue dummy;
        auto base = detail::base_rule(e, nd);
        Rule1D<double> gap;
        bool use_gap = (e.beta() == 1) && q.ordered && ndim > 1;
        std::int64_t total = base.size();
        if (use_gap) {
            gap = detail::composite_gap_rule(e.half_line(), nd);
            for (int j = 1; j < ndim; ++j) total *= gap.size();
        } else {
            for (int j = 1; j < ndim; ++j) total *= base.size();
        }
        if (total > QuadratureSpec::node_cap)
            throw BudgetError("quadrature oracle exceeds the node cap");
        detail::QuadTerm term{&e, ndim, gamma, &p.kappa1, &p.kappa2, &base,
                              use_gap ? &gap : nullptr};
        (void)dummy;
        return {detail::quad_sum(term, total, parallel), total};
    };

    OracleValue out;
    auto [value, total] = eval(nodes);
    auto [half, htotal] = eval(std::max(8, nodes / 2));
    (void)htotal;
    out.value = value;
    out.error_estimate = std::abs(value - half);
    out.nodes = total;
    out.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

namespace ref {

// Serial reference of the quadrature oracle: same rules, plain left-to-right
// accumulation. Kept for testing the parallel reduction and for benchmarks.
inline std::complex<double> z_eigenvalue_quadrature_serial(const Ensemble<double>& e, int ndim,
                                                           const SpectralParams& p,
                                                           QuadratureSpec q = {}) {
    if (ndim == 0) return 1.0;
    const int gamma = (e.beta() == 4) ? 2 : 1;
    int nodes = q.nodes_per_dim;
    if (nodes == 0) nodes = (ndim <= 2) ? 200 : (ndim == 3 ? 140 : 96);
    auto base = detail::base_rule(e, nodes);
    Rule1D<double> gap;
    bool use_gap = (e.beta() == 1) && q.ordered && ndim > 1;
    std::int64_t total = base.size();
    if (use_gap) {
        gap = detail::composite_gap_rule(e.half_line(), nodes);
        for (int j = 1; j < ndim; ++j) total *= gap.size();
    } else {
        for (int j = 1; j < ndim; ++j) total *= base.size();
    }
    if (total > QuadratureSpec::node_cap)
        throw BudgetError("quadrature oracle exceeds the node cap");
    detail::QuadTerm term{&e, ndim, gamma, &p.kappa1, &p.kappa2, &base, use_gap ? &gap : nullptr};
    return sum_serial<std::complex<double>>(total, term);
}

} // namespace ref

namespace detail {

struct MCAccum {
    std::complex<double> sum{};
    double re2 = 0.0;
    double im2 = 0.0;
    MCAccum& operator+=(const MCAccum& o) {
        sum += o.sum;
        re2 += o.re2;
        im2 += o.im2;
        return *this;
    }
};

// One determinant-ratio sample of the matrix ensemble.
struct MCTerm {
    const Ensemble<double>* e;
    int ndim;  // distinct eigenvalues; matrix dimension is gamma * ndim
    const std::vector<std::complex<double>>* kappa1;
    const std::vector<std::complex<double>>* kappa2;
    std::uint64_t seed;

    MCAccum operator()(std::int64_t sample) const {
        using Cd = std::complex<double>;
        SampleRng rng(seed, static_cast<std::uint64_t>(sample));
        const bool quaternion = (e->beta() == 4);
        const int n = quaternion ? 2 * ndim : ndim;
        Mat<Cd> h(n, n);
        if (!quaternion) {
            // density e^{-tr H^2 / 2}: diagonal N(0,1), off-diagonal N(0,1/2)
            const double s = std::sqrt(0.5);
            for (int i = 0; i < n; ++i) {
                h(i, i) = rng.normal();
                for (int j = i + 1; j < n; ++j) {
                    double v = s * rng.normal();
                    h(i, j) = v;
                    h(j, i) = v;
                }
            }
        } else {
            // self-dual [[A, B], [-conj(B), conj(A)]] with density e^{-tr H^2/4},
            // so each distinct (doubly degenerate) eigenvalue carries e^{-E^2/2}
            const double s = std::sqrt(0.5);
            const int m = ndim;
            for (int i = 0; i < m; ++i) {
                h(i, i) = rng.normal();
                h(m + i, m + i) = h(i, i);
                for (int j = i + 1; j < m; ++j) {
                    Cd a(s * rng.normal(), s * rng.normal());
                    h(i, j) = a;
                    h(j, i) = std::conj(a);
                    h(m + i, m + j) = std::conj(a);
                    h(m + j, m + i) = a;
                }
                for (int j = i + 1; j < m; ++j) {
                    Cd b(s * rng.normal(), s * rng.normal());
                    h(i, m + j) = b;
                    h(j, m + i) = -b;
                    h(m + i, j) = -std::conj(b);
                    h(m + j, i) = std::conj(b);
                }
            }
        }

        auto shifted_det = [&](Cd kappa) {
            Mat<Cd> a = h;
            for (int i = 0; i < n; ++i) a(i, i) -= kappa;
            Cd dv = det<double>(a);
            if (quaternion && kappa.imag() == 0.0) {
                // real shift of a self-dual matrix: determinant is a perfect
                // square of a real polynomial
                if (std::abs(dv.imag()) > 1e-10 * std::abs(dv))
                    throw NumericError("self-dual determinant has an imaginary residue");
                dv = Cd(dv.real(), 0.0);
            }
            return dv;
        };

        Cd ratio = 1.0;
        for (const auto& k2 : *kappa2) ratio *= shifted_det(k2);
        for (const auto& k1 : *kappa1) ratio /= shifted_det(k1);
        MCAccum acc;
        acc.sum = ratio;
        acc.re2 = ratio.real() * ratio.real();
        acc.im2 = ratio.imag() * ratio.imag();
        return acc;
    }
};

} // namespace detail

// Matrix Monte Carlo; Gaussian ensembles only. ndim counts distinct
// eigenvalues (the beta = 4 matrix dimension is 2 ndim).
inline MCValue z_matrix_montecarlo(const Ensemble<double>& e, int ndim, const SpectralParams& p,
                                   MCSpec mc = {}, bool parallel = true) {
    auto t0 = std::chrono::steady_clock::now();
    p.validate();
    if (e.half_line())
        throw UnsupportedOracleError("matrix sampling implemented for the Gaussian ensembles");
    const int gamma = (e.beta() == 4) ? 2 : 1;
    if (ndim * gamma > 16) throw BudgetError("matrix Monte Carlo capped at dimension 16");
    if (ndim < 1) throw DimensionError("z_matrix_montecarlo needs ndim >= 1");

    detail::MCTerm term{&e, ndim, &p.kappa1, &p.kappa2, mc.seed};
    auto acc = block_tree_sum<detail::MCAccum>(mc.samples, term, parallel);
    MCValue out;
    const double n = static_cast<double>(mc.samples);
    out.mean = acc.sum / n;
    if (mc.samples > 1) {
        double vr = std::max(0.0, acc.re2 / n - out.mean.real() * out.mean.real());
        double vi = std::max(0.0, acc.im2 / n - out.mean.imag() * out.mean.imag());
        out.stderr_re = std::sqrt(vr / (n - 1.0));
        out.stderr_im = std::sqrt(vi / (n - 1.0));
    }
    out.samples = mc.samples;
    out.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

namespace ref {

inline MCValue z_matrix_montecarlo_serial(const Ensemble<double>& e, int ndim,
                                          const SpectralParams& p, MCSpec mc = {}) {
    detail::MCTerm term{&e, ndim, &p.kappa1, &p.kappa2, mc.seed};
    auto acc = sum_serial<detail::MCAccum>(mc.samples, term);
    MCValue out;
    const double n = static_cast<double>(mc.samples);
    out.mean = acc.sum / n;
    if (mc.samples > 1) {
        double vr = std::max(0.0, acc.re2 / n - out.mean.real() * out.mean.real());
        double vi = std::max(0.0, acc.im2 / n - out.mean.imag() * out.mean.imag());
        out.stderr_re = std::sqrt(vr / (n - 1.0));
        out.stderr_im = std::sqrt(vi / (n - 1.0));
    }
    out.samples = mc.samples;
    return out;
}

} // namespace ref

// ---------------------------------------------------------------------------
// eps-regularized confluent pair (beta = 4 oracle): the distributional pairing
// evaluated at (x, x + eps) with weight -W(x)/eps.

namespace detail {

template <class Phi>
std::complex<double> eps_pair(const Ensemble<double>& e, double eps, Phi&& phi) {
    if (e.beta() != 4)
        throw UnsupportedReductionError("confluent pair regularization is a beta=4 oracle");
    if (!(eps > 0.0)) throw NumericError("eps must be positive");
    const auto& r = e.outer_rule();
    std::complex<double> sum = 0.0;
    for (int i = 0; i < r.size(); ++i) sum += r.w[i] * phi(r.x[i], r.x[i] + eps);
    return -sum / eps;
}

} // namespace detail

inline std::complex<double> eps_confluent_moment_pair(const Ensemble<double>& e, int a, int b,
                                                      double eps) {
    return detail::eps_pair(e, eps, [&](double x, double y) {
        return std::complex<double>(std::pow(x, a - 1) * std::pow(y, b - 1) -
                                    std::pow(y, a - 1) * std::pow(x, b - 1));
    });
}

inline std::complex<double> eps_confluent_cauchy_pair(const Ensemble<double>& e,
                                                      std::complex<double> kappa, int b,
                                                      double eps) {
    return detail::eps_pair(e, eps, [&](double x, double y) {
        return std::pow(y, b - 1) / (kappa - x) - std::pow(x, b - 1) / (kappa - y);
    });
}

inline std::complex<double> eps_confluent_f_kernel(const Ensemble<double>& e,
                                                   std::complex<double> ka,
                                                   std::complex<double> kb, double eps) {
    auto val = detail::eps_pair(e, eps, [&](double x, double y) {
        return (x - y) / ((ka - x) * (ka - y) * (kb - x) * (kb - y));
    });
    return -(ka - kb) * val;
}

// Two-level Richardson extrapolation of first-order data at eps, eps/2, eps/4.
inline std::complex<double> richardson3(std::complex<double> v1, std::complex<double> v2,
                                        std::complex<double> v4) {
    std::complex<double> r12 = 2.0 * v2 - v1;
    std::complex<double> r24 = 2.0 * v4 - v2;
    return (4.0 * r24 - r12) / 3.0;
}

} // namespace pfrmt
