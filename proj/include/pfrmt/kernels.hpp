#pragma once

// Assembly of the master objects (moment matrix, Cauchy vector G, monomial
// row K, pair kernel F) into the characteristic-polynomial-ratio average Z.
//
// With m integration variables (m = 2N+1 "odd sector", carrying the single-
// variable density h; m = 2N "even sector") and shift counts k1 (denominator)
// and k2 (numerator), let d = k2 - k1 + m and
//   sqrtB = Delta(kappa1) Delta(kappa2) / prod(kappa_a1 - kappa_b2).
// Three regimes partition the input space:
//
//  even-sum (k1+k2 even, d > 0):
//      Z = pre(N) Pf(M_d) Pf[ K11 | K12 ; . | K22 ] / sqrtB
//  odd-sum  (k1+k2 odd, d > 0), kernels taken at dt = d+1:
//      Z = s pre(N) Pf(M_dt) Pf[ K11 | w11 | K12 ; . | 0 | w12 ; . | . | K22 ] / sqrtB
//      with border columns w11(kappa) = (K M^-1)_dt, w12(kappa) = (M^-1 G^T)_dt
//      (the closed large-shift limit of an added numerator column) and
//      s = +1 odd sector, -1 even sector.
//  sparse  (d <= 0): Z = (-1)^N N! Pf[S] / sqrtB where S couples kappa1 only
//      to the Cauchy poles, the h transform, -d monomial rows, and F.
//
// pre(N) = (-1)^{N+1} N! in the odd sector and (-1)^N N! in the even sector.
// The assembled route evaluates the pre-Schur form (one big Pfaffian with the
// moment matrix as a trailing block) and must agree with the kernel route;
// that equality is a genuine two-path numerical check (elimination vs
// inversion) used by the consistency report.

#include <chrono>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include "pfrmt/berezinian.hpp"
#include "pfrmt/ensemble.hpp"
#include "pfrmt/skew.hpp"

namespace pfrmt {

enum class Sector { odd, even };
enum class Regime { even_sum, odd_sum, sparse };
enum class Route { kernel, assembled };

inline const char* to_string(Regime r) {
    switch (r) {
        case Regime::even_sum: return "even-sum";
        case Regime::odd_sum: return "odd-sum";
        case Regime::sparse: return "sparse";
    }
    return "?";
}

struct ZDiagnostics {
    Regime regime = Regime::even_sum;
    Route route = Route::kernel;
    int d = 0;          // k2 - k1 + m
    int d_kernel = 0;   // moment-matrix order used (d, or d+1 in the odd-sum regime)
    int pf_dim = 0;     // dimension of the final Pfaffian
    double rcond_moment = 0.0;
    std::complex<double> pf_moment{};
    bool sparse_structure_ok = true;
    int goe_parity_sign = 1;
    double eval_ms = 0.0;
};

template <class R>
struct ZResult {
    cplx<R> value{};
    ZDiagnostics diag;
};

template <class R>
struct ZAverage {
    cplx<R> raw{};         // matrix-average convention, symmetry constants included
    cplx<R> normalized{};  // Z(kappa) / Z(0/0), convention-free
    cplx<R> z00{};
    ZDiagnostics diag;
};

struct ZOptions {
    Route route = Route::kernel;
    // Test hook: flips the even-sum regime prefactor so the verification suite
    // can prove it would catch a wrong global sign.
    bool flip_even_sum_sign = false;
};

// ---------------------------------------------------------------------------

template <class R>
class KernelSet {
  public:
    using C = cplx<R>;

    KernelSet(const Ensemble<R>& e, int d, Sector sector) : e_(e), d_(d), sector_(sector) {
        if (d < 1) throw DimensionError("kernel set needs d >= 1");
        if (e.beta() == 4 && sector == Sector::odd)
            throw UnsupportedReductionError("quaternionic ensembles have no odd sector");
        if (e.beta() == 4 && d % 2 == 1)
            throw RegimeError("quaternionic moment matrix of odd order is singular");
        mm_ = build_moment_matrix(e, d);
        InverseDiagnostics<R> idiag;
        minv_ = skew_inverse(mm_.matrix, &idiag);
        rcond_ = idiag.rcond;
        pf_m_ = pfaffian(mm_.matrix);
    }

    const Ensemble<R>& ensemble() const { return e_; }
    int d() const { return d_; }
    int dim() const { return mm_.matrix.dim(); }
    Sector sector() const { return sector_; }
    const MomentMatrix<R>& moment() const { return mm_; }
    const SkewMatrix<R>& minv() const { return minv_; }
    C pf_moment() const { return pf_m_; }
    double rcond() const { return rcond_; }

    std::vector<C> k_row(C kappa) const {
        std::vector<C> row(dim(), C{});
        C p = C(R(1));
        for (int n = 0; n < d_; ++n) {
            row[n] = p;
            p *= kappa;
        }
        return row;  // bordered layouts keep the trailing zero
    }

    std::vector<C> g_vec(C kappa) const {
        {
            std::lock_guard<std::mutex> lock(mu_);
            auto it = gcache_.find(key(kappa));
            if (it != gcache_.end()) return it->second;
        }
        std::vector<C> g(dim(), C{});
        for (int n = 0; n < d_; ++n) g[n] = e_.cauchy_pair(kappa, n + 1);
        if (mm_.bordered) g[d_] = -e_.cauchy_single(kappa);
        std::lock_guard<std::mutex> lock(mu_);
        gcache_.emplace(key(kappa), g);
        return g;
    }

    C k11(C ka2, C kb2) const { return bilinear(k_row(ka2), k_row(kb2)); }

    C k12(C kb1, C ka2) const {
        C diff = kb1 - ka2;
        if (to_double(pfrmt_abs(diff)) == 0.0)
            throw DegenerateShiftError("coincident kappa1/kappa2 arguments in K12");
        return C(R(1)) / diff + bilinear(k_row(ka2), g_vec(kb1));
    }

    C k22(C ka1, C kb1) const {
        return e_.f_kernel(ka1, kb1) + bilinear(g_vec(ka1), g_vec(kb1));
    }

    // Border entries of the odd-sum regime: large-shift limits of an appended
    // numerator column of K11 / K12.
    C w11(C ka2) const {
        auto row = k_row(ka2);
        C sum{};
        for (int n = 0; n < dim(); ++n) sum += row[n] * minv_(n, d_ - 1);
        return sum;
    }

    C w12(C kb1) const {
        auto g = g_vec(kb1);
        C sum{};
        for (int n = 0; n < dim(); ++n) sum += minv_(d_ - 1, n) * g[n];
        return sum;
    }

  private:
    static double pfrmt_abs(C v) {
        using std::abs;
        return to_double(abs(v));
    }

    static std::pair<double, double> key(C kappa) {
        auto z = to_std_complex(kappa);
        return {z.real(), z.imag()};
    }

    C bilinear(const std::vector<C>& u, const std::vector<C>& v) const {
        C sum{};
        for (int i = 0; i < dim(); ++i) {
            if (u[i] == C{}) continue;
            C row{};
            for (int j = 0; j < dim(); ++j) row += minv_(i, j) * v[j];
            sum += u[i] * row;
        }
        return sum;
    }

    Ensemble<R> e_;
    int d_;
    Sector sector_;
    MomentMatrix<R> mm_;
    SkewMatrix<R> minv_;
    C pf_m_{};
    double rcond_ = 0.0;
    mutable std::mutex mu_;
    mutable std::map<std::pair<double, double>, std::vector<C>> gcache_;
};

namespace detail {

template <class R>
R regime_prefactor(Sector sector, int n_pairs) {
    R f = factorial<R>(n_pairs);
    bool negative = (sector == Sector::odd) ? (n_pairs % 2 == 0) : (n_pairs % 2 == 1);
    return negative ? -f : f;
}

// Shift-parity factor of the d > 0 regimes: the mixed Cauchy-Vandermonde
// extension for shape (k1, k2 + m) carries a global sign (-1)^{k1 m}, trivial
// in the even sector (m even) and equal to (-1)^{k1} in the odd sector.
// Pinned against direct integration of the master integrand for k1 <= 3 in
// both regimes; the sparse regime has its own derivation and needs no factor.
template <class R>
R shift_parity_sign(Sector sector, int k1) {
    return (sector == Sector::odd && k1 % 2 == 1) ? R(-1) : R(1);
}

template <class R>
cplx<R> pole_entry(cplx<R> kb1, cplx<R> ka2) {
    using std::abs;
    cplx<R> diff = kb1 - ka2;
    if (to_double(abs(diff)) == 0.0)
        throw DegenerateShiftError("kappa1 and kappa2 entries coincide");
    return cplx<R>(R(1)) / diff;
}

} // namespace detail

// Raw master-integral average. N counts the coupled pairs; the odd sector adds
// the single h variable (m = 2N+1) and is only available for beta = 1.
template <class R>
ZResult<R> z_pfaffian(const Ensemble<R>& e, int n_pairs, const SpectralParams& p, Sector sector,
                      const ZOptions& opts = {}) {
    using C = cplx<R>;
    auto t0 = std::chrono::steady_clock::now();
    p.validate();
    if (n_pairs < 0) throw DimensionError("negative pair count");
    if (sector == Sector::odd && e.beta() == 4)
        throw UnsupportedReductionError("quaternionic ensembles have no odd sector");

    const int k1 = p.k1(), k2 = p.k2();
    const int m = 2 * n_pairs + (sector == Sector::odd ? 1 : 0);
    const int d = k2 - k1 + m;
    auto kap1 = to_cplx_vec<R>(p.kappa1);
    auto kap2 = to_cplx_vec<R>(p.kappa2);
    C sqrtB = sqrt_ber_ratio<R>(kap1, kap2);

    ZResult<R> out;
    out.diag.d = d;
    out.diag.route = opts.route;

    if (d > 0 && (k1 + k2) % 2 == 0) {
        out.diag.regime = Regime::even_sum;
        if ((d % 2 == 1) != (sector == Sector::odd))
            throw RegimeError("d parity inconsistent with sector");
        KernelSet<R> ks(e, d, sector);
        out.diag.d_kernel = d;
        out.diag.rcond_moment = ks.rcond();
        out.diag.pf_moment = to_std_complex(ks.pf_moment());
        R pre = detail::regime_prefactor<R>(sector, n_pairs) *
                detail::shift_parity_sign<R>(sector, k1);
        if (opts.flip_even_sum_sign) pre = -pre;

        if (opts.route == Route::kernel) {
            SkewMatrix<R> pa(k1 + k2);
            for (int a = 0; a < k2; ++a)
                for (int b = a + 1; b < k2; ++b) pa.set(a, b, ks.k11(kap2[a], kap2[b]));
            for (int a = 0; a < k2; ++a)
                for (int b = 0; b < k1; ++b) pa.set(a, k2 + b, ks.k12(kap1[b], kap2[a]));
            for (int a = 0; a < k1; ++a)
                for (int b = a + 1; b < k1; ++b)
                    pa.set(k2 + a, k2 + b, ks.k22(kap1[a], kap1[b]));
            out.diag.pf_dim = pa.dim();
            out.value = pre * ks.pf_moment() * pfaffian(pa) / sqrtB;
        } else {
            const int dm = ks.dim();
            SkewMatrix<R> big(k2 + k1 + dm);
            for (int a = 0; a < k2; ++a)
                for (int b = 0; b < k1; ++b)
                    big.set(a, k2 + b, detail::pole_entry<R>(kap1[b], kap2[a]));
            for (int a = 0; a < k2; ++a) {
                auto row = ks.k_row(kap2[a]);
                for (int n = 0; n < dm; ++n) big.set(a, k2 + k1 + n, row[n]);
            }
            for (int a = 0; a < k1; ++a)
                for (int b = a + 1; b < k1; ++b)
                    big.set(k2 + a, k2 + b, e.f_kernel(kap1[a], kap1[b]));
            for (int a = 0; a < k1; ++a) {
                auto g = ks.g_vec(kap1[a]);
                for (int n = 0; n < dm; ++n) big.set(k2 + a, k2 + k1 + n, g[n]);
            }
            for (int i = 0; i < dm; ++i)
                for (int j = i + 1; j < dm; ++j)
                    big.set(k2 + k1 + i, k2 + k1 + j, ks.moment().matrix(i, j));
            out.diag.pf_dim = big.dim();
            out.value = pre * pfaffian(big) / sqrtB;
        }
    } else if (d > 0) {
        out.diag.regime = Regime::odd_sum;
        const int dt = d + 1;
        KernelSet<R> ks(e, dt, sector);
        out.diag.d_kernel = dt;
        out.diag.rcond_moment = ks.rcond();
        out.diag.pf_moment = to_std_complex(ks.pf_moment());
        R pre = detail::regime_prefactor<R>(sector, n_pairs) *
                detail::shift_parity_sign<R>(sector, k1);
        if (sector == Sector::even) pre = -pre;

        SkewMatrix<R> pb(k2 + 1 + k1);
        const int r = k2;
        for (int a = 0; a < k2; ++a)
            for (int b = a + 1; b < k2; ++b) pb.set(a, b, ks.k11(kap2[a], kap2[b]));
        for (int a = 0; a < k2; ++a) pb.set(a, r, ks.w11(kap2[a]));
        for (int a = 0; a < k2; ++a)
            for (int b = 0; b < k1; ++b) pb.set(a, r + 1 + b, ks.k12(kap1[b], kap2[a]));
        for (int b = 0; b < k1; ++b) pb.set(r, r + 1 + b, ks.w12(kap1[b]));
        for (int a = 0; a < k1; ++a)
            for (int b = a + 1; b < k1; ++b)
                pb.set(r + 1 + a, r + 1 + b, ks.k22(kap1[a], kap1[b]));
        out.diag.pf_dim = pb.dim();
        out.value = pre * ks.pf_moment() * pfaffian(pb) / sqrtB;
    } else {
        out.diag.regime = Regime::sparse;
        const int nm = -d;
        const int nh = (sector == Sector::odd) ? 1 : 0;
        const int o_h = k2, o_m = k2 + nh, o_1 = k2 + nh + nm;
        SkewMatrix<R> s(o_1 + k1);
        for (int a = 0; a < k2; ++a)
            for (int b = 0; b < k1; ++b)
                s.set(a, o_1 + b, detail::pole_entry<R>(kap1[b], kap2[a]));
        if (nh)
            for (int b = 0; b < k1; ++b) s.set(o_h, o_1 + b, e.cauchy_single(kap1[b]));
        for (int a = 0; a < nm; ++a)
            for (int b = 0; b < k1; ++b) s.set(o_m + a, o_1 + b, powi_c<R, C>(kap1[b], a));
        for (int a = 0; a < k1; ++a)
            for (int b = a + 1; b < k1; ++b) s.set(o_1 + a, o_1 + b, e.f_kernel(kap1[a], kap1[b]));

        // Everything outside the kappa1 couplings must be exactly zero.
        bool ok = true;
        for (int i = 0; i < o_1 && ok; ++i)
            for (int j = i + 1; j < o_1; ++j)
                if (!(s(i, j) == C{})) { ok = false; break; }
        out.diag.sparse_structure_ok = ok;
        if (!ok) throw RegimeError("sparse regime matrix has occupied zero blocks");

        out.diag.pf_dim = s.dim();
        R pre = factorial<R>(n_pairs);
        if (n_pairs % 2 == 1) pre = -pre;
        out.value = pre * pfaffian(s) / sqrtB;
    }

    out.diag.eval_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

namespace detail {

template <class R>
R goe_constant(int ndim) {  // prod_{j=1..ndim} pi^{(j-1)/2} / Gamma(j/2), sign handled separately
    using std::sqrt;
    R sqrt_pi = sqrt(pi_v<R>());
    R c(1);
    for (int j = 1; j <= ndim; ++j) c *= powi(sqrt_pi, j - 1) / gamma_half<R>(j);
    return c;
}

template <class R>
R gse_constant(int n) {  // (-1)^{n(n-1)/2} prod_{j=1..n} pi^{2(j-1)} / Gamma(2j)
    R c(1);
    R pi = pi_v<R>();
    for (int j = 1; j <= n; ++j) c *= powi(pi, 2 * (j - 1)) / factorial<R>(2 * j - 1);
    if ((n * (n - 1) / 2) % 2 == 1) c = -c;
    return c;
}

} // namespace detail

// Orthogonally invariant average over ndim-dimensional real symmetric
// matrices. The normalized value carries the parity sign (-1)^{chi k1} that
// matches the det(H - kappa) orientation of the matrix integral.
template <class R>
ZAverage<R> z_goe(const Ensemble<R>& e, int ndim, const SpectralParams& p,
                  const ZOptions& opts = {}) {
    if (e.beta() != 1) throw UnsupportedReductionError("z_goe needs a beta=1 ensemble");
    if (ndim < 1) throw DimensionError("z_goe needs ndim >= 1");
    const int half = ndim / 2, chi = ndim % 2;
    Sector sector = chi ? Sector::odd : Sector::even;

    ZAverage<R> out;
    auto z = z_pfaffian(e, half, p, sector, opts);
    auto z00 = z_pfaffian(e, half, SpectralParams{}, sector, opts);
    int psign = (chi * p.k1()) % 2 ? -1 : 1;
    out.diag = z.diag;
    out.diag.goe_parity_sign = psign;
    out.z00 = z00.value;
    out.normalized = R(psign) * z.value / z00.value;
    out.raw = R(psign) * detail::goe_constant<R>(ndim) / factorial<R>(half) * z.value;
    return out;
}

// Unitary-symplectically invariant average; characteristic polynomials run
// over 2n-dimensional self-dual matrices with doubly degenerate spectra.
template <class R>
ZAverage<R> z_gse(const Ensemble<R>& e, int n, const SpectralParams& p,
                  const ZOptions& opts = {}) {
    if (e.beta() != 4) throw UnsupportedReductionError("z_gse needs a beta=4 ensemble");
    if (n < 1) throw DimensionError("z_gse needs n >= 1");
    ZAverage<R> out;
    auto z = z_pfaffian(e, n, p, Sector::even, opts);
    auto z00 = z_pfaffian(e, n, SpectralParams{}, Sector::even, opts);
    out.diag = z.diag;
    out.z00 = z00.value;
    out.normalized = z.value / z00.value;
    out.raw = detail::gse_constant<R>(n) / factorial<R>(n) * z.value;
    return out;
}

// ---------------------------------------------------------------------------
// Consistency reports

struct ConsistencyReport {
    double max_rel_dev = 0.0;
    double dev_k11 = 0.0, dev_k12 = 0.0, dev_k22 = 0.0;
    bool pass(double tol) const { return max_rel_dev < tol; }
};

// Checks the kernel <-> generating-function relations by evaluating each
// kernel from the moment-matrix bilinear form and, independently, from the
// assembled-route Z at shifted shape parameters, on a 3x3 grid of kappa pairs.
template <class R>
ConsistencyReport kernel_consistency(const Ensemble<R>& e, int n_pairs,
                                     Sector sector = Sector::even) {
    using C = cplx<R>;
    if (e.beta() == 4) sector = Sector::even;
    const int m = 2 * n_pairs + (sector == Sector::odd ? 1 : 0);

    ConsistencyReport rep;
    auto record = [&](double& slot, C kernel_side, C z_side) {
        double dev = rel_dev(to_std_complex(kernel_side), to_std_complex(z_side));
        slot = std::max(slot, dev);
        rep.max_rel_dev = std::max(rep.max_rel_dev, dev);
    };

    const std::complex<double> grid_a[3] = {{0.0, 1.0}, {0.7, -0.9}, {-1.1, 0.6}};
    const std::complex<double> grid_b[3] = {{0.4, 1.3}, {-0.8, -0.7}, {1.5, 0.8}};
    ZOptions asm_route;
    asm_route.route = Route::assembled;

    // K11 at order d = m + 2 against Z_{(0/2)} with m variables.
    {
        KernelSet<R> ks(e, m + 2, sector);
        R pre = detail::regime_prefactor<R>(sector, n_pairs);
        for (auto za : grid_a)
            for (auto zb : grid_b) {
                auto ka = make_cplx<R>(za.real(), za.imag());
                auto kb = make_cplx<R>(zb.real(), zb.imag());
                auto z = z_pfaffian(e, n_pairs, SpectralParams({}, {za, zb}), sector, asm_route);
                C z_side = (ka - kb) * z.value / (pre * ks.pf_moment());
                record(rep.dev_k11, ks.k11(ka, kb), z_side);
            }
    }
    // K12 at order d = m against Z_{(1/1)} (one denominator shift: the
    // shift-parity factor enters).
    {
        KernelSet<R> ks(e, m, sector);
        R pre = detail::regime_prefactor<R>(sector, n_pairs) *
                detail::shift_parity_sign<R>(sector, 1);
        for (auto za : grid_a)
            for (auto zb : grid_b) {
                auto k1v = make_cplx<R>(za.real(), za.imag());
                auto k2v = make_cplx<R>(zb.real(), zb.imag());
                auto z = z_pfaffian(e, n_pairs, SpectralParams({za}, {zb}), sector, asm_route);
                C z_side = z.value / (pre * ks.pf_moment() * (k1v - k2v));
                record(rep.dev_k12, ks.k12(k1v, k2v), z_side);
            }
    }
    // K22 at order d = m - 2 against Z_{(2/0)} (needs d >= 1).
    if (m - 2 >= 1 && !(e.beta() == 4 && (m - 2) % 2 == 1)) {
        KernelSet<R> ks(e, m - 2, sector);
        R pre = detail::regime_prefactor<R>(sector, n_pairs);
        for (auto za : grid_a)
            for (auto zb : grid_b) {
                auto ka = make_cplx<R>(za.real(), za.imag());
                auto kb = make_cplx<R>(zb.real(), zb.imag());
                auto z = z_pfaffian(e, n_pairs, SpectralParams({za, zb}, {}), sector, asm_route);
                C z_side = (ka - kb) * z.value / (pre * ks.pf_moment());
                record(rep.dev_k22, ks.k22(ka, kb), z_side);
            }
    }
    return rep;
}

struct LimitTrickReport {
    std::vector<double> kappa02;
    std::vector<double> rel_dev;   // finite-shift value vs closed border formula
    double order = 0.0;            // fitted convergence order in 1/kappa02
    std::complex<double> closed{};
};

// Finite large-shift check of the odd-sum border construction: appending a
// numerator shift kappa02 and rescaling must converge first order in
// 1/kappa02 to the closed odd-sum value.
template <class R>
LimitTrickReport limit_trick_check(const Ensemble<R>& e, int n_pairs, const SpectralParams& p,
                                   Sector sector,
                                   std::vector<double> kappa02 = {1e2, 1e3, 1e4}) {
    if ((p.k1() + p.k2()) % 2 == 0)
        throw RegimeError("limit trick check applies to odd k1+k2");
    const int m = 2 * n_pairs + (sector == Sector::odd ? 1 : 0);

    LimitTrickReport rep;
    auto closed = z_pfaffian(e, n_pairs, p, sector);
    rep.closed = to_std_complex(closed.value);
    for (double k0 : kappa02) {
        SpectralParams ext = p;
        ext.kappa2.push_back({k0, 0.0});
        auto z = z_pfaffian(e, n_pairs, ext, sector);
        cplx<R> scaled = z.value / powi<R>(R(k0), m);
        if (sector == Sector::odd) scaled = -scaled;
        rep.kappa02.push_back(k0);
        rep.rel_dev.push_back(
            rel_dev(to_std_complex(scaled), rep.closed));
    }
    if (rep.rel_dev.size() >= 2) {
        double num = 0.0, cnt = 0.0;
        for (std::size_t i = 0; i + 1 < rep.rel_dev.size(); ++i) {
            if (rep.rel_dev[i + 1] <= 0 || rep.rel_dev[i] <= 0) continue;
            double ratio = rep.kappa02[i + 1] / rep.kappa02[i];
            num += std::log(rep.rel_dev[i] / rep.rel_dev[i + 1]) / std::log(ratio);
            cnt += 1.0;
        }
        rep.order = cnt > 0 ? num / cnt : 0.0;
    }
    return rep;
}

} // namespace pfrmt
