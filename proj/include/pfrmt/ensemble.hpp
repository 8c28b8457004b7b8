#pragma once

// Ensemble weight definitions and their distributional reductions: the single
// moments, antisymmetric pair moments, Cauchy transforms, and the pair kernel
// F that the Pfaffian formulas consume.
//
// beta = 1 is the ordered pair density W(x)W(y) on {x <= y}: all pair
// reductions are iterated quadrature with an inner cumulative integral,
// evaluated once per outer node grid by an adaptive Clenshaw-Curtis sweep over
// the segments between consecutive outer nodes (prefix sums are serial and
// deterministic; segments are computed in parallel).
//
// beta = 4 carries the confluent pair density; for an antisymmetric pair
// integrand phi(x, y) the pairing reduces to -int W(x) d/dy phi(x, y)|_{y=x},
// so every pair reduction collapses to a closed one-dimensional integral:
//   pair moment  (a,b):  (a-b) int W x^{a+b-3}
//   pair Cauchy  (k,b):  int W [ x^{b-1}/(k-x)^2 - (b-1) x^{b-2}/(k-x) ]
//   pair kernel F(p,q): -(p-q) int W / [(p-x)^2 (q-x)^2]
// The eps-regularized oracle for these limits lives in oracle.hpp.

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "pfrmt/errors.hpp"
#include "pfrmt/quadrature.hpp"
#include "pfrmt/reduction.hpp"
#include "pfrmt/skew.hpp"

namespace pfrmt {

enum class EnsembleId { gauss_beta1, gauss_beta4, laguerre_beta1, laguerre_beta4 };

inline const char* to_string(EnsembleId id) {
    switch (id) {
        case EnsembleId::gauss_beta1: return "gauss-beta1";
        case EnsembleId::gauss_beta4: return "gauss-beta4";
        case EnsembleId::laguerre_beta1: return "laguerre-beta1";
        case EnsembleId::laguerre_beta4: return "laguerre-beta4";
    }
    return "?";
}

inline EnsembleId parse_ensemble_id(const std::string& s) {
    if (s == "gauss-beta1") return EnsembleId::gauss_beta1;
    if (s == "gauss-beta4") return EnsembleId::gauss_beta4;
    if (s == "laguerre-beta1") return EnsembleId::laguerre_beta1;
    if (s == "laguerre-beta4") return EnsembleId::laguerre_beta4;
    throw ConfigError("unknown ensemble id '" + s + "'", "ensemble");
}

template <class R>
class Ensemble {
  public:
    using C = cplx<R>;

    static Ensemble make(EnsembleId id, int nu = 0, int nodes = 200) {
        Ensemble e;
        e.state_ = std::make_shared<State>();
        State& st = *e.state_;
        st.id = id;
        st.nu = nu;
        st.nodes = nodes;
        st.beta = (id == EnsembleId::gauss_beta1 || id == EnsembleId::laguerre_beta1) ? 1 : 4;
        st.laguerre = (id == EnsembleId::laguerre_beta1 || id == EnsembleId::laguerre_beta4);
        if (st.laguerre && nu < 0)
            throw DivergentMomentError("laguerre ensembles need nu >= 0");
        if (!st.laguerre) {
            // W(E) = e^{-E^2/2}: rescaled Gauss-Hermite
            auto gh = gauss_hermite<R>(nodes);
            R s = sqrt_two();
            st.rule.x.resize(gh.x.size());
            st.rule.w.resize(gh.w.size());
            for (std::size_t i = 0; i < gh.x.size(); ++i) {
                st.rule.x[i] = s * gh.x[i];
                st.rule.w[i] = s * gh.w[i];
            }
            st.twice_alpha = 0;
        } else {
            st.twice_alpha = (st.beta == 1) ? nu - 1 : 2 * (nu + 1);
            st.rule = gauss_laguerre<R>(nodes, st.twice_alpha);
        }
        return e;
    }

    EnsembleId id() const { return state_->id; }
    int beta() const { return state_->beta; }
    int nu() const { return state_->nu; }
    int node_count() const { return state_->nodes; }
    bool half_line() const { return state_->laguerre; }
    const Rule1D<R>& outer_rule() const { return state_->rule; }

    R weight(R t) const {
        using std::exp;
        const State& st = *state_;
        if (!st.laguerre) return exp(-t * t / R(2));
        return half_power(t, st.twice_alpha) * exp(-t);
    }

    // --- reductions ---------------------------------------------------------

    // int W(E) E^{a-1} dE; the odd-dimensional border, beta = 1 only.
    R moment_single(int a) const {
        if (beta() == 4)
            throw UnsupportedReductionError("single moments only enter the beta=1 reductions");
        return raw_moment(a - 1);
    }

    // Antisymmetric pair moment.
    R moment_pair(int a, int b) const {
        if (a == b) return R(0);
        if (beta() == 4) return (R(a) - R(b)) * raw_moment(a + b - 3);
        auto tab = beta1_table(std::max(a, b) - 1, {});
        const State& st = *state_;
        R sum(0);
        for (int i = 0; i < st.rule.size(); ++i) {
            R y = st.rule.x[i];
            R ia = real_cum(*tab, i, a - 1);
            R ib = real_cum(*tab, i, b - 1);
            sum += st.rule.w[i] * (powi(y, b - 1) * ia - powi(y, a - 1) * ib);
        }
        return sum;
    }

    // int W(E) / (kappa - E) dE
    C cauchy_single(C kappa) const {
        check_off_support(kappa);
        const State& st = *state_;
        C sum{};
        for (int i = 0; i < st.rule.size(); ++i)
            sum += C(st.rule.w[i]) / (kappa - C(st.rule.x[i]));
        return sum;
    }

    // Pair Cauchy transform: entry b of the kernel vector G at shift kappa.
    C cauchy_pair(C kappa, int b) const {
        check_off_support(kappa);
        const State& st = *state_;
        if (beta() == 4) {
            C sum{};
            for (int i = 0; i < st.rule.size(); ++i) {
                R x = st.rule.x[i];
                C pole = C(R(1)) / (kappa - C(x));
                C term = C(powi(x, b - 1)) * pole * pole;
                if (b >= 2) term -= C(R(b - 1) * powi(x, b - 2)) * pole;
                sum += C(st.rule.w[i]) * term;
            }
            return sum;
        }
        auto tab = beta1_table(b - 1, {kappa});
        int jf = kappa_family(*tab, kappa);
        C sum{};
        for (int i = 0; i < st.rule.size(); ++i) {
            R y = st.rule.x[i];
            C jcum = tab->cum[i][jf];
            R ib = real_cum(*tab, i, b - 1);
            sum += C(st.rule.w[i]) * (C(powi(y, b - 1)) * jcum - C(ib) / (kappa - C(y)));
        }
        return sum;
    }

    // Antisymmetric pair kernel F.
    C f_kernel(C ka, C kb) const {
        check_off_support(ka);
        check_off_support(kb);
        const State& st = *state_;
        if (beta() == 4) {
            C sum{};
            for (int i = 0; i < st.rule.size(); ++i) {
                C pa = ka - C(st.rule.x[i]);
                C pb = kb - C(st.rule.x[i]);
                sum += C(st.rule.w[i]) / (pa * pa * pb * pb);
            }
            return -(ka - kb) * sum;
        }
        if (ka == kb) return C{};
        auto tab = beta1_table(0, {ka, kb});
        int ja = kappa_family(*tab, ka);
        int jb = kappa_family(*tab, kb);
        C sum{};
        for (int i = 0; i < st.rule.size(); ++i) {
            R y = st.rule.x[i];
            sum += C(st.rule.w[i]) *
                   (tab->cum[i][ja] / (kb - C(y)) - tab->cum[i][jb] / (ka - C(y)));
        }
        return sum;
    }

    // Raw monomial moment int W x^p (internal to the beta=4 closed forms and
    // useful for scale estimates).
    R raw_moment(int p) const {
        const State& st = *state_;
        std::lock_guard<std::mutex> lock(st.mu);
        while (static_cast<int>(st.raw_moments.size()) <= p) {
            int q = static_cast<int>(st.raw_moments.size());
            R s(0);
            for (int i = 0; i < st.rule.size(); ++i) s += st.rule.w[i] * powi(st.rule.x[i], q);
            st.raw_moments.push_back(s);
        }
        return st.raw_moments[p];
    }

  private:
    static R sqrt_two() {
        using std::sqrt;
        return sqrt(R(2));
    }

    // t^(ta/2) for integer/half-integer exponents, t >= 0.
    static R half_power(R t, int ta) {
        using std::sqrt;
        if (ta % 2 == 0) return powi(t, ta / 2);
        if (ta > 0) return powi(t, ta / 2) * sqrt(t);
        return powi(t, -((-ta + 1) / 2)) * sqrt(t);  // ta = -1: 1/sqrt(t)
    }

    void check_off_support(C kappa) const {
        using pfrmt::imag; using pfrmt::real;
        using std::imag; using std::real;
        if (to_double(imag(kappa)) != 0.0) return;
        if (half_line() && to_double(real(kappa)) < 0.0) return;
        throw OnSupportError("shift lies on the ensemble support");
    }

    struct CumTable {
        int pmax = -1;
        std::vector<C> kappas;
        // cum[i][f]: integral of family f over (support lower end, outer node i].
        // Families: f in [0, pmax]: W t^f; then one per kappa: W/(kappa - t).
        std::vector<std::vector<C>> cum;
    };

    struct State {
        EnsembleId id;
        int beta = 1;
        int nu = 0;
        int nodes = 200;
        bool laguerre = false;
        int twice_alpha = 0;
        Rule1D<R> rule;
        mutable std::mutex mu;
        mutable std::vector<R> raw_moments;
        mutable std::shared_ptr<const CumTable> table;
    };

    static R real_cum(const CumTable& tab, int i, int p) {
        using pfrmt::real;
        using std::real;
        return real(tab.cum[i][p]);
    }

    static int kappa_family(const CumTable& tab, C kappa) {
        for (std::size_t j = 0; j < tab.kappas.size(); ++j)
            if (tab.kappas[j] == kappa) return tab.pmax + 1 + static_cast<int>(j);
        throw NumericError("kappa family missing from cumulative table");
    }

    // Snapshot of the cumulative table covering powers <= pmax and the given
    // kappas; rebuilt (with the union of previous requests) when it falls
    // short. Readers keep the shared_ptr, so a rebuild never invalidates them.
    std::shared_ptr<const CumTable> beta1_table(int pmax, std::vector<C> kappas) const {
        const State& st = *state_;
        std::lock_guard<std::mutex> lock(st.mu);
        std::shared_ptr<const CumTable> cur = st.table;

        std::vector<C> merged = cur ? cur->kappas : std::vector<C>{};
        bool covered = cur && pmax <= cur->pmax;
        for (const auto& k : kappas) {
            bool found = false;
            for (const auto& have : merged) found = found || have == k;
            if (!found) {
                merged.push_back(k);
                covered = false;
            }
        }
        if (covered) return cur;

        auto next = std::make_shared<CumTable>();
        build_table(*next, std::max(pmax, cur ? cur->pmax : 0), std::move(merged));
        st.table = next;
        return next;
    }

    void build_table(CumTable& tab, int pmax, std::vector<C> kappas) const {
        const State& st = *state_;
        const int n = st.rule.size();
        const int nf = pmax + 1 + static_cast<int>(kappas.size());
        const R lo = st.laguerre ? R(0) : st.rule.x[0] - R(10);

        // family scales for the adaptive error test
        std::vector<double> scales(nf, 1.0);
        {
            std::vector<R> mp(pmax + 1, R(0));
            for (int i = 0; i < n; ++i) {
                using std::fabs;
                R ax = fabs(st.rule.x[i]);
                R t = st.rule.w[i];
                for (int p = 0; p <= pmax; ++p) {
                    mp[p] += t;
                    t *= ax;
                }
            }
            for (int p = 0; p <= pmax; ++p) scales[p] = std::max(to_double(mp[p]), 1e-30);
            for (std::size_t j = 0; j < kappas.size(); ++j)
                scales[pmax + 1 + j] = std::max(to_double(mp[0]), 1e-30);
        }

        auto families_weighted = [&](R t, R wval, C* out) {
            R tp = wval;
            for (int p = 0; p <= pmax; ++p) {
                out[p] = C(tp);
                tp *= t;
            }
            for (std::size_t j = 0; j < kappas.size(); ++j)
                out[pmax + 1 + j] = C(wval) / (kappas[j] - C(t));
        };
        typename AdaptiveCC<R>::Fn families = [&](R t, C* out) {
            families_weighted(t, weight(t), out);
        };
        // On the half line the first segment starts at the endpoint; integrate
        // in u = sqrt(t), folding the Jacobian into the weight so fractional
        // powers become smooth: W(u^2) 2u = 2 u^{twice_alpha + 1} e^{-u^2}.
        typename AdaptiveCC<R>::Fn families_u = [&](R u, C* out) {
            using std::exp;
            R wu = R(2) * powi(u, st.twice_alpha + 1) * exp(-u * u);
            families_weighted(u * u, wu, out);
        };

        const double tol = scalar_traits<R>::quad_rel_tol;
        std::vector<std::vector<C>> seg(n, std::vector<C>(nf, C{}));
        AdaptiveCC<R> cc;
        parallel_for(n, [&](std::int64_t i) {
            R a = (i == 0) ? lo : st.rule.x[i - 1];
            R b = st.rule.x[static_cast<std::size_t>(i)];
            if (i == 0 && st.laguerre) {
                using std::sqrt;
                cc.integrate(sqrt(a), sqrt(b), nf, families_u, seg[i].data(), tol, scales.data());
            } else {
                cc.integrate(a, b, nf, families, seg[i].data(), tol, scales.data());
            }
        });

        tab.pmax = pmax;
        tab.kappas = std::move(kappas);
        tab.cum.assign(n, std::vector<C>(nf, C{}));
        for (int i = 0; i < n; ++i)
            for (int f = 0; f < nf; ++f)
                tab.cum[i][f] = (i == 0 ? C{} : tab.cum[i - 1][f]) + seg[i][f];
    }

    std::shared_ptr<State> state_;
};

// Moment matrix of the reductions: for beta = 1 and odd d the matrix is
// bordered to (d+1) with single moments (corner zero); beta = 4 has no border.
template <class R>
struct MomentMatrix {
    int d = 0;
    bool bordered = false;
    SkewMatrix<R> matrix;
};

template <class R>
MomentMatrix<R> build_moment_matrix(const Ensemble<R>& e, int d) {
    using C = cplx<R>;
    MomentMatrix<R> out;
    out.d = d;
    out.bordered = (e.beta() == 1) && (d % 2 == 1);
    const int dim = d + (out.bordered ? 1 : 0);
    out.matrix = SkewMatrix<R>(dim);
    for (int a = 1; a <= d; ++a)
        for (int b = a + 1; b <= d; ++b)
            out.matrix.set(a - 1, b - 1, C(e.moment_pair(a, b)));
    if (out.bordered)
        for (int a = 1; a <= d; ++a) out.matrix.set(a - 1, d, C(-e.moment_single(a)));
    return out;
}

} // namespace pfrmt
