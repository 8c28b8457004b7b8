#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "test_common.hpp"

#include "pfrmt/ensemble.hpp"
#include "reduction_oracles.hpp"

using namespace pfrmt;
using pfrmt::test::close_rel;
using pfrmt::test::ordered_gauss_pair;
using pfrmt::test::ordered_laguerre_pair;
using C = std::complex<double>;

namespace {

const double kSqrt2Pi = std::sqrt(2.0 * 3.14159265358979323846);
const double kSqrtPi = std::sqrt(3.14159265358979323846);

Ensemble<double> gauss1() { return Ensemble<double>::make(EnsembleId::gauss_beta1); }
Ensemble<double> gauss4() { return Ensemble<double>::make(EnsembleId::gauss_beta4); }

double dfact(int n) {  // (n)!! with (-1)!! = 1
    double r = 1.0;
    for (int k = n; k >= 2; k -= 2) r *= k;
    return r;
}

} // namespace

TEST_CASE("single moments: Gaussian closed forms") {
    auto e = gauss1();
    CHECK(close_rel(e.moment_single(1), kSqrt2Pi, 1e-13));
    CHECK(std::fabs(e.moment_single(2)) < 1e-14);
    CHECK(close_rel(e.moment_single(3), kSqrt2Pi, 1e-13));
    for (int m = 2; m <= 6; ++m)
        CHECK(close_rel(e.moment_single(2 * m + 1), kSqrt2Pi * dfact(2 * m - 1), 1e-12));

    CHECK_THROWS_AS(gauss4().moment_single(1), UnsupportedReductionError);
}

TEST_CASE("single moments: Laguerre Gamma closed forms") {
    for (int nu : {1, 2}) {
        auto e = Ensemble<double>::make(EnsembleId::laguerre_beta1, nu);
        for (int a = 1; a <= 8; ++a) {
            // int_0^inf x^{(nu-1)/2 + a - 1} e^-x = Gamma((nu-1)/2 + a)
            double expected = gamma_half<double>(nu - 1 + 2 * a);
            CHECK(close_rel(e.moment_single(a), expected, 1e-12));
        }
    }
}

TEST_CASE("pair moments: defining examples") {
    CHECK(gauss1().moment_pair(3, 3) == 0.0);
    CHECK(gauss4().moment_pair(2, 2) == 0.0);
    CHECK(close_rel(gauss4().moment_pair(1, 2), -kSqrt2Pi, 1e-13));
    CHECK(close_rel(gauss1().moment_pair(1, 2), 2.0 * kSqrtPi, 1e-12));
    // antisymmetry
    CHECK(close_rel(gauss1().moment_pair(2, 5), -gauss1().moment_pair(5, 2), 1e-14));
}

TEST_CASE("beta=1 Gaussian pair moments vs rotated-coordinate oracle") {
    auto e = gauss1();
    for (int a = 1; a <= 5; ++a) {
        for (int b = a + 1; b <= 5; ++b) {
            C oracle = ordered_gauss_pair([&](double x, double y) {
                return C(std::pow(x, a - 1) * std::pow(y, b - 1) -
                         std::pow(y, a - 1) * std::pow(x, b - 1));
            });
            double lib = e.moment_pair(a, b);
            if (std::abs(oracle) < 1e-10) {
                CHECK(std::fabs(lib) < 1e-10);
            } else {
                CHECK(close_rel(C(lib), oracle, 1e-10));
            }
        }
    }
}

TEST_CASE("beta=1 Laguerre pair moments vs scaled oracle") {
    for (int nu : {1, 2}) {
        auto e = Ensemble<double>::make(EnsembleId::laguerre_beta1, nu);
        for (auto [a, b] : {std::pair{1, 2}, {1, 3}, {2, 4}, {3, 5}}) {
            C oracle = ordered_laguerre_pair(nu, [&](double x, double y) {
                return C(std::pow(x, a - 1) * std::pow(y, b - 1) -
                         std::pow(y, a - 1) * std::pow(x, b - 1));
            });
            CHECK(close_rel(C(e.moment_pair(a, b)), oracle, 1e-9));
        }
    }
}

TEST_CASE("parity: even weight kills even-total pair moments") {
    // Under (x, y) -> (-y, -x), which preserves the ordered region, the pair
    // integrand picks up a factor -(-1)^{a+b}: even a+b vanishes, odd survives
    // (the quaternionic closed form shows the same: odd raw moments are zero).
    auto e1 = gauss1();
    auto e4 = gauss4();
    double scale = std::fabs(e1.moment_pair(1, 2));
    for (auto [a, b] : {std::pair{1, 3}, {2, 4}, {1, 5}, {3, 5}, {4, 8}}) {
        CHECK(std::fabs(e1.moment_pair(a, b)) < 1e-12 * scale);
        CHECK(std::fabs(e4.moment_pair(a, b)) < 1e-12 * scale);
    }
    for (auto [a, b] : {std::pair{1, 2}, {2, 3}, {2, 5}}) {
        CHECK(std::fabs(e1.moment_pair(a, b)) > 1e-3);
        CHECK(std::fabs(e4.moment_pair(a, b)) > 1e-3);
    }
}

TEST_CASE("cauchy_single: asymptotics, symmetry, sign") {
    auto e = gauss1();
    // kappa = i t, large t: value -> sqrt(2 pi) / (i t)
    C big = e.cauchy_single(C(0.0, 100.0));
    CHECK(pfrmt::test::rel_dev(big, kSqrt2Pi / C(0.0, 100.0)) < 1e-3);

    C zp = e.cauchy_single(C(1.0, 2.0));
    C zm = e.cauchy_single(C(1.0, -2.0));
    CHECK(close_rel(zm, std::conj(zp), 1e-14));

    C at_i = e.cauchy_single(C(0.0, 1.0));
    CHECK(std::fabs(at_i.real()) < 1e-14);
    CHECK(at_i.imag() < 0.0);

    CHECK_THROWS_AS(e.cauchy_single(C(0.5, 0.0)), OnSupportError);
    auto lag = Ensemble<double>::make(EnsembleId::laguerre_beta1, 1);
    CHECK_THROWS_AS(lag.cauchy_single(C(0.5, 0.0)), OnSupportError);
    CHECK_NOTHROW(lag.cauchy_single(C(-1.0, 0.0)));  // off the half-line support
}

TEST_CASE("cauchy_pair beta=1 vs rotated-coordinate oracle") {
    auto e = gauss1();
    for (C kappa : {C(0, 1), C(1.2, -0.8)}) {
        for (int b : {1, 2, 3}) {
            C oracle = ordered_gauss_pair([&](double x, double y) {
                return std::pow(y, b - 1) / (kappa - x) - std::pow(x, b - 1) / (kappa - y);
            });
            CHECK(close_rel(e.cauchy_pair(kappa, b), oracle, 1e-8));
        }
    }
    // conjugation symmetry
    C k(0.4, 1.3);
    CHECK(close_rel(e.cauchy_pair(std::conj(k), 2), std::conj(e.cauchy_pair(k, 2)), 1e-12));
}

TEST_CASE("f_kernel: antisymmetry and beta=1 oracle") {
    auto e = gauss1();
    C ka(0, 1), kb(0, 2);
    CHECK(e.f_kernel(ka, ka) == C(0.0));
    CHECK(close_rel(e.f_kernel(ka, kb), -e.f_kernel(kb, ka), 1e-13));

    C oracle = ordered_gauss_pair([&](double x, double y) {
        return (x - y) / ((ka - x) * (ka - y) * (kb - x) * (kb - y));
    });
    oracle *= -(ka - kb);
    CHECK(close_rel(e.f_kernel(ka, kb), oracle, 1e-8));

    // beta = 4 antisymmetry (the eps-regularized oracle lives with the oracle module tests)
    auto e4 = gauss4();
    C f = e4.f_kernel(C(0, 1), C(1, 1));
    CHECK(close_rel(f, -e4.f_kernel(C(1, 1), C(0, 1)), 1e-14));
}

TEST_CASE("moment matrix assembly") {
    // quaternionic d=3: pair block only, entries from the closed form
    auto m4 = build_moment_matrix(gauss4(), 3);
    CHECK(m4.matrix.dim() == 3);
    CHECK(!m4.bordered);
    CHECK(close_rel(m4.matrix(0, 1), C(-kSqrt2Pi), 1e-13));
    CHECK(std::abs(m4.matrix(0, 2)) < 1e-13);
    CHECK(close_rel(m4.matrix(1, 2), C(-kSqrt2Pi), 1e-13));

    // real d=2
    auto m1 = build_moment_matrix(gauss1(), 2);
    CHECK(close_rel(m1.matrix(0, 1), C(2.0 * kSqrtPi), 1e-12));

    // real odd d: bordered with single moments, corner zero
    auto mb = build_moment_matrix(gauss1(), 3);
    CHECK(mb.bordered);
    CHECK(mb.matrix.dim() == 4);
    CHECK(close_rel(mb.matrix(0, 3), C(-kSqrt2Pi), 1e-13));
    CHECK(close_rel(mb.matrix(3, 0), C(kSqrt2Pi), 1e-13));
    CHECK(std::abs(mb.matrix(1, 3)) < 1e-13);
    CHECK(close_rel(mb.matrix(2, 3), C(-kSqrt2Pi), 1e-13));
    CHECK(mb.matrix(3, 3) == C(0.0));

    // exact antisymmetry by construction
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) CHECK(mb.matrix(i, j) == -mb.matrix(j, i));
}

TEST_CASE("quadrature convergence: doubling nodes") {
    auto coarse = Ensemble<double>::make(EnsembleId::gauss_beta1, 0, 200);
    auto fine = Ensemble<double>::make(EnsembleId::gauss_beta1, 0, 400);
    for (auto [a, b] : {std::pair{1, 2}, {3, 4}, {5, 6}, {5, 8}}) {
        double mc = coarse.moment_pair(a, b);
        double mf = fine.moment_pair(a, b);
        CHECK(close_rel(mc, mf, 1e-12));
    }
}

TEST_CASE("extended precision reductions agree with double") {
    auto ed = Ensemble<DoubleDouble>::make(EnsembleId::gauss_beta4, 0, 80);
    auto e = Ensemble<double>::make(EnsembleId::gauss_beta4, 0, 80);
    CHECK(close_rel(to_double(ed.moment_pair(1, 4)), e.moment_pair(1, 4), 1e-14));
    auto kdd = ed.cauchy_pair(make_cplx<DoubleDouble>(0.0, 1.0), 2);
    CHECK(close_rel(to_std_complex(kdd), e.cauchy_pair(C(0, 1), 2), 1e-13));
}
