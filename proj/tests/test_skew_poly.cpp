#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "test_common.hpp"

#include "pfrmt/kernels.hpp"
#include "pfrmt/skew_poly.hpp"

using namespace pfrmt;
using pfrmt::test::close_rel;
using C = std::complex<double>;

namespace {

const double kSqrt2Pi = std::sqrt(2.0 * 3.14159265358979323846);

} // namespace

TEST_CASE("two-dimensional case is the identity transform") {
    auto e = Ensemble<double>::make(EnsembleId::gauss_beta4);
    auto mm = build_moment_matrix(e, 2);
    auto basis = skew_orthogonalize(mm);
    CHECK(basis.coeffs(0, 0) == C(1.0));
    CHECK(basis.coeffs(1, 1) == C(1.0));
    CHECK(basis.coeffs(1, 0) == C(0.0));
    CHECK(close_rel(basis.pairing_norms[0], -kSqrt2Pi, 1e-13));
    CHECK(verify_block_diagonal(basis, mm) < 1e-14);
}

TEST_CASE("block diagonalization residual across ensembles") {
    for (auto [id, nu] : {std::tuple{EnsembleId::gauss_beta1, 0},
                          {EnsembleId::gauss_beta4, 0},
                          {EnsembleId::laguerre_beta1, 1},
                          {EnsembleId::laguerre_beta1, 2}}) {
        auto e = Ensemble<double>::make(id, nu);
        for (int d : {4, 6, 8}) {
            auto mm = build_moment_matrix(e, d);
            auto basis = skew_orthogonalize(mm);
            double resid = verify_block_diagonal(basis, mm);
            double scale = to_double(max_abs<double>(mm.matrix.to_mat()));
            CHECK(resid < 1e-10 * std::max(scale, 1.0));
            // monic, lower triangular
            for (int i = 0; i < d; ++i) {
                CHECK(basis.coeffs(i, i) == C(1.0));
                for (int j = i + 1; j < d; ++j) CHECK(basis.coeffs(i, j) == C(0.0));
            }
        }
    }
}

TEST_CASE("Pfaffian equals the product of pairing norms") {
    for (auto id : {EnsembleId::gauss_beta1, EnsembleId::gauss_beta4}) {
        auto e = Ensemble<double>::make(id);
        for (int d : {4, 6, 8}) {
            auto mm = build_moment_matrix(e, d);
            auto basis = skew_orthogonalize(mm);
            C prod = 1.0;
            for (double r : basis.pairing_norms) prod *= r;
            CHECK(close_rel(pfaffian(mm.matrix), prod, 1e-9));
        }
    }
}

TEST_CASE("weight rescaling scales pairing norms, leaves coefficients fixed") {
    auto e = Ensemble<double>::make(EnsembleId::gauss_beta1);
    auto mm = build_moment_matrix(e, 6);
    const double c = 1.7;
    MomentMatrix<double> scaled = mm;
    scaled.matrix = SkewMatrix<double>::from_upper(6, [&](int i, int j) {
        return C(c * c) * mm.matrix(i, j);
    });
    auto b0 = skew_orthogonalize(mm);
    auto b1 = skew_orthogonalize(scaled);
    for (int i = 0; i < 6; ++i) {
        double row_scale = 1.0;
        for (int j = 0; j <= i; ++j) row_scale = std::max(row_scale, std::abs(b0.coeffs(i, j)));
        for (int j = 0; j <= i; ++j)
            CHECK(std::abs(b1.coeffs(i, j) - b0.coeffs(i, j)) < 1e-12 * row_scale);
    }
    for (std::size_t i = 0; i < b0.pairing_norms.size(); ++i)
        CHECK(close_rel(b1.pairing_norms[i], c * c * b0.pairing_norms[i], 1e-12));
}

TEST_CASE("corrupted coefficient is detected (negative control)") {
    auto e = Ensemble<double>::make(EnsembleId::gauss_beta1);
    auto mm = build_moment_matrix(e, 6);
    auto basis = skew_orthogonalize(mm);
    basis.coeffs(4, 2) += C(0.05);
    CHECK(verify_block_diagonal(basis, mm) > 1e-3);
}

TEST_CASE("breakdown raises with the failing pair index") {
    MomentMatrix<double> mm;
    mm.d = 4;
    mm.bordered = false;
    mm.matrix = SkewMatrix<double>(4);
    mm.matrix.set(0, 1, C(0.0));  // r_0 = 0
    mm.matrix.set(0, 3, C(1.0));
    mm.matrix.set(2, 3, C(1.0));
    try {
        skew_orthogonalize(mm);
        FAIL("expected BreakdownError");
    } catch (const BreakdownError& err) {
        CHECK(err.step == 0);
    }
}

TEST_CASE("basis substitution leaves the assembled Pfaffian invariant") {
    // Replace the monomial rows/columns by any monic lower-triangular basis:
    // the big Pfaffian is invariant because det of the block congruence is 1.
    auto e = Ensemble<double>::make(EnsembleId::gauss_beta1);
    const int n_pairs = 2;
    SpectralParams p({C(0.0, 1.0), C(0.7, -0.9)}, {C(0.4, 0.0), C(-1.1, 0.3)});
    const int d = p.k2() - p.k1() + 2 * n_pairs;
    KernelSet<double> ks(e, d, Sector::even);
    auto basis = skew_orthogonalize(ks.moment());
    auto kap1 = to_cplx_vec<double>(p.kappa1);
    auto kap2 = to_cplx_vec<double>(p.kappa2);
    const int k1 = p.k1(), k2 = p.k2();

    auto assemble = [&](bool transform) {
        SkewMatrix<double> big(k2 + k1 + d);
        for (int a = 0; a < k2; ++a)
            for (int b = 0; b < k1; ++b) big.set(a, k2 + b, 1.0 / (kap1[b] - kap2[a]));
        for (int a = 0; a < k1; ++a)
            for (int b = a + 1; b < k1; ++b)
                big.set(k2 + a, k2 + b, e.f_kernel(kap1[a], kap1[b]));
        for (int a = 0; a < k2; ++a) {
            auto row = ks.k_row(kap2[a]);
            for (int m = 0; m < d; ++m) {
                C v = row[m];
                if (transform) {
                    v = 0.0;
                    for (int n = 0; n <= m; ++n) v += basis.coeffs(m, n) * row[n];
                }
                big.set(a, k2 + k1 + m, v);
            }
        }
        for (int a = 0; a < k1; ++a) {
            auto g = ks.g_vec(kap1[a]);
            for (int m = 0; m < d; ++m) {
                C v = g[m];
                if (transform) {
                    v = 0.0;
                    for (int n = 0; n <= m; ++n) v += basis.coeffs(m, n) * g[n];
                }
                big.set(k2 + a, k2 + k1 + m, v);
            }
        }
        Mat<C> mom = ks.moment().matrix.to_mat();
        if (transform)
            mom = matmul(matmul(basis.coeffs, mom), transpose(basis.coeffs));
        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j)
                big.set(k2 + k1 + i, k2 + k1 + j, (mom(i, j) - mom(j, i)) / 2.0);
        return pfaffian(big);
    };

    C monomial = assemble(false);
    C skew_basis = assemble(true);
    CHECK(close_rel(monomial, skew_basis, 1e-9));

    // and the transformed moment block is the block-diagonal pairing
    CHECK(verify_block_diagonal(basis, ks.moment()) < 1e-10);
}
