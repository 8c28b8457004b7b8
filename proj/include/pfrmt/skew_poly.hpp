#pragma once

// Skew-orthogonal polynomials extracted from the antisymmetric moment matrix
// by pairwise Gram-Schmidt: monic p_j of degree j with the pairing
// <p_a, p_b> = (T M T^T)_{ab} block-diagonalized into [[0, r_i], [-r_i, 0]].
// The basis is a result of the moment matrix, not an input.

#include <vector>

#include "pfrmt/dense.hpp"
#include "pfrmt/ensemble.hpp"
#include "pfrmt/errors.hpp"

namespace pfrmt {

template <class R>
struct SkewPolynomialBasis {
    int d = 0;                    // even
    Mat<cplx<R>> coeffs;          // row j: coefficients of monic p_j, ascending degree
    std::vector<R> pairing_norms; // r_i for the pair (p_{2i}, p_{2i+1})
};

template <class R>
SkewPolynomialBasis<R> skew_orthogonalize(const MomentMatrix<R>& mm) {
    using C = cplx<R>;
    using std::abs;
    if (mm.bordered) throw DimensionError("skew orthogonalization needs the unbordered pair block");
    const int d = mm.matrix.dim();
    if (d % 2 != 0) throw DimensionError("skew orthogonalization needs even dimension");

    const Mat<C> m = mm.matrix.to_mat();
    const double scale = std::max(to_double(max_abs<R>(m)), 1e-300);

    SkewPolynomialBasis<R> basis;
    basis.d = d;
    basis.coeffs = Mat<C>(d, d);
    Mat<C>& t = basis.coeffs;

    auto pairing = [&](int a, int b) {
        C sum{};
        for (int i = 0; i <= a; ++i) {
            if (t(a, i) == C{}) continue;
            C row{};
            for (int j = 0; j <= b; ++j) row += m(i, j) * t(b, j);
            sum += t(a, i) * row;
        }
        return sum;
    };

    for (int i = 0; i < d; ++i) {
        t(i, i) = C(R(1));  // monic start from the monomial
        // subtract projections onto all completed pairs
        for (int pr = 0; pr * 2 + 1 < i; ++pr) {
            int a = 2 * pr, b = 2 * pr + 1;
            C r = C(basis.pairing_norms[pr]);
            C ca = pairing(i, b) / r;  // coefficient along p_a
            C cb = pairing(i, a) / r;
            for (int j = 0; j <= a; ++j) t(i, j) -= ca * t(a, j);
            for (int j = 0; j <= b; ++j) t(i, j) += cb * t(b, j);
        }
        if (i % 2 == 1) {
            C r = pairing(i - 1, i);
            if (to_double(abs(r)) < scalar_traits<R>::rcond_floor * scale)
                throw BreakdownError("zero pairing norm in skew Gram-Schmidt", i / 2);
            using pfrmt::real; using std::real;
            basis.pairing_norms.push_back(real(r));
        }
    }
    return basis;
}

// Recomputes T M T^T and reports the worst deviation from the exact
// block-diagonal pairing (off-block entries plus block entries vs r_i).
template <class R>
double verify_block_diagonal(const SkewPolynomialBasis<R>& basis, const MomentMatrix<R>& mm) {
    using C = cplx<R>;
    using std::abs;
    const int d = basis.d;
    Mat<C> prod = matmul(matmul(basis.coeffs, mm.matrix.to_mat()), transpose(basis.coeffs));
    double worst = 0.0;
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            C expect{};
            if (i / 2 == j / 2 && i != j) {
                R r = basis.pairing_norms[i / 2];
                expect = (i < j) ? C(r) : C(-r);
            }
            worst = std::max(worst, to_double(abs(prod(i, j) - expect)));
        }
    }
    return worst;
}

} // namespace pfrmt
