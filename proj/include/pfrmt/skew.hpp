#pragma once

// Skew-symmetric (antisymmetric) complex matrices and their Pfaffian.
//
// The production Pfaffian is Parlett-Reid skew elimination with partial
// pivoting (O(n^3); see Wimmer, arXiv:1102.3440 for the algorithm family).
// The combinatorial expansion over pair matchings is kept in pfrmt::ref as the
// independent test oracle for small dimensions.

#include <functional>
#include <utility>
#include <vector>

#include "pfrmt/dense.hpp"
#include "pfrmt/errors.hpp"
#include "pfrmt/scalar.hpp"

namespace pfrmt {

template <class R>
class SkewMatrix {
  public:
    using C = cplx<R>;

    SkewMatrix() = default;
    explicit SkewMatrix(int n) : n_(n), a_(static_cast<std::size_t>(n) * n) {}

    // Build from the strict upper triangle; the lower triangle and diagonal
    // are filled to make antisymmetry exact.
    static SkewMatrix from_upper(int n, const std::function<C(int, int)>& f) {
        SkewMatrix m(n);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) m.set(i, j, f(i, j));
        return m;
    }

    // Accepts a full matrix, checks antisymmetry, re-enforces it exactly.
    static SkewMatrix from_full(const Mat<C>& full, double tol = 1e-12) {
        using std::abs;
        if (full.rows != full.cols) throw DimensionError("skew matrix must be square");
        int n = full.rows;
        double scale = to_double(max_abs<R>(full)) + 1.0;
        SkewMatrix m(n);
        for (int i = 0; i < n; ++i) {
            if (to_double(abs(full(i, i))) > tol * scale)
                throw NumericError("skew matrix has nonzero diagonal");
            for (int j = i + 1; j < n; ++j) {
                if (to_double(abs(full(i, j) + full(j, i))) > tol * scale)
                    throw NumericError("matrix is not antisymmetric");
                m.set(i, j, full(i, j));
            }
        }
        return m;
    }

    int dim() const { return n_; }

    const C& operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * n_ + j]; }

    void set(int i, int j, C v) {
        a_[static_cast<std::size_t>(i) * n_ + j] = v;
        a_[static_cast<std::size_t>(j) * n_ + i] = -v;
        if (i == j) a_[static_cast<std::size_t>(i) * n_ + j] = C{};
    }

    Mat<C> to_mat() const {
        Mat<C> m(n_, n_);
        m.a = a_;
        return m;
    }

    bool finite() const {
        using std::isfinite;
        for (const auto& v : a_) {
            using pfrmt::real; using pfrmt::imag;
            using std::real; using std::imag;
            if (!isfinite(real(v)) || !isfinite(imag(v))) return false;
        }
        return true;
    }

  private:
    int n_ = 0;
    std::vector<C> a_;
};

// Pf(A); Pf of the empty matrix is 1.
template <class R>
cplx<R> pfaffian(const SkewMatrix<R>& A) {
    using C = cplx<R>;
    using std::abs;
    const int n = A.dim();
    if (n % 2 != 0) throw DimensionError("Pfaffian needs even dimension");
    if (!A.finite()) throw NumericError("Pfaffian input has NaN/Inf entries");
    if (n == 0) return C(R(1));

    Mat<C> m = A.to_mat();
    C pf = C(R(1));
    for (int k = 0; k + 1 < n; k += 2) {
        int p = k + 1;
        R best = abs(m(k, k + 1));
        for (int i = k + 2; i < n; ++i) {
            R cand = abs(m(k, i));
            if (cand > best) { best = cand; p = i; }
        }
        if (to_double(best) == 0.0) return C{};
        if (p != k + 1) {
            for (int j = 0; j < n; ++j) std::swap(m(p, j), m(k + 1, j));
            for (int j = 0; j < n; ++j) std::swap(m(j, p), m(j, k + 1));
            pf = -pf;
        }
        pf *= m(k, k + 1);
        if (k + 2 >= n) break;
        std::vector<C> tau(n);
        C inv_piv = C(R(1)) / m(k, k + 1);
        for (int i = k + 2; i < n; ++i) tau[i] = m(k, i) * inv_piv;
        for (int i = k + 2; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                C upd = m(i, j) - tau[i] * m(k + 1, j) + tau[j] * m(k + 1, i);
                m(i, j) = upd;
                m(j, i) = -upd;
            }
        }
    }
    return pf;
}

namespace ref {

// Expansion along the first active row; O(n!!) — the small-dimension oracle.
template <class R>
cplx<R> pfaffian_combinatorial(const SkewMatrix<R>& A) {
    using C = cplx<R>;
    const int n = A.dim();
    if (n % 2 != 0) throw DimensionError("Pfaffian needs even dimension");
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;

    std::function<C(std::vector<int>&)> rec = [&](std::vector<int>& act) -> C {
        if (act.empty()) return C(R(1));
        C sum{};
        int i0 = act[0];
        for (std::size_t j = 1; j < act.size(); ++j) {
            std::vector<int> rest;
            rest.reserve(act.size() - 2);
            for (std::size_t t = 1; t < act.size(); ++t)
                if (t != j) rest.push_back(act[t]);
            C term = A(i0, act[j]) * rec(rest);
            if (j % 2 == 1) sum += term;
            else sum -= term;
        }
        return sum;
    };
    return rec(idx);
}

} // namespace ref

template <class R>
struct InverseDiagnostics {
    double rcond = 0.0;
    double residual_max = 0.0;  // || D D^{-1} - I ||_max
};

// D^{-1} with antisymmetry re-enforced by (X - X^T)/2 after the solve.
template <class R>
SkewMatrix<R> skew_inverse(const SkewMatrix<R>& D, InverseDiagnostics<R>* diag = nullptr) {
    using C = cplx<R>;
    using std::abs;
    const int n = D.dim();
    if (n % 2 != 0) throw DimensionError("skew inverse needs even dimension");

    Mat<C> dm = D.to_mat();
    LU<R> lu(dm);
    if (lu.singular()) throw SingularMatrixError("skew matrix is singular", 0.0);
    Mat<C> inv = lu.inverse();
    double rc = rcond_from_inverse<R>(dm, inv);
    if (rc < scalar_traits<R>::rcond_floor)
        throw SingularMatrixError("skew matrix is near-singular", rc);

    SkewMatrix<R> out(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) out.set(i, j, (inv(i, j) - inv(j, i)) / R(2));

    if (diag) {
        Mat<C> prod = matmul(dm, out.to_mat());
        for (int i = 0; i < n; ++i) prod(i, i) -= C(R(1));
        diag->rcond = rc;
        diag->residual_max = to_double(max_abs<R>(prod));
    }
    return out;
}

// Pf(D) Pf(A + B D^{-1} B^T); equals the Pfaffian of [[A, B], [-B^T, D]].
template <class R>
cplx<R> pfaffian_schur(const SkewMatrix<R>& A, const Mat<cplx<R>>& B, const SkewMatrix<R>& D) {
    using C = cplx<R>;
    if (B.rows != A.dim() || B.cols != D.dim())
        throw DimensionError("pfaffian_schur: block shapes not conformal");
    SkewMatrix<R> dinv = skew_inverse(D);
    Mat<C> corr = matmul(matmul(B, dinv.to_mat()), transpose(B));
    SkewMatrix<R> s(A.dim());
    for (int i = 0; i < A.dim(); ++i)
        for (int j = i + 1; j < A.dim(); ++j)
            s.set(i, j, A(i, j) + (corr(i, j) - corr(j, i)) / R(2));
    return pfaffian(D) * pfaffian(s);
}

// [[A, B], [-B^T, D]] assembled as one skew matrix (test / assembled-route use).
template <class R>
SkewMatrix<R> assemble_block_skew(const SkewMatrix<R>& A, const Mat<cplx<R>>& B,
                                  const SkewMatrix<R>& D) {
    const int na = A.dim(), nd = D.dim();
    if (B.rows != na || B.cols != nd)
        throw DimensionError("assemble_block_skew: block shapes not conformal");
    SkewMatrix<R> m(na + nd);
    for (int i = 0; i < na; ++i)
        for (int j = i + 1; j < na; ++j) m.set(i, j, A(i, j));
    for (int i = 0; i < na; ++i)
        for (int j = 0; j < nd; ++j) m.set(i, na + j, B(i, j));
    for (int i = 0; i < nd; ++i)
        for (int j = i + 1; j < nd; ++j) m.set(na + i, na + j, D(i, j));
    return m;
}

} // namespace pfrmt
