#pragma once

// Small dense complex matrices with partial-pivot LU. Everything here is desk
// scale (dims of a few tens), so plain row-major storage and O(n^3) loops.

#include <vector>

#include "pfrmt/errors.hpp"
#include "pfrmt/scalar.hpp"

namespace pfrmt {

template <class C>
struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<C> a;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c) {}

    C& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
    const C& operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }

    static Mat identity(int n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = C(1);
        return m;
    }
};

template <class C>
Mat<C> matmul(const Mat<C>& A, const Mat<C>& B) {
    Mat<C> out(A.rows, B.cols);
    for (int i = 0; i < A.rows; ++i)
        for (int k = 0; k < A.cols; ++k) {
            C aik = A(i, k);
            for (int j = 0; j < B.cols; ++j) out(i, j) += aik * B(k, j);
        }
    return out;
}

template <class C>
Mat<C> transpose(const Mat<C>& A) {
    Mat<C> out(A.cols, A.rows);
    for (int i = 0; i < A.rows; ++i)
        for (int j = 0; j < A.cols; ++j) out(j, i) = A(i, j);
    return out;
}

template <class R>
R norm1(const Mat<cplx<R>>& A) {
    using std::abs;
    R best(0);
    for (int j = 0; j < A.cols; ++j) {
        R s(0);
        for (int i = 0; i < A.rows; ++i) s += abs(A(i, j));
        if (s > best) best = s;
    }
    return best;
}

template <class R>
R max_abs(const Mat<cplx<R>>& A) {
    using std::abs;
    R best(0);
    for (const auto& v : A.a) {
        R m = abs(v);
        if (m > best) best = m;
    }
    return best;
}

// Partial-pivot LU of a square complex matrix.
template <class R>
class LU {
  public:
    using C = cplx<R>;

    explicit LU(Mat<C> A) : lu_(std::move(A)), piv_(lu_.rows), sign_(1) {
        const int n = lu_.rows;
        if (lu_.cols != n) throw DimensionError("LU: matrix not square");
        for (int k = 0; k < n; ++k) {
            using std::abs;
            int p = k;
            R best = abs(lu_(k, k));
            for (int i = k + 1; i < n; ++i) {
                R m = abs(lu_(i, k));
                if (m > best) { best = m; p = i; }
            }
            piv_[k] = p;
            if (to_double(best) == 0.0) { singular_ = true; continue; }
            if (p != k) {
                for (int j = 0; j < n; ++j) std::swap(lu_(k, j), lu_(p, j));
                sign_ = -sign_;
            }
            C inv_piv = C(R(1)) / lu_(k, k);
            for (int i = k + 1; i < n; ++i) {
                C f = lu_(i, k) * inv_piv;
                lu_(i, k) = f;
                for (int j = k + 1; j < n; ++j) lu_(i, j) -= f * lu_(k, j);
            }
        }
    }

    bool singular() const { return singular_; }

    C det() const {
        C d = C(R(sign_));
        for (int i = 0; i < lu_.rows; ++i) d *= lu_(i, i);
        return d;
    }

    // Solve in place for one right-hand side of length n. Rows were swapped in
    // full during factorization, so all interchanges apply to b first.
    void solve(std::vector<C>& b) const {
        const int n = lu_.rows;
        if (singular_) throw SingularMatrixError("LU solve on singular matrix", 0.0);
        for (int k = 0; k < n; ++k)
            if (piv_[k] != k) std::swap(b[k], b[piv_[k]]);
        for (int k = 0; k < n; ++k)
            for (int i = k + 1; i < n; ++i) b[i] -= lu_(i, k) * b[k];
        for (int i = n - 1; i >= 0; --i) {
            for (int j = i + 1; j < n; ++j) b[i] -= lu_(i, j) * b[j];
            b[i] /= lu_(i, i);
        }
    }

    Mat<C> inverse() const {
        const int n = lu_.rows;
        Mat<C> inv(n, n);
        std::vector<C> col(n);
        for (int j = 0; j < n; ++j) {
            std::fill(col.begin(), col.end(), C{});
            col[j] = C(R(1));
            solve(col);
            for (int i = 0; i < n; ++i) inv(i, j) = col[i];
        }
        return inv;
    }

  private:
    Mat<C> lu_;
    std::vector<int> piv_;
    int sign_;
    bool singular_ = false;
};

template <class R>
cplx<R> det(const Mat<cplx<R>>& A) {
    LU<R> lu(A);
    if (lu.singular()) return cplx<R>{};
    return lu.det();
}

// Reciprocal condition estimate from an explicitly computed inverse.
template <class R>
double rcond_from_inverse(const Mat<cplx<R>>& A, const Mat<cplx<R>>& Ainv) {
    double na = to_double(norm1<R>(A));
    double ni = to_double(norm1<R>(Ainv));
    if (na == 0.0 || ni == 0.0) return 0.0;
    return 1.0 / (na * ni);
}

} // namespace pfrmt
