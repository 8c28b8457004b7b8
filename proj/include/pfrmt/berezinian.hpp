#pragma once

// Cauchy-Vandermonde machinery: the square-root Berezinian in its ratio form
// (the convention used throughout the z-path) and in its block-determinant
// form. The two agree up to a shape-dependent global sign, which is pinned
// empirically at a fixed reference input per shape (k1, k2, |E|) and cached.

#include <complex>
#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include "pfrmt/dense.hpp"
#include "pfrmt/errors.hpp"
#include "pfrmt/scalar.hpp"

namespace pfrmt {

// Denominator shifts kappa1 must sit off the real axis; entries within each
// group must be pairwise distinct.
struct SpectralParams {
    std::vector<std::complex<double>> kappa1;
    std::vector<std::complex<double>> kappa2;

    SpectralParams() = default;
    SpectralParams(std::vector<std::complex<double>> k1, std::vector<std::complex<double>> k2)
        : kappa1(std::move(k1)), kappa2(std::move(k2)) {
        validate();
    }

    int k1() const { return static_cast<int>(kappa1.size()); }
    int k2() const { return static_cast<int>(kappa2.size()); }

    void validate() const {
        for (std::size_t i = 0; i < kappa1.size(); ++i)
            if (kappa1[i].imag() == 0.0)
                throw OnSupportError("kappa1[" + std::to_string(i) + "] lies on the real axis");
        auto distinct = [](const std::vector<std::complex<double>>& v, const char* name) {
            for (std::size_t i = 0; i < v.size(); ++i)
                for (std::size_t j = i + 1; j < v.size(); ++j)
                    if (v[i] == v[j])
                        throw DegenerateShiftError(std::string(name) + " entries coincide");
        };
        distinct(kappa1, "kappa1");
        distinct(kappa2, "kappa2");
    }
};

template <class C>
C vandermonde(const std::vector<C>& e) {
    C p = C(1);
    for (std::size_t a = 0; a < e.size(); ++a)
        for (std::size_t b = a + 1; b < e.size(); ++b) p *= e[a] - e[b];
    return p;
}

// (-1)^{N(N-1)/2} det[E_a^{b-1}]; cross-check form for the product.
template <class R>
cplx<R> vandermonde_det_form(const std::vector<cplx<R>>& e) {
    using C = cplx<R>;
    const int n = static_cast<int>(e.size());
    if (n <= 1) return C(R(1));
    Mat<C> m(n, n);
    for (int a = 0; a < n; ++a) {
        C p = C(R(1));
        for (int b = 0; b < n; ++b) {
            m(a, b) = p;
            p *= e[a];
        }
    }
    C d = det<R>(m);
    return ((n * (n - 1) / 2) % 2 == 0) ? d : -d;
}

// Ratio form, + sign convention: Delta(k1) Delta(k2) / prod (kappa_a1 - kappa_b2).
// This is the only Berezinian the z formulas consume.
template <class R>
cplx<R> sqrt_ber_ratio(const std::vector<cplx<R>>& kappa1, const std::vector<cplx<R>>& kappa2) {
    using C = cplx<R>;
    using std::abs;
    C num = vandermonde(kappa1) * vandermonde(kappa2);
    C den = C(R(1));
    for (const auto& a : kappa1)
        for (const auto& b : kappa2) {
            C diff = a - b;
            if (to_double(abs(diff)) == 0.0)
                throw DegenerateShiftError("kappa1 and kappa2 entries coincide");
            den *= diff;
        }
    return num / den;
}

// Equal-size case with its Cauchy-determinant cross-check form.
template <class R>
struct BerezinianKK {
    cplx<R> ratio_form;
    cplx<R> cauchy_det_form;  // (-1)^{k(k-1)/2} det[1/(kappa_a1 - kappa_b2)]
};

template <class R>
BerezinianKK<R> sqrt_berezinian_kk(const std::vector<cplx<R>>& kappa1,
                                   const std::vector<cplx<R>>& kappa2) {
    using C = cplx<R>;
    if (kappa1.size() != kappa2.size())
        throw DimensionError("sqrt_berezinian_kk needs |kappa1| == |kappa2|");
    const int k = static_cast<int>(kappa1.size());
    BerezinianKK<R> out;
    out.ratio_form = sqrt_ber_ratio<R>(kappa1, kappa2);
    if (k == 0) {
        out.cauchy_det_form = C(R(1));
        return out;
    }
    Mat<C> m(k, k);
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) m(a, b) = C(R(1)) / (kappa1[a] - kappa2[b]);
    C d = det<R>(m);
    out.cauchy_det_form = ((k * (k - 1) / 2) % 2 == 0) ? d : -d;
    return out;
}

template <class R>
struct BerezinianMixed {
    cplx<R> ratio_form;      // + convention
    cplx<R> block_det_form;  // Cauchy rows over monomial rows
    int shape_sign;          // cached: block_det = shape_sign * ratio
    cplx<R> value;           // shape_sign * ratio_form
};

namespace detail {

template <class R>
cplx<R> ber_mixed_ratio(const std::vector<cplx<R>>& k1v, const std::vector<cplx<R>>& k2v,
                        const std::vector<cplx<R>>& ev) {
    using C = cplx<R>;
    using std::abs;
    std::vector<C> merged = k2v;
    merged.insert(merged.end(), ev.begin(), ev.end());
    C num = vandermonde(k1v) * vandermonde(merged);
    C den = C(R(1));
    for (const auto& a : k1v) {
        for (const auto& b : merged) {
            C diff = a - b;
            if (to_double(abs(diff)) == 0.0)
                throw DegenerateShiftError("coincident arguments in mixed Berezinian");
            den *= diff;
        }
    }
    return num / den;
}

template <class R>
cplx<R> ber_mixed_block_det(const std::vector<cplx<R>>& k1v, const std::vector<cplx<R>>& k2v,
                            const std::vector<cplx<R>>& ev) {
    using C = cplx<R>;
    const int k1 = static_cast<int>(k1v.size());
    const int cols = static_cast<int>(k2v.size() + ev.size());
    const int d = cols - k1;
    if (d < 0) throw DimensionError("mixed Berezinian needs |kappa2| + |E| >= |kappa1|");
    Mat<C> m(cols, cols);
    std::vector<C> colv = k2v;
    colv.insert(colv.end(), ev.begin(), ev.end());
    for (int a = 0; a < k1; ++a)
        for (int b = 0; b < cols; ++b) m(a, b) = C(R(1)) / (k1v[a] - colv[b]);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < cols; ++b) m(k1 + a, b) = powi_c<R, C>(colv[b], a);
    return det<R>(m);
}

// Reference inputs in generic position for a given shape.
inline void ber_reference_input(int k1, int k2, int ne,
                                std::vector<std::complex<double>>& k1v,
                                std::vector<std::complex<double>>& k2v,
                                std::vector<std::complex<double>>& ev) {
    k1v.clear(); k2v.clear(); ev.clear();
    for (int a = 0; a < k1; ++a) k1v.push_back({0.37 * a - 1.1, 1.05 + 0.31 * a});
    for (int b = 0; b < k2; ++b) k2v.push_back({0.83 * b + 0.21, -0.47 - 0.11 * b});
    for (int e = 0; e < ne; ++e) ev.push_back({-0.9 + 0.57 * e, 0.05 * e - 0.02});
}

inline int ber_mixed_shape_sign(int k1, int k2, int ne) {
    static std::map<std::tuple<int, int, int>, int> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_tuple(k1, k2, ne);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    std::vector<std::complex<double>> k1v, k2v, ev;
    ber_reference_input(k1, k2, ne, k1v, k2v, ev);
    std::complex<double> ratio = ber_mixed_ratio<double>(k1v, k2v, ev);
    std::complex<double> blockd = ber_mixed_block_det<double>(k1v, k2v, ev);
    double q = (blockd / ratio).real();
    int sign = q >= 0.0 ? 1 : -1;
    cache[key] = sign;
    return sign;
}

} // namespace detail

template <class R>
BerezinianMixed<R> sqrt_berezinian_mixed(const std::vector<cplx<R>>& kappa1,
                                         const std::vector<cplx<R>>& kappa2,
                                         const std::vector<cplx<R>>& e) {
    BerezinianMixed<R> out;
    out.ratio_form = detail::ber_mixed_ratio<R>(kappa1, kappa2, e);
    out.block_det_form = detail::ber_mixed_block_det<R>(kappa1, kappa2, e);
    out.shape_sign = detail::ber_mixed_shape_sign(static_cast<int>(kappa1.size()),
                                                  static_cast<int>(kappa2.size()),
                                                  static_cast<int>(e.size()));
    out.value = R(out.shape_sign) * out.ratio_form;
    return out;
}

template <class R>
std::vector<cplx<R>> to_cplx_vec(const std::vector<std::complex<double>>& v) {
    std::vector<cplx<R>> out;
    out.reserve(v.size());
    for (const auto& z : v) out.push_back(make_cplx<R>(z.real(), z.imag()));
    return out;
}

} // namespace pfrmt
