#pragma once

// Deterministic parallel reductions. Sums are accumulated in fixed-size blocks
// (boundaries independent of the thread count) and merged by a pairwise tree
// with fan-in 2, so any thread count — including 1 — produces bit-identical
// results for the same inputs.

#include <cstdint>
#include <cstdlib>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pfrmt {

inline int hardware_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

// Thread count resolution: explicit setting wins, then PFRMT_THREADS, then
// all logical cores.
inline int& thread_override() {
    static int v = 0;
    return v;
}

inline void set_threads(int n) { thread_override() = n; }

inline int effective_threads() {
    if (thread_override() > 0) return thread_override();
    if (const char* env = std::getenv("PFRMT_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    return hardware_threads();
}

inline constexpr std::int64_t kSumBlock = 4096;

template <class T>
T tree_merge(std::vector<T>& part) {
    if (part.empty()) return T{};
    std::size_t m = part.size();
    while (m > 1) {
        std::size_t half = (m + 1) / 2;
        for (std::size_t k = 0; k + half < m; ++k) part[k] += part[k + half];
        m = half;
    }
    return part[0];
}

// sum_{i=0}^{n-1} term(i), deterministic block/tree order.
template <class T, class F>
T block_tree_sum(std::int64_t n, F&& term, bool parallel = true) {
    if (n <= 0) return T{};
    std::int64_t nblocks = (n + kSumBlock - 1) / kSumBlock;
    std::vector<T> part(static_cast<std::size_t>(nblocks));
    int nt = parallel ? effective_threads() : 1;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(nt)
#endif
    for (std::int64_t b = 0; b < nblocks; ++b) {
        T acc{};
        std::int64_t lo = b * kSumBlock;
        std::int64_t hi = std::min(n, lo + kSumBlock);
        for (std::int64_t i = lo; i < hi; ++i) acc += term(i);
        part[static_cast<std::size_t>(b)] = acc;
    }
    (void)nt;
    return tree_merge(part);
}

namespace ref {

// Serial reference: plain left-to-right accumulation, no blocking. Kept for
// testing against the parallel path.
template <class T, class F>
T sum_serial(std::int64_t n, F&& term) {
    T acc{};
    for (std::int64_t i = 0; i < n; ++i) acc += term(i);
    return acc;
}

} // namespace ref

// Independent element-wise work (no reduction); used for grid evaluations.
template <class F>
void parallel_for(std::int64_t n, F&& body, bool parallel = true) {
    int nt = parallel ? effective_threads() : 1;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(nt)
#endif
    for (std::int64_t i = 0; i < n; ++i) body(i);
    (void)nt;
}

} // namespace pfrmt
