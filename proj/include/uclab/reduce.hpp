#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

namespace uclab {

// Fixed-order pairwise summation. The tree shape depends only on n, never on
// thread count, so every reduction built on it is bit-reproducible.
inline double pairwise_sum(const double* v, std::size_t n) {
    if (n <= 64) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

// Deterministic parallel reduction of f(0) + ... + f(n-1).
// The index space is cut into fixed 4096-wide chunks; each chunk is evaluated
// and pairwise-reduced by whichever thread owns it, and the chunk partials are
// pairwise-reduced again. f is invoked exactly once per index.
template <class F>
double det_sum(std::size_t n, F&& f) {
    constexpr std::size_t kChunk = 4096;
    if (n == 0) return 0.0;
    const std::size_t nchunks = (n + kChunk - 1) / kChunk;
    std::vector<double> partial(nchunks);
#pragma omp parallel for schedule(static)
    for (long long c = 0; c < static_cast<long long>(nchunks); ++c) {
        double buf[kChunk];
        const std::size_t lo = static_cast<std::size_t>(c) * kChunk;
        const std::size_t hi = std::min(n, lo + kChunk);
        for (std::size_t i = lo; i < hi; ++i) buf[i - lo] = f(i);
        partial[static_cast<std::size_t>(c)] = pairwise_sum(buf, hi - lo);
    }
    return pairwise_sum(partial.data(), nchunks);
}

// Parallel max of f(i); max is order-insensitive, so a plain reduction is fine.
template <class F>
double det_max(std::size_t n, F&& f) {
    double m = -1.7976931348623157e308;
#pragma omp parallel for schedule(static) reduction(max : m)
    for (long long i = 0; i < static_cast<long long>(n); ++i)
        m = std::max(m, f(static_cast<std::size_t>(i)));
    return m;
}

}  // namespace uclab
