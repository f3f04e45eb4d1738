#pragma once

#include <algorithm>
#include <thread>
#include <vector>

namespace zmlab::detail {

inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

// Static block partition of [0, n).  Each index is processed by exactly one
// worker and every output element is written once, so results are identical
// for any thread count.
template <typename Fn>
void parallel_for(long n, int threads, Fn&& fn) {
    threads = std::min<long>(resolve_threads(threads), std::max(n, 1L));
    if (n <= 0) return;
    if (threads <= 1) {
        for (long i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(threads));
    const long chunk = (n + threads - 1) / threads;
    for (int w = 0; w < threads; ++w) {
        const long lo = w * chunk;
        const long hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (long i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace zmlab::detail
