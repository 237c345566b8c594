#ifndef CIRCLEMAP_PARALLEL_HPP
#define CIRCLEMAP_PARALLEL_HPP

#include <functional>
#include <thread>
#include <vector>

namespace circlemap {

/// Chunked parallel loop over [0, n).  Chunk boundaries depend only on
/// (n, threads), so reductions done per-chunk stay reproducible for a fixed
/// thread count.
inline void parallel_for(long n, int threads,
                         const std::function<void(long, long)>& body) {
    if (threads <= 1 || n < 2 * threads) {
        body(0, n);
        return;
    }
    std::vector<std::thread> pool;
    long chunk = (n + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        long lo = t * chunk;
        long hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&body, lo, hi] { body(lo, hi); });
    }
    for (auto& th : pool) th.join();
}

} // namespace circlemap

#endif
