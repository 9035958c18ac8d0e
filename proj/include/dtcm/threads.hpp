#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace dtcm {

// DTCM_THREADS env var, else logical cores.
inline int default_threads() {
    if (const char* env = std::getenv("DTCM_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

// Runs fn over contiguous chunks of [0, n). Callers write results into
// preallocated per-index slots, so the combined output does not depend on
// the thread count.
inline void parallel_for(std::size_t n, int threads,
                         const std::function<void(std::size_t, std::size_t)>& fn) {
    if (n == 0) return;
    if (threads <= 1 || n == 1) {
        fn(0, n);
        return;
    }
    std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads), n);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        std::size_t lo = w * chunk;
        std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back(fn, lo, hi);
    }
    for (auto& t : pool) t.join();
}

}  // namespace dtcm
