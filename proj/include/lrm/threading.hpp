#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace lrm {

// Worker count: LRM_THREADS caps it, hardware concurrency is the default.
inline size_t thread_count() {
    static const size_t cached = [] {
        size_t n = std::thread::hardware_concurrency();
        if (n == 0) n = 1;
        if (const char* env = std::getenv("LRM_THREADS")) {
            const long v = std::atol(env);
            if (v >= 1) n = std::min(n, static_cast<size_t>(v));
        }
        return n;
    }();
    return cached;
}

// Runs fn(i) for i in [0, total). Work items must be independent; callers
// that reduce floating-point results do so afterwards in index order, so
// results do not depend on the thread count.
inline void parallel_for(size_t total, const std::function<void(size_t)>& fn) {
    const size_t workers = std::min(thread_count(), total);
    if (workers <= 1) {
        for (size_t i = 0; i < total; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    const size_t chunk = (total + workers - 1) / workers;
    for (size_t w = 1; w < workers; ++w) {
        const size_t start = w * chunk;
        const size_t end = std::min(total, start + chunk);
        if (start >= end) break;
        pool.emplace_back([&fn, start, end] {
            for (size_t i = start; i < end; ++i) fn(i);
        });
    }
    for (size_t i = 0; i < std::min(chunk, total); ++i) fn(i);
    for (auto& t : pool) t.join();
}

}  // namespace lrm
