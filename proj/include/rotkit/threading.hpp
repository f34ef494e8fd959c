#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace rotkit {

/// Worker-thread cap: min(hardware_concurrency, ROT_THREADS if set).
inline int worker_thread_count() {
    int n = static_cast<int>(std::thread::hardware_concurrency());
    if (n <= 0) n = 1;
    if (const char* env = std::getenv("ROT_THREADS")) {
        const int cap = std::atoi(env);
        if (cap >= 1) n = std::min(n, cap);
    }
    return n;
}

/// Run fn(i) for i in [0, count). Work items must be independent; results
/// must be written to disjoint slots so the schedule cannot affect outputs.
inline void parallel_for(int count, const std::function<void(int)>& fn,
                         int max_threads = -1) {
    if (count <= 0) return;
    int threads = max_threads > 0 ? std::min(max_threads, worker_thread_count())
                                  : worker_thread_count();
    threads = std::min(threads, count);
    if (threads <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            for (int i = t; i < count; i += threads) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace rotkit
