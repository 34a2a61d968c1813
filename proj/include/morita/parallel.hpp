#pragma once

// Work-sharing helper for the property suites.  Results must not depend on
// scheduling: callers derive all randomness from the index.

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#include "morita/core.hpp"

namespace morita {

/// Runs fn(i) for every i in [0, n) across hardware threads and rethrows the
/// first exception after all workers have stopped.
inline void parallel_for(Index n, const std::function<void(Index)>& fn) {
    const unsigned hw = std::thread::hardware_concurrency();
    const Index workers =
        std::min<Index>(n, static_cast<Index>(std::max(1u, std::min(hw, 8u))));
    if (workers <= 1) {
        for (Index i = 0; i < n; ++i) fn(i);
        return;
    }

    std::atomic<Index> next{0};
    std::exception_ptr first;
    std::mutex first_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (Index w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (true) {
                const Index i = next.fetch_add(1);
                if (i >= n) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(first_mutex);
                    if (!first) first = std::current_exception();
                    return;
                }
            }
        });
    }
    for (std::thread& t : pool) t.join();
    if (first) std::rethrow_exception(first);
}

}  // namespace morita
