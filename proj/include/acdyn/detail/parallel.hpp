#pragma once

#include <algorithm>
#include <thread>
#include <vector>

namespace acdyn::detail {

/// Runs work(0..count-1) on up to `workers` threads. Callers index into
/// preallocated result slots, so output order never depends on scheduling.
template <typename Work>
void parallel_for(int count, int workers, Work&& work) {
    workers = std::max(1, std::min(workers, count));
    if (workers == 1) {
        for (int k = 0; k < count; ++k) work(k);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&work, w, count, workers] {
            for (int k = w; k < count; k += workers) work(k);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace acdyn::detail
