#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace adgi {

// Chunked parallel for. Work items must write only to their own slots; all
// shared-cache mutation goes through the atomic update path instead. Results
// are independent of the worker count because item index -> work mapping is
// fixed and items never race on output.
inline void parallelFor(int64_t begin, int64_t end, int numThreads,
                        const std::function<void(int64_t)>& fn) {
    int64_t n = end - begin;
    if (n <= 0) return;
    if (numThreads <= 0) numThreads = static_cast<int>(std::thread::hardware_concurrency());
    if (numThreads <= 1 || n == 1) {
        for (int64_t i = begin; i < end; ++i) fn(i);
        return;
    }
    int workers = static_cast<int>(std::min<int64_t>(numThreads, n));
    std::atomic<int64_t> next{begin};
    int64_t chunk = std::max<int64_t>(1, n / (workers * 8));
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                int64_t i = next.fetch_add(chunk);
                if (i >= end) return;
                int64_t stop = std::min(end, i + chunk);
                for (int64_t k = i; k < stop; ++k) fn(k);
            }
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace adgi
