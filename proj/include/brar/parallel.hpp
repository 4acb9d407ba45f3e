#pragma once

#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

// Work-stealing parallel-for over replication indices. Bodies must write
// only to their own index slot; aggregation then happens in index order, so
// results do not depend on the degree of parallelism.

namespace brar {

inline void parallel_for(int jobs, long count,
                         const std::function<void(long)>& body) {
    if (count <= 0) return;
    if (jobs <= 1 || count == 1) {
        for (long i = 0; i < count; ++i) body(i);
        return;
    }
    const int workers = static_cast<int>(
        std::min<long>(jobs, count));
    std::atomic<long> cursor{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto run = [&] {
        for (;;) {
            const long i = cursor.fetch_add(1, std::memory_order_relaxed);
            if (i >= count) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                cursor.store(count, std::memory_order_relaxed);
                return;
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers) - 1);
    for (int w = 1; w < workers; ++w) pool.emplace_back(run);
    run();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace brar
