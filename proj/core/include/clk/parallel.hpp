#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace clk {

/// Global worker count used by parallel_for_chunks; 0 = hardware concurrency.
int& worker_threads();

/// Runs fn(chunk_index) for chunk_index in [0, chunk_count), distributing chunks
/// over worker threads. Each chunk writes only its own outputs, so results are
/// independent of the thread count; callers combine chunk results in a fixed order.
inline void parallel_for_chunks(std::size_t chunk_count, const std::function<void(std::size_t)>& fn) {
    unsigned hw = worker_threads() > 0 ? static_cast<unsigned>(worker_threads())
                                       : std::max(1u, std::thread::hardware_concurrency());
    if (hw <= 1 || chunk_count <= 1) {
        for (std::size_t i = 0; i < chunk_count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mtx;
    auto body = [&] {
        for (;;) {
            if (failed.load(std::memory_order_relaxed)) return;
            std::size_t i = next.fetch_add(1);
            if (i >= chunk_count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mtx);
                if (!failed.exchange(true)) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    unsigned nthreads = static_cast<unsigned>(std::min<std::size_t>(hw, chunk_count));
    pool.reserve(nthreads - 1);
    for (unsigned t = 1; t < nthreads; ++t) pool.emplace_back(body);
    body();
    for (auto& th : pool) th.join();
    if (failed.load()) std::rethrow_exception(error);
}

/// Pairwise-tree reduction in a fixed order (independent of thread count).
template <class T, class Op>
T tree_reduce(std::vector<T> items, T identity, Op op) {
    if (items.empty()) return identity;
    while (items.size() > 1) {
        std::size_t half = (items.size() + 1) / 2;
        for (std::size_t i = 0; i + half < items.size(); ++i) items[i] = op(items[i], items[i + half]);
        items.resize(half);
    }
    return items[0];
}

}  // namespace clk
