#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace traceent {

    /// 0 means "all hardware threads".
    inline unsigned resolve_threads(unsigned requested) noexcept {
        if (requested != 0)
            return requested;
        return std::max(1U, std::thread::hardware_concurrency());
    }

    /// Calls fn(i) for i in [0, n). Work is claimed dynamically, so fn must
    /// only write to per-index state. If several indices throw, the exception
    /// of the lowest index is rethrown.
    template <typename Fn>
    void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
        threads = static_cast<unsigned>(std::min<std::size_t>(resolve_threads(threads), n));
        if (threads <= 1) {
            for (std::size_t i = 0; i < n; ++i)
                fn(i);
            return;
        }

        std::atomic<std::size_t> next{0};
        std::mutex failure_mutex;
        std::exception_ptr failure;
        std::size_t failure_index = n;

        auto worker = [&] {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                try {
                    fn(i);
                }
                catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (i < failure_index) {
                        failure_index = i;
                        failure = std::current_exception();
                    }
                }
            }
        };

        {
            std::vector<std::jthread> pool;
            pool.reserve(threads - 1);
            for (unsigned t = 1; t < threads; ++t)
                pool.emplace_back(worker);
            worker();
        }
        if (failure)
            std::rethrow_exception(failure);
    }

}  // namespace traceent
