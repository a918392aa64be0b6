#pragma once

// Minimal fork-join over index ranges. The worker count is process-wide and
// set once by the CLI (--threads).

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace dhrg {

namespace detail {
inline std::atomic<unsigned>& thread_setting() {
    static std::atomic<unsigned> value{0};
    return value;
}
}  // namespace detail

/// 0 restores the default (hardware concurrency).
inline void set_thread_count(unsigned n) { detail::thread_setting() = n; }

inline unsigned thread_count() {
    const unsigned n = detail::thread_setting();
    if (n > 0) return n;
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls body(begin, end, worker) on disjoint blocks covering [0, n). Blocks
/// are handed out dynamically; worker < thread_count(). The first exception
/// thrown by any worker is rethrown after all workers stop.
template <class Body>
void parallel_for(std::size_t n, Body&& body, std::size_t grain = 64) {
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(thread_count(), (n + grain - 1) / grain));
    if (workers <= 1) {
        if (n > 0) body(std::size_t{0}, n, 0u);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto run = [&](unsigned w) {
        try {
            while (true) {
                const std::size_t b = next.fetch_add(grain);
                if (b >= n) break;
                body(b, std::min(n, b + grain), w);
            }
        } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            next = n;
        }
    };
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(run, w);
    run(0);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace dhrg
