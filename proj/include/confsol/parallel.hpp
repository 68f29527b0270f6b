#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace confsol {

/// Runs body(chunk) for chunk in [0, chunks) on up to `jobs` threads.
/// Callers write into per-chunk slots, so results never depend on scheduling.
template <class Body>
void parallel_for_chunks(std::size_t chunks, unsigned jobs, Body&& body) {
    jobs = std::max(1u, jobs);
    if (jobs == 1 || chunks <= 1) {
        for (std::size_t c = 0; c < chunks; ++c) body(c);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (std::size_t c = next++; c < chunks; c = next++) {
            try {
                body(c);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    const auto count = std::min<std::size_t>(jobs, chunks);
    pool.reserve(count);
    for (std::size_t t = 0; t < count; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace confsol
