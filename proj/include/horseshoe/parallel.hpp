#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace horseshoe {

/// Worker count: HORSESHOE_THREADS if set to a positive integer, otherwise
/// the hardware concurrency (at least 1).
inline unsigned worker_count() {
    if (const char* env = std::getenv("HORSESHOE_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(i) for i in [0, count) on up to `workers` threads. Indices are
/// handed out dynamically; callers write into slot i so the result does not
/// depend on scheduling. Returns the exception of each failed index (null
/// where body(i) succeeded).
template <class Body>
std::vector<std::exception_ptr> parallel_for(std::size_t count, Body&& body,
                                             unsigned workers = worker_count()) {
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    auto run = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            try {
                body(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned threads = static_cast<unsigned>(std::min<std::size_t>(workers, count));
    if (threads <= 1) {
        run();
        return errors;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads - 1);
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(run);
    run();
    for (auto& th : pool) th.join();
    return errors;
}

}  // namespace horseshoe
