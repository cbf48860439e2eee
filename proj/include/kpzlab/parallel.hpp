#pragma once

/**
 * Deterministic block-parallel loop. Indices are strided across a fixed
 * worker pool and every index writes its own output slot, so results are
 * identical for any worker count. The KPZLAB_THREADS environment variable
 * caps the pool size.
 */

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace kpzlab {

inline unsigned worker_count() {
    unsigned n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    if (const char* cap = std::getenv("KPZLAB_THREADS")) {
        const long parsed = std::strtol(cap, nullptr, 10);
        if (parsed >= 1 && parsed < static_cast<long>(n)) n = static_cast<unsigned>(parsed);
    }
    return n;
}

template <class Body>
inline void parallel_for(std::size_t count, Body&& body) {
    const std::size_t workers =
        std::min<std::size_t>(worker_count(), count == 0 ? 1 : count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t)
        pool.emplace_back([&, t] {
            try {
                for (std::size_t i = t; i < count; i += workers) body(i);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    for (auto& th : pool) th.join();
    for (auto& err : errors)
        if (err) std::rethrow_exception(err);
}

}  // namespace kpzlab
