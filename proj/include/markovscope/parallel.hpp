#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace mscope {

// Worker count requested through MARKOV_SCOPE_THREADS.  Unset, "0", or
// anything unparsable means "use the hardware count".
inline unsigned thread_count_from_env() {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    const char* raw = std::getenv("MARKOV_SCOPE_THREADS");
    if (!raw || *raw == '\0') return hw;
    char* end = nullptr;
    const unsigned long parsed = std::strtoul(raw, &end, 10);
    if (end == raw || *end != '\0' || parsed == 0) return hw;
    return static_cast<unsigned>(std::min(parsed, 256ul));
}

// Runs body(i) for i in [0, n).  Work is split into contiguous index ranges,
// so callers that write results into preallocated slot i get identical output
// for any worker count.  The first exception thrown by any worker is
// rethrown after all workers join.
template <typename Body>
inline void parallel_for(std::size_t n, unsigned threads, Body&& body) {
    if (n == 0) return;
    const std::size_t workers = std::min<std::size_t>(std::max(threads, 1u), n);
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }

    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);

    const std::size_t base = n / workers;
    const std::size_t extra = n % workers;
    std::size_t begin = 0;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t len = base + (w < extra ? 1 : 0);
        const std::size_t end = begin + len;
        pool.emplace_back([&, begin, end] {
            try {
                for (std::size_t i = begin; i < end; ++i) body(i);
            } catch (...) {
                const std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
        begin = end;
    }
    for (auto& worker : pool) worker.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace mscope
