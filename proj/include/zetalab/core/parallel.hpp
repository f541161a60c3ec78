#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace zetalab {

namespace detail {

inline std::atomic<unsigned>& default_threads_slot() {
    static std::atomic<unsigned> n{0};
    return n;
}

}  // namespace detail

/// Worker count used when a caller passes 0. Set once by the CLI; falls back
/// to ZETALAB_THREADS, then 1.
inline unsigned default_threads() {
    unsigned n = detail::default_threads_slot().load();
    if (n) return n;
    if (const char* env = std::getenv("ZETALAB_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) return static_cast<unsigned>(v);
    }
    return 1;
}

inline void set_default_threads(unsigned n) { detail::default_threads_slot().store(n); }

/// Evaluates fn(i) for i in [0, n) on up to `threads` workers and returns the
/// results in index order. Work is split into contiguous blocks, so the output
/// never depends on scheduling. The first exception by index is rethrown.
template <class R, class F>
std::vector<R> parallel_map(std::size_t n, F&& fn, unsigned threads = 0) {
    if (threads == 0) threads = default_threads();
    std::vector<R> out(n);
    if (threads <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
        return out;
    }
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
    std::vector<std::exception_ptr> errors(n);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
        std::size_t lo = n * w / threads, hi = n * (w + 1) / threads;
        pool.emplace_back([&, lo, hi] {
            for (std::size_t i = lo; i < hi; ++i) {
                try {
                    out[i] = fn(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

}  // namespace zetalab
