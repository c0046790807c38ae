#pragma once
// Deterministic replicate fan-out: replicate r always runs on stream
// (seed, r) and lands in slot r of the result vector, so the output is
// identical for any thread count.

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

#include "erw/rng.hpp"

namespace erw {

// Resolve a worker count: explicit request wins, then the ERWLAB_THREADS
// environment variable, then hardware concurrency.
inline unsigned resolve_threads(unsigned requested = 0) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("ERWLAB_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

// body: (replicate index, rng) -> T
template <class T, class Body>
std::vector<T> map_replicates(std::uint64_t seed, std::uint64_t count,
                              unsigned threads, Body&& body) {
    std::vector<T> results(count);
    threads = resolve_threads(threads);
    if (threads == 1 || count < 2) {
        for (std::uint64_t r = 0; r < count; ++r) {
            Philox rng(seed, r);
            results[r] = body(r, rng);
        }
        return results;
    }

    std::atomic<std::uint64_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const std::uint64_t r = next.fetch_add(1);
                if (r >= count || failed.load(std::memory_order_relaxed)) break;
                try {
                    Philox rng(seed, r);
                    results[r] = body(r, rng);
                } catch (...) {
                    if (!failed.exchange(true)) error = std::current_exception();
                    break;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
    return results;
}

}  // namespace erw
