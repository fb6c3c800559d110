#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace bdbridge {

// Runs body(state, chunk, begin, end) over fixed-size chunks of [0, n) on up
// to `threads` workers, each owning one state made by make_state(). Chunk
// boundaries depend only on n and chunk_size, so callers that seed per chunk
// and reduce per-chunk partials in chunk order get results independent of the
// thread count. The first exception thrown by any worker is rethrown.
template <class MakeState, class Body>
void parallel_chunks(std::size_t n, std::size_t chunk_size, int threads, MakeState&& make_state,
                     Body&& body) {
    chunk_size = std::max<std::size_t>(chunk_size, 1);
    const std::size_t chunks = (n + chunk_size - 1) / chunk_size;
    if (chunks == 0) {
        return;
    }
    const auto workers =
        static_cast<std::size_t>(std::clamp<std::size_t>(threads < 1 ? 1 : threads, 1, chunks));

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto run = [&] {
        try {
            auto state = make_state();
            for (;;) {
                const std::size_t c = next.fetch_add(1);
                if (c >= chunks) {
                    break;
                }
                const std::size_t begin = c * chunk_size;
                body(state, c, begin, std::min(n, begin + chunk_size));
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) {
                failure = std::current_exception();
            }
            next.store(chunks);
        }
    };

    if (workers == 1) {
        run();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers - 1);
        for (std::size_t w = 1; w < workers; ++w) {
            pool.emplace_back(run);
        }
        run();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

template <class Body>
void parallel_chunks(std::size_t n, std::size_t chunk_size, int threads, Body&& body) {
    struct Empty {};
    parallel_chunks(
        n, chunk_size, threads, [] { return Empty{}; },
        [&](Empty&, std::size_t c, std::size_t b, std::size_t e) { body(c, b, e); });
}

}  // namespace bdbridge
