#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace frogld {

int default_threads();

// Calls fn(chunk, begin, end) for fixed chunks of [0, total).  Chunk
// boundaries depend only on total and chunk_size, never on the thread count.
template <class Fn>
void for_each_chunk(std::int64_t total, std::int64_t chunk_size, int threads, Fn&& fn) {
    if (total <= 0) return;
    chunk_size = std::max<std::int64_t>(1, chunk_size);
    const std::int64_t chunks = (total + chunk_size - 1) / chunk_size;
    auto body = [&](std::int64_t c) {
        const std::int64_t b = c * chunk_size;
        fn(c, b, std::min(total, b + chunk_size));
    };
    const int nt = static_cast<int>(std::min<std::int64_t>(std::max(1, threads), chunks));
    if (nt <= 1) {
        for (std::int64_t c = 0; c < chunks; ++c) body(c);
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    auto worker = [&] {
        for (;;) {
            const std::int64_t c = next.fetch_add(1);
            if (c >= chunks) return;
            try {
                body(c);
            } catch (...) {
                std::lock_guard<std::mutex> lk(err_mu);
                if (!err) err = std::current_exception();
                next.store(chunks);
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (int i = 0; i < nt; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

// Per-chunk partial results combined in chunk order.
template <class T, class Fn, class Combine>
T chunked_reduce(std::int64_t total, std::int64_t chunk_size, int threads, T init, Fn&& fn, Combine&& combine) {
    chunk_size = std::max<std::int64_t>(1, chunk_size);
    const std::int64_t chunks = total > 0 ? (total + chunk_size - 1) / chunk_size : 0;
    std::vector<T> parts(static_cast<std::size_t>(chunks), init);
    for_each_chunk(total, chunk_size, threads, [&](std::int64_t c, std::int64_t b, std::int64_t e) {
        parts[static_cast<std::size_t>(c)] = fn(c, b, e);
    });
    T acc = init;
    for (auto& p : parts) acc = combine(acc, p);
    return acc;
}

}  // namespace frogld
