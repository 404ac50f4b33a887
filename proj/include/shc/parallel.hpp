#pragma once

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <thread>
#include <vector>

namespace shc {

// Worker count: SHC_THREADS if set, else hardware concurrency.
inline int worker_count()
{
    if (const char* env = std::getenv("SHC_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1)
            return n;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

// Runs body(chunk_index, begin, end) over [0, n) split into fixed-size
// chunks. Chunk boundaries depend only on (n, chunk), never on the worker
// count, so per-chunk reductions are reproducible; callers combine chunk
// results in index order.
template <class Body>
void parallel_chunks(std::int64_t n, std::int64_t chunk, Body&& body)
{
    if (n <= 0)
        return;
    if (chunk <= 0)
        chunk = 1;
    const std::int64_t n_chunks = (n + chunk - 1) / chunk;
    const int workers = std::min<std::int64_t>(worker_count(), n_chunks);

    if (workers <= 1) {
        for (std::int64_t c = 0; c < n_chunks; ++c)
            body(c, c * chunk, std::min(n, (c + 1) * chunk));
        return;
    }

    std::atomic<std::int64_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::int64_t c = next.fetch_add(1);
                if (c >= n_chunks)
                    return;
                body(c, c * chunk, std::min(n, (c + 1) * chunk));
            }
        });
    }
    for (auto& t : pool)
        t.join();
}

} // namespace shc
