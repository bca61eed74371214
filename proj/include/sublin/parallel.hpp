#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace sublin {

// Deterministic chunked reduction. Items are grouped into fixed-size
// chunks; workers claim chunk indices from an atomic counter and store
// their partials by chunk index; partials are merged in ascending chunk
// order after the join. The result is therefore identical for any jobs
// value, including 1.
template <class MakeFn, class ItemFn, class MergeFn>
void chunked_reduce(std::size_t n_items, std::size_t chunk_size, int jobs, MakeFn make,
                    ItemFn item, MergeFn merge) {
    if (n_items == 0) return;
    if (chunk_size == 0) chunk_size = 1;
    const std::size_t n_chunks = (n_items + chunk_size - 1) / chunk_size;
    using Partial = decltype(make());

    std::vector<Partial> partials;
    partials.reserve(n_chunks);
    for (std::size_t c = 0; c < n_chunks; ++c) partials.push_back(make());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t c = next.fetch_add(1); c < n_chunks; c = next.fetch_add(1)) {
            const std::size_t lo = c * chunk_size;
            const std::size_t hi = std::min(lo + chunk_size, n_items);
            for (std::size_t i = lo; i < hi; ++i) item(partials[c], i);
        }
    };

    const auto n_workers = static_cast<std::size_t>(jobs < 1 ? 1 : jobs);
    if (n_workers <= 1 || n_chunks <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        const std::size_t spawn = std::min(n_workers, n_chunks) - 1;
        pool.reserve(spawn);
        for (std::size_t t = 0; t < spawn; ++t) pool.emplace_back(worker);
        worker();
        for (auto& th : pool) th.join();
    }

    for (std::size_t c = 0; c < n_chunks; ++c) merge(partials[c]);
}

}  // namespace sublin
