#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace sdppp {

// Index-based worker pool. Every cell owns a pre-derived RNG stream and its
// own output slot, so scheduling order cannot influence any result.
template <class Fn>
void run_cells(std::size_t n_cells, int workers, Fn&& fn) {
    if (workers <= 1 || n_cells <= 1) {
        for (std::size_t i = 0; i < n_cells; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n_cells) return;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    const int nw = std::min<std::size_t>(workers, n_cells);
    pool.reserve(nw);
    for (int w = 0; w < nw; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

}  // namespace sdppp
