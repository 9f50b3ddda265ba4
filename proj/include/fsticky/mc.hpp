#ifndef FSTICKY_MC_HPP
#define FSTICKY_MC_HPP

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

#include "stats.hpp"

namespace fsticky {

// Runs body(i) for i in [0, n) on `workers` threads, in contiguous chunks.
template <class Body>
void parallel_chunks(std::uint64_t n, int workers, std::uint64_t chunk, Body&& body) {
    const std::uint64_t n_chunks = (n + chunk - 1) / chunk;
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr err;
    std::mutex err_mu;
    auto work = [&] {
        for (;;) {
            const std::uint64_t c = next.fetch_add(1);
            if (c >= n_chunks) return;
            try {
                body(c, c * chunk, std::min(n, (c + 1) * chunk));
            } catch (...) {
                std::lock_guard lk(err_mu);
                if (!err) err = std::current_exception();
                next = n_chunks;
            }
        }
    };
    const int w = std::max(1, workers);
    if (w == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (int i = 0; i < w; ++i) pool.emplace_back(work);
    }
    if (err) std::rethrow_exception(err);
}

// Monte Carlo over n_paths independent paths; path(i, out) writes n_out
// values. Chunk accumulators are merged in chunk order, so the result does
// not depend on the number of workers.
template <class PathFn>
std::vector<McAccumulator> run_mc(std::size_t n_out, std::uint64_t n_paths, int workers, PathFn&& path,
                                  std::uint64_t chunk = 1024) {
    const std::uint64_t n_chunks = (n_paths + chunk - 1) / chunk;
    std::vector<std::vector<McAccumulator>> parts(n_chunks, std::vector<McAccumulator>(n_out));
    parallel_chunks(n_paths, workers, chunk, [&](std::uint64_t c, std::uint64_t lo, std::uint64_t hi) {
        std::vector<double> buf(n_out);
        auto& acc = parts[c];
        for (std::uint64_t i = lo; i < hi; ++i) {
            path(i, std::span<double>(buf));
            for (std::size_t k = 0; k < n_out; ++k) acc[k].add(buf[k]);
        }
    });
    std::vector<McAccumulator> total(n_out);
    for (const auto& part : parts)
        for (std::size_t k = 0; k < n_out; ++k) total[k].merge(part[k]);
    return total;
}

// One scalar draw per index, returned in index order.
template <class DrawFn>
std::vector<double> collect_samples(std::uint64_t n, int workers, DrawFn&& draw, std::uint64_t chunk = 1024) {
    std::vector<double> out(n);
    parallel_chunks(n, workers, chunk, [&](std::uint64_t, std::uint64_t lo, std::uint64_t hi) {
        for (std::uint64_t i = lo; i < hi; ++i) out[i] = draw(i);
    });
    return out;
}

} // namespace fsticky

#endif
