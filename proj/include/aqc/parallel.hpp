#pragma once

#include <complex>
#include <cstddef>
#include <functional>

namespace aqc {

/// Engine-wide worker count. 1 disables threading entirely.
void set_thread_count(unsigned n);
unsigned thread_count();

/// Runs fn(lo, hi) over a partition of [0, n). Each index lands in exactly one
/// chunk, so element-wise writes are identical for every worker count. Callers
/// that reduce must do so over fixed blocks, not over chunks.
void parallel_for(std::size_t n, std::size_t grain,
                  const std::function<void(std::size_t, std::size_t)>& fn);

/// Pairwise (tree) summation over fixed power-of-two blocks. The split points
/// depend only on the range, never on the worker count, so sums are bitwise
/// reproducible whether or not blocks are evaluated concurrently.
template <typename T, typename Leaf>
T pairwise_sum(std::size_t lo, std::size_t hi, const Leaf& leaf,
               std::size_t block = 1024) {
    std::size_t n = hi - lo;
    if (n == 0) return T{};
    if (n <= block) {
        T acc{};
        for (std::size_t i = lo; i < hi; ++i) acc += leaf(i);
        return acc;
    }
    std::size_t half = block;
    while (half * 2 < n) half *= 2;
    return pairwise_sum<T>(lo, lo + half, leaf, block) +
           pairwise_sum<T>(lo + half, hi, leaf, block);
}

}  // namespace aqc
