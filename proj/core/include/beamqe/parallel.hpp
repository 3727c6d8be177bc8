#pragma once

// Deterministic data parallelism: a static chunked parallel_for and a
// fixed-shape pairwise reduction, so results never depend on thread count.

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace beamqe {

/// Worker count used by every parallel region. 0 means hardware concurrency.
void set_thread_count(unsigned n);
unsigned thread_count();

/// Calls body(begin, end) over a static partition of [0, n).
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

/// Recursive halving sum; the tree depends only on the length.
template <typename T>
T pairwise_sum(std::span<const T> xs) {
  constexpr std::size_t kLeaf = 16;
  if (xs.size() <= kLeaf) {
    T s{};
    for (const T& x : xs) s += x;
    return s;
  }
  const std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

template <typename T>
T pairwise_sum(const std::vector<T>& xs) {
  return pairwise_sum(std::span<const T>(xs));
}

}  // namespace beamqe
