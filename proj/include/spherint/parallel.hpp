#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace spherint::par {

/// Worker cap: min(hardware, SPHERINT_THREADS if set, explicit override).
std::size_t max_threads();
void set_max_threads(std::size_t n);  // 0 restores the default

/// Runs fn(block_index) for block_index in [0, blocks), distributing blocks
/// over workers. Results must be written to preallocated slots; the caller
/// merges them in fixed order so the reduction is schedule-independent.
void for_each_block(std::size_t blocks, const std::function<void(std::size_t)>& fn);

/// Fixed pairwise tree reduction over a vector of partials; deterministic
/// regardless of how the partials were produced.
template <class T, class Merge>
T tree_reduce(std::vector<T> items, Merge merge) {
  while (items.size() > 1) {
    std::vector<T> next;
    next.reserve((items.size() + 1) / 2);
    for (std::size_t i = 0; i + 1 < items.size(); i += 2)
      next.push_back(merge(items[i], items[i + 1]));
    if (items.size() % 2 == 1) next.push_back(items.back());
    items = std::move(next);
  }
  return items.front();
}

}  // namespace spherint::par
