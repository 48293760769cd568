#include "spherint/parallel.hpp"

#include <algorithm>
#include <cstdlib>

namespace spherint::par {

namespace {
std::size_t g_override = 0;
}

std::size_t max_threads() {
  if (g_override > 0) return g_override;
  std::size_t n = std::thread::hardware_concurrency();
  if (n == 0) n = 1;
  if (const char* env = std::getenv("SPHERINT_THREADS")) {
    const long cap = std::atol(env);
    if (cap > 0) n = std::min<std::size_t>(n, static_cast<std::size_t>(cap));
  }
  return n;
}

void set_max_threads(std::size_t n) { g_override = n; }

void for_each_block(std::size_t blocks,
                    const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min(max_threads(), blocks);
  if (workers <= 1) {
    for (std::size_t b = 0; b < blocks; ++b) fn(b);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (;;) {
        const std::size_t b = next.fetch_add(1);
        if (b >= blocks) return;
        fn(b);
      }
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace spherint::par
