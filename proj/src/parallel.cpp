#include "spde/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace spde {

unsigned default_thread_count() noexcept {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : n;
}

BlockPlan plan_blocks(std::uint64_t count, std::uint64_t min_block,
                      std::uint64_t max_blocks) noexcept {
  const std::uint64_t spread = max_blocks == 0 ? count : (count + max_blocks - 1) / max_blocks;
  return {count, std::max<std::uint64_t>({min_block, spread, 1})};
}

unsigned effective_threads(std::uint64_t n_blocks, unsigned threads) noexcept {
  if (threads == 0) threads = default_thread_count();
  return static_cast<unsigned>(std::max<std::uint64_t>(1, std::min<std::uint64_t>(threads, n_blocks)));
}

void parallel_for_blocks(std::uint64_t n_blocks, unsigned threads,
                         const std::function<void(unsigned, std::uint64_t)>& fn) {
  const unsigned workers = effective_threads(n_blocks, threads);
  if (workers == 1) {
    for (std::uint64_t b = 0; b < n_blocks; ++b) fn(0, b);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&](unsigned id) {
    try {
      for (;;) {
        if (failed.load(std::memory_order_relaxed)) return;
        const std::uint64_t b = next.fetch_add(1, std::memory_order_relaxed);
        if (b >= n_blocks) return;
        fn(id, b);
      }
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
      failed.store(true);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (unsigned id = 1; id < workers; ++id) pool.emplace_back(work, id);
  work(0);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace spde
