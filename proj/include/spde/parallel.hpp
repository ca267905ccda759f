#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace spde {

/// Hardware concurrency, at least 1.
unsigned default_thread_count() noexcept;

/// Fixed partition of [0, count) into contiguous blocks. The partition depends
/// only on `count`, never on the thread count, so per-block partial results
/// merged in block order give the same bits for any number of workers.
struct BlockPlan {
  std::uint64_t count = 0;
  std::uint64_t block = 1;

  std::uint64_t blocks() const noexcept { return count == 0 ? 0 : (count + block - 1) / block; }
  std::uint64_t begin(std::uint64_t b) const noexcept { return b * block; }
  std::uint64_t end(std::uint64_t b) const noexcept {
    const std::uint64_t e = (b + 1) * block;
    return e < count ? e : count;
  }
};

/// block = max(min_block, ceil(count / max_blocks)).
BlockPlan plan_blocks(std::uint64_t count, std::uint64_t min_block = 256,
                      std::uint64_t max_blocks = 4096) noexcept;

/// Calls fn(worker, block) for every block on up to `threads` workers (0 = default).
/// Blocks are claimed dynamically; worker ids are in [0, threads). The first
/// exception thrown by fn stops the remaining work and is rethrown here.
void parallel_for_blocks(std::uint64_t n_blocks, unsigned threads,
                         const std::function<void(unsigned worker, std::uint64_t block)>& fn);

/// Number of workers parallel_for_blocks will use.
unsigned effective_threads(std::uint64_t n_blocks, unsigned threads) noexcept;

}  // namespace spde
