#pragma once

#include <cstddef>
#include <functional>

namespace eotbench {

/// Worker count used by all parallel loops. Defaults to $EOTBENCH_THREADS or
/// the hardware concurrency.
std::size_t thread_count();
void set_thread_count(std::size_t threads);

/// Runs body(i) for i in [0, count). Each index must write only its own
/// output slot; the schedule never affects results.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

/// Fixed block size for reductions. Partial sums are formed per block and
/// combined in block order, so sums are identical for any thread count.
inline constexpr std::size_t kReductionBlock = 1024;

inline std::size_t block_count(std::size_t count) {
  return (count + kReductionBlock - 1) / kReductionBlock;
}

/// Runs body(block, begin, end) over the fixed reduction blocks of [0, count).
void parallel_blocks(std::size_t count,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& body);

}  // namespace eotbench
