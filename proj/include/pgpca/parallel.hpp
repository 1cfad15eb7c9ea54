#pragma once

#include <cstddef>
#include <functional>

namespace pgpca {

/// Caps the number of worker threads used inside operations. 0 restores the
/// default (hardware concurrency). Results never depend on this value.
void set_thread_count(unsigned threads);
unsigned thread_count();

/// Runs fn(block) for every block in [0, n_blocks). Blocks are independent and
/// each must write only to its own output slot, so results are identical for
/// any thread count.
void parallel_for_blocks(std::size_t n_blocks, const std::function<void(std::size_t)>& fn);

/// Fixed block length for sample-parallel passes. It is part of the
/// reduction order and therefore must not depend on the thread count.
inline constexpr std::size_t kSampleBlock = 512;

inline std::size_t block_count(std::size_t n, std::size_t block = kSampleBlock) {
  return (n + block - 1) / block;
}

}  // namespace pgpca
