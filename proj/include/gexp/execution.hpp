// Block-parallel map with an ordered reduction.
#pragma once

#include <cstddef>
#include <exception>
#include <mutex>
#include <vector>

#include <omp.h>

namespace gexp {

/// Threading policy. Work is always split into fixed-size blocks whose
/// partial results are combined in block order, so the thread count never
/// changes the numbers; `sequential` additionally pins execution to one thread.
struct Execution {
  int threads = 0;  // 0 = OpenMP default
  bool sequential = false;

  int resolved_threads() const {
    if (sequential) return 1;
    return threads > 0 ? threads : omp_get_max_threads();
  }
};

inline constexpr std::size_t kPathBlock = 1024;

/// Calls fn(block_index, begin, end) for each block of [0, n) and returns
/// the per-block results in block order.
template <typename Result, typename Fn>
std::vector<Result> map_blocks(std::size_t n, std::size_t block, const Execution& exec, Fn&& fn) {
  std::size_t n_blocks = (n + block - 1) / block;
  std::vector<Result> results(n_blocks);
  const long long nb = static_cast<long long>(n_blocks);
  std::exception_ptr failure;
  std::mutex failure_mutex;
#pragma omp parallel for schedule(dynamic, 1) num_threads(exec.resolved_threads())
  for (long long b = 0; b < nb; ++b) {
    std::size_t begin = static_cast<std::size_t>(b) * block;
    std::size_t end = begin + block < n ? begin + block : n;
    try {
      results[static_cast<std::size_t>(b)] = fn(static_cast<std::size_t>(b), begin, end);
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return results;
}

}  // namespace gexp
