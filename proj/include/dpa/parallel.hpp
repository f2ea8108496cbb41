#pragma once

#include <cstddef>
#include <vector>

namespace dpa {

// Execution policy for the Monte Carlo engines. Work is cut into fixed-size
// batches with their own rng substreams; per-batch partials are folded in
// batch order afterwards, so results are bitwise identical for any worker
// count and for the serial reference path (parallel = false).
struct ExecPolicy {
  bool parallel = true;
  std::size_t batch_size = 4096;
};

inline std::size_t batch_count(std::size_t total, const ExecPolicy& policy) {
  if (total == 0) return 0;
  return (total + policy.batch_size - 1) / policy.batch_size;
}

// fn(batch_index, begin, end) -> Partial. The parallel path and the serial
// reference run the same per-batch code; only the loop driver differs.
template <typename Partial, typename BatchFn>
std::vector<Partial> map_batches(std::size_t total, const ExecPolicy& policy,
                                 BatchFn&& fn) {
  const std::size_t nb = batch_count(total, policy);
  std::vector<Partial> partials(nb);
  if (policy.parallel) {
#pragma omp parallel for schedule(dynamic)
    for (long long b = 0; b < static_cast<long long>(nb); ++b) {
      const std::size_t idx = static_cast<std::size_t>(b);
      const std::size_t begin = idx * policy.batch_size;
      const std::size_t end = std::min(begin + policy.batch_size, total);
      partials[idx] = fn(idx, begin, end);
    }
  } else {
    for (std::size_t b = 0; b < nb; ++b) {
      const std::size_t begin = b * policy.batch_size;
      const std::size_t end = std::min(begin + policy.batch_size, total);
      partials[b] = fn(b, begin, end);
    }
  }
  return partials;
}

}  // namespace dpa
