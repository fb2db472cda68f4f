#pragma once

#include <cstddef>
#include <cstdint>

namespace frost::parallel {

/// Returns true when OpenMP kernels are active. Serial fallback is used
/// when OpenMP is unavailable or explicitly disabled via set_enabled(false).
bool enabled();

void set_enabled(bool on);

int max_threads();

/// Runs f(i) for i in [0, n). Parallelized with OpenMP when enabled.
/// Every kernel built on this must write to disjoint slots so that the
/// result is independent of the schedule; reductions happen afterwards
/// in index order.
template <class F>
void for_each_index(std::size_t n, F&& f) {
#ifdef _OPENMP
  if (enabled() && n > 1) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(n); ++i) {
      f(static_cast<std::size_t>(i));
    }
    return;
  }
#endif
  for (std::size_t i = 0; i < n; ++i) {
    f(i);
  }
}

}  // namespace frost::parallel
