#pragma once

#include <cstddef>
#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rk {

// Global worker cap for the OpenMP kernels. 0 means "use all hardware
// threads". Results never depend on this value: every parallel loop writes
// into a pre-sized slot per index and reductions run serially afterwards in
// index order.
void set_jobs(int jobs);
int jobs();

namespace detail {

inline int effective_threads() {
#ifdef _OPENMP
  const int j = jobs();
  return j > 0 ? j : omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace detail

// Runs fn(i) for i in [0, n). fn must only touch state owned by index i.
// The first exception thrown by any worker is rethrown on the caller.
template <typename Fn>
void parallel_for(std::ptrdiff_t n, Fn&& fn) {
#ifdef _OPENMP
  std::exception_ptr err;
#pragma omp parallel for schedule(static) num_threads(rk::detail::effective_threads())
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      fn(i);
    } catch (...) {
#pragma omp critical(rk_parallel_for_err)
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
#else
  for (std::ptrdiff_t i = 0; i < n; ++i) fn(i);
#endif
}

}  // namespace rk
