#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace rk {

// log(sum_k exp(v[k])) with a max shift. Summation order is the order of v,
// so the result is reproducible run to run.
inline double log_sum_exp(std::span<const double> v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v)
    if (x > m) m = x;
  if (!std::isfinite(m)) return m;  // empty or all -inf
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

inline bool approx_rel(double a, double b, double rel, double abs_floor = 0.0) {
  const double diff = std::fabs(a - b);
  const double scale = std::max(std::fabs(a), std::fabs(b));
  return diff <= std::max(rel * scale, abs_floor);
}

}  // namespace rk
