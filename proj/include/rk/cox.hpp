#pragma once

#include <cstddef>
#include <vector>

namespace rk {

// Nonparametric base hazard as jump masses at distinct event times
// (Breslow form). Tied events are aggregated into a single mass.
struct BaseHazard {
  std::vector<double> jump_times;  // strictly increasing
  std::vector<double> jumps;       // > 0, one per jump time

  // Sum of jumps with lo < time <= hi.
  double sum_open_closed(double lo, double hi) const;
  // Sum of jumps with lo <= time <= hi.
  double sum_closed(double lo, double hi) const;
};

// Partial-likelihood machinery for a Cox model whose per-subject exponent
// does not change over time (the landmark model, and retarded-kernel fits
// with no longitudinal covariates). Risk sets are nested, so a single
// descending sweep with suffix sums gives the objective in O(N).
class StaticCoxEngine {
 public:
  StaticCoxEngine(std::vector<double> times, std::vector<bool> events);

  // Negative log partial likelihood for linear predictors lp (subject
  // order as passed to the constructor). Ties share the full risk set.
  double neg_log_pl(const std::vector<double>& lp) const;

  BaseHazard breslow(const std::vector<double>& lp) const;

  std::size_t n_events() const { return n_events_; }

 private:
  std::vector<double> times_;
  std::vector<bool> events_;
  std::vector<std::size_t> order_;  // subject indices, times descending
  std::size_t n_events_ = 0;
};

}  // namespace rk
