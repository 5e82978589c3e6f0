#pragma once

#include <functional>
#include <vector>

namespace rk {

struct OptimizerConfig {
  double x_tol = 1e-8;      // fractional precision of each line minimization
  double f_tol = 1e-9;      // fractional objective decrease per sweep to stop
  int max_iters = 0;        // direction-set sweeps; 0 means 200 * dimension
  int max_line_evals = 100; // evaluation budget per line minimization
};

struct MinimizeResult {
  std::vector<double> x;
  double f = 0.0;
  bool converged = false;
  long n_evals = 0;
  int n_sweeps = 0;
};

using Objective = std::function<double(const std::vector<double>&)>;

// Powell's direction-set method with golden-section bracketing and Brent
// line minimization. Derivative free, deterministic. The direction set is
// re-initialised to the coordinate axes every d sweeps. Throws
// std::invalid_argument if the objective is not finite at x0 and
// std::runtime_error (with the offending point) if it turns non-finite
// during the search.
MinimizeResult minimize(const Objective& objective, std::vector<double> x0,
                        const OptimizerConfig& cfg = {});

}  // namespace rk
