#pragma once

#include "rk/cox.hpp"
#include "rk/data.hpp"
#include "rk/evaluation.hpp"
#include "rk/kernels.hpp"
#include "rk/rk_fit.hpp"

namespace rk::reference {

// Serial reference implementations, written directly from the formulas with
// no caching, no risk-table reuse and no parallelism. They exist to pin down
// the behaviour of the production kernels: tests require agreement and the
// bench tool reports the speed difference.

double neg_log_pl(const KernelParams& params, KernelModel model, S0Policy s0,
                  const Dataset& data);

BaseHazard breslow_jumps(const KernelParams& params, KernelModel model,
                         S0Policy s0, const Dataset& data);

// exp{ - sum of jumps in [lower, u] weighted by e^{E_subject} }, assembled
// from the reference Breslow estimator rather than the fitted risk table.
double predict_rk(const KernelParams& params, KernelModel model, S0Policy s0,
                  const Dataset& train, const Subject& subject, double base_time,
                  double prediction_time, double lower_time);

double prediction_error(const DynamicModel& model, const Dataset& test, double t,
                        double u, LossFn fn);

}  // namespace rk::reference
