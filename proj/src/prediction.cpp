#include "rk/prediction.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "rk/kernels.hpp"
#include "rk/trajectory.hpp"

namespace rk {

double predict_rk(const FittedRkModel& fitted, const Subject& subject,
                  double base_time, double prediction_time, double lower_time) {
  const double u = prediction_time;
  const double lower = lower_time < 0.0 ? base_time : lower_time;
  if (lower < 0.0 || lower > u || base_time > u)
    throw std::invalid_argument("predict_rk: need 0 <= lower <= u and base <= u");
  if (u <= lower) return 1.0;  // empty integral

  const double s = subject.final_obs_time();
  // covariate history available to the predictor: last observation <= base
  const auto& ot = subject.obs_times;
  auto it = std::upper_bound(ot.begin(), ot.end(), base_time);
  if (it == ot.begin())
    throw std::invalid_argument("predict_rk: no observation at or before base time");
  const double obs_limit = *(it - 1);

  std::vector<StepTrajectory> trajs;
  for (const auto& row : subject.obs_values)
    trajs.push_back(StepTrajectory::from_observations(subject.obs_times, row));

  const RiskTable& risk = fitted.risk;
  double sum = 0.0;
  for (std::size_t k = 0; k < risk.times.size(); ++k) {
    const double t = risk.times[k];
    if (t < lower || t > u) continue;  // events counted on the closed window
    const double e_i =
        exponent(fitted.model, fitted.s0, fitted.params, trajs,
                 subject.fixed_covariates, t, s, obs_limit);
    if (!std::isfinite(e_i))
      throw std::runtime_error("predict_rk: non-finite exponent for subject " +
                               subject.id);
    sum += static_cast<double>(risk.d[k]) * std::exp(e_i - risk.log_denom[k]);
  }
  return std::exp(-sum);
}

double predict_rk(const FittedRkModel& fitted, const PredictionQuery& query) {
  return predict_rk(fitted, query.subject, query.base_time, query.prediction_time,
                    query.lower_time);
}

}  // namespace rk
