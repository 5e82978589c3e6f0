#include "rk/reference.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "rk/numeric.hpp"
#include "rk/trajectory.hpp"

namespace rk::reference {

namespace {

std::vector<StepTrajectory> build_trajs(const Subject& s) {
  std::vector<StepTrajectory> out;
  for (const auto& row : s.obs_values)
    out.push_back(StepTrajectory::from_observations(s.obs_times, row));
  return out;
}

// E_j(t) with the integral limit at min(obs_limit, t)
double subject_exponent(const KernelParams& params, KernelModel model,
                        S0Policy s0, const Subject& subj,
                        const std::vector<StepTrajectory>& trajs, double t,
                        double obs_limit) {
  return exponent(model, s0, params, trajs, subj.fixed_covariates, t,
                  subj.final_obs_time(), obs_limit);
}

}  // namespace

double neg_log_pl(const KernelParams& params, KernelModel model, S0Policy s0,
                  const Dataset& data) {
  if (data.n_events() == 0)
    throw std::invalid_argument("neg_log_pl: dataset has no events");

  std::vector<std::vector<StepTrajectory>> trajs;
  for (const auto& s : data.subjects) trajs.push_back(build_trajs(s));

  double nll = 0.0;
  for (std::size_t i = 0; i < data.subjects.size(); ++i) {
    const Subject& si = data.subjects[i];
    if (!si.event) continue;
    const double t = si.event_time;
    std::vector<double> exps;
    for (std::size_t j = 0; j < data.subjects.size(); ++j) {
      const Subject& sj = data.subjects[j];
      if (sj.event_time < t) continue;
      exps.push_back(subject_exponent(params, model, s0, sj, trajs[j], t,
                                      sj.final_obs_time()));
    }
    nll += log_sum_exp(exps) -
           subject_exponent(params, model, s0, si, trajs[i], t, si.final_obs_time());
  }
  return nll;
}

BaseHazard breslow_jumps(const KernelParams& params, KernelModel model,
                         S0Policy s0, const Dataset& data) {
  std::vector<std::vector<StepTrajectory>> trajs;
  for (const auto& s : data.subjects) trajs.push_back(build_trajs(s));

  std::vector<double> times;
  for (const auto& s : data.subjects)
    if (s.event) times.push_back(s.event_time);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  BaseHazard h;
  for (double t : times) {
    int d = 0;
    double denom = 0.0;
    for (std::size_t j = 0; j < data.subjects.size(); ++j) {
      const Subject& sj = data.subjects[j];
      if (sj.event && sj.event_time == t) ++d;
      if (sj.event_time >= t)
        denom += std::exp(subject_exponent(params, model, s0, sj, trajs[j], t,
                                           sj.final_obs_time()));
    }
    h.jump_times.push_back(t);
    h.jumps.push_back(d / denom);
  }
  return h;
}

double predict_rk(const KernelParams& params, KernelModel model, S0Policy s0,
                  const Dataset& train, const Subject& subject, double base_time,
                  double prediction_time, double lower_time) {
  const double lower = lower_time < 0.0 ? base_time : lower_time;
  if (prediction_time <= lower) return 1.0;

  const BaseHazard h = breslow_jumps(params, model, s0, train);

  const auto& ot = subject.obs_times;
  const auto it = std::upper_bound(ot.begin(), ot.end(), base_time);
  if (it == ot.begin())
    throw std::invalid_argument("predict_rk: no observation at or before base time");
  const double obs_limit = *(it - 1);
  const auto trajs = build_trajs(subject);

  double cum = 0.0;
  for (std::size_t k = 0; k < h.jump_times.size(); ++k) {
    const double t = h.jump_times[k];
    if (t < lower || t > prediction_time) continue;
    cum += h.jumps[k] *
           std::exp(subject_exponent(params, model, s0, subject, trajs, t, obs_limit));
  }
  return std::exp(-cum);
}

double prediction_error(const DynamicModel& model, const Dataset& test, double t,
                        double u, LossFn fn) {
  if (u < t) throw std::invalid_argument("prediction_error: u must be >= t");
  double sum = 0.0;
  int n = 0;
  for (const auto& s : test.subjects) {
    if (s.event_time < t) continue;
    ++n;
    const double pi = model.survival(s, t, u);
    if (s.event_time >= u) {
      sum += loss(fn, 1.0 - pi);
    } else if (s.event) {
      sum += loss(fn, 0.0 - pi);
    } else {
      const double pi_c = model.survival_conditional(s, t, s.event_time, u);
      sum += pi_c * loss(fn, 1.0 - pi) + (1.0 - pi_c) * loss(fn, 0.0 - pi);
    }
  }
  if (n == 0) throw std::runtime_error("prediction_error: empty test risk set at t");
  return sum / n;
}

}  // namespace rk::reference
