#include "rk/landmark.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rk/optimizer.hpp"

namespace rk {

std::vector<double> last_observed(const Subject& subject, double upsilon) {
  const auto& t = subject.obs_times;
  auto it = std::upper_bound(t.begin(), t.end(), upsilon);
  if (it == t.begin())
    throw std::invalid_argument("last_observed: no observation at or before upsilon");
  const std::size_t idx = static_cast<std::size_t>(it - t.begin()) - 1;
  std::vector<double> out(subject.obs_values.size());
  for (std::size_t mu = 0; mu < out.size(); ++mu)
    out[mu] = subject.obs_values[mu][idx];
  return out;
}

LandmarkModel fit_landmark(const Dataset& data, double upsilon,
                           const FitConfig& cfg) {
  const std::size_t p = data.n_long();
  const std::size_t q = data.n_fixed();
  const std::size_t d = p + q;

  // risk set: subjects with T_i strictly greater than upsilon
  std::vector<const Subject*> risk;
  for (const auto& s : data.subjects)
    if (s.event_time > upsilon) risk.push_back(&s);
  if (risk.empty())
    throw std::runtime_error("fit_landmark: empty risk set at upsilon");

  std::vector<double> times;
  std::vector<bool> events;
  std::vector<std::vector<double>> x;  // p + q covariates per risk-set subject
  std::size_t n_events = 0;
  for (const Subject* s : risk) {
    times.push_back(s->event_time);
    events.push_back(s->event);
    n_events += s->event ? 1 : 0;
    std::vector<double> row = last_observed(*s, upsilon);
    row.insert(row.end(), s->fixed_covariates.begin(), s->fixed_covariates.end());
    x.push_back(std::move(row));
  }
  if (n_events == 0)
    throw std::runtime_error("fit_landmark: no events after upsilon");

  const StaticCoxEngine engine(times, events);

  LandmarkModel out;
  out.landmark_time = upsilon;
  out.meta.seed = cfg.seed;
  for (const Subject* s : risk) out.risk_set_ids.push_back(s->id);

  std::vector<double> lp(risk.size());
  auto fill_lp = [&](const std::vector<double>& beta) {
    for (std::size_t i = 0; i < risk.size(); ++i) {
      double v = 0.0;
      for (std::size_t k = 0; k < d; ++k) v += beta[k] * x[i][k];
      lp[i] = v;
    }
  };

  if (d == 0) {
    fill_lp({});
    out.objective_value = engine.neg_log_pl(lp);
    out.converged = true;
  } else {
    auto fn = [&](const std::vector<double>& beta) {
      fill_lp(beta);
      return engine.neg_log_pl(lp);
    };
    std::vector<std::vector<double>> starts = cfg.starts;
    if (starts.empty()) starts.push_back(std::vector<double>(d, 0.0));
    out.meta.starts = starts;
    double best_f = std::numeric_limits<double>::infinity();
    std::vector<double> best(d, 0.0);
    for (std::size_t si = 0; si < starts.size(); ++si) {
      const MinimizeResult r = minimize(fn, starts[si], cfg.opt);
      out.meta.start_objectives.push_back(r.f);
      out.meta.start_evals.push_back(r.n_evals);
      out.meta.start_sweeps.push_back(r.n_sweeps);
      out.meta.start_converged.push_back(r.converged);
      if (r.f < best_f) {
        best_f = r.f;
        best = r.x;
        out.converged = r.converged;
        out.meta.best_start = static_cast<int>(si);
      }
    }
    out.objective_value = best_f;
    out.alpha.assign(best.begin(), best.begin() + p);
    out.gamma.assign(best.begin() + p, best.end());
    fill_lp(best);
  }

  out.base_hazard = engine.breslow(lp);
  return out;
}

namespace {

double lm_linear_predictor(const LandmarkModel& model, std::span<const double> z,
                           std::span<const double> fixed) {
  if (z.size() != model.alpha.size() || fixed.size() != model.gamma.size())
    throw std::invalid_argument("predict_lm: covariate count mismatch");
  double lp = 0.0;
  for (std::size_t mu = 0; mu < z.size(); ++mu) lp += model.alpha[mu] * z[mu];
  for (std::size_t nu = 0; nu < fixed.size(); ++nu) lp += model.gamma[nu] * fixed[nu];
  return lp;
}

}  // namespace

double predict_lm(const LandmarkModel& model, std::span<const double> z,
                  std::span<const double> fixed, double u) {
  if (u < model.landmark_time)
    throw std::invalid_argument("predict_lm: u before landmark time");
  const double lp = lm_linear_predictor(model, z, fixed);
  const double cum = model.base_hazard.sum_open_closed(model.landmark_time, u);
  return std::exp(-std::exp(lp) * cum);
}

double predict_lm_conditional(const LandmarkModel& model, std::span<const double> z,
                              std::span<const double> fixed, double u,
                              double t_censor) {
  if (t_censor < model.landmark_time || u < t_censor)
    throw std::invalid_argument("predict_lm_conditional: need upsilon <= t_censor <= u");
  const double lp = lm_linear_predictor(model, z, fixed);
  const double cum = model.base_hazard.sum_open_closed(t_censor, u);
  return std::exp(-std::exp(lp) * cum);
}

}  // namespace rk
