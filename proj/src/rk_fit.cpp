#include "rk/rk_fit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "rk/numeric.hpp"
#include "rk/parallel.hpp"

namespace rk {

namespace {

// sum_l v_l (e^{(b_l - s)/tau} - e^{(b_{l-1} - s)/tau}) over the full
// observation window [0, s]; the t-independent factor of both kernels.
double weighted_sum_full(const StepTrajectory& traj, double s, double tau) {
  const auto& cps = traj.change_points();
  const auto& vals = traj.segment_values();
  double out = 0.0;
  double start = 0.0;
  for (std::size_t i = 0; i < vals.size() && start < s; ++i) {
    const double end = i < cps.size() ? std::min(cps[i], s) : s;
    if (end > start) {
      out += vals[i] * detail::exp_diff((start - s) / tau, (end - s) / tau);
      start = end;
    }
  }
  return out;
}

}  // namespace

RkObjective::RkObjective(const Dataset& data, KernelModel model, S0Policy s0)
    : p_(data.n_long()), q_(data.n_fixed()), model_(model), s0_(s0) {
  if (data.n_events() == 0)
    throw std::invalid_argument("neg_log_pl: dataset has no events");

  subjects_.reserve(data.subjects.size());
  for (const auto& s : data.subjects) {
    SubjectCache c;
    c.T = s.event_time;
    c.event = s.event;
    c.s = s.final_obs_time();
    c.subject = &s;
    c.fixed = s.fixed_covariates;
    for (std::size_t mu = 0; mu < p_; ++mu) {
      c.trajs.push_back(StepTrajectory::from_observations(s.obs_times, s.obs_values[mu]));
      c.z0.push_back(s.obs_values[mu].front());
      double total = 0.0;
      for (const auto& seg : c.trajs.back().segments_up_to(c.s))
        total += seg.value * (seg.end - seg.start);
      c.z_total.push_back(total);
    }
    subjects_.push_back(std::move(c));
  }

  // group events by distinct time
  std::vector<std::size_t> ev;
  for (std::size_t j = 0; j < subjects_.size(); ++j)
    if (subjects_[j].event) ev.push_back(j);
  std::stable_sort(ev.begin(), ev.end(), [&](std::size_t a, std::size_t b) {
    return subjects_[a].T < subjects_[b].T;
  });
  for (std::size_t j : ev) {
    if (distinct_event_times_.empty() || subjects_[j].T != distinct_event_times_.back()) {
      distinct_event_times_.push_back(subjects_[j].T);
      events_at_.emplace_back();
    }
    events_at_.back().push_back(j);
  }

  if (p_ == 0) {
    std::vector<double> times;
    std::vector<bool> events;
    for (const auto& s : subjects_) {
      times.push_back(s.T);
      events.push_back(s.event);
    }
    static_engine_.emplace(std::move(times), std::move(events));
  }
}

KernelParams RkObjective::unpack(const std::vector<double>& v) const {
  if (v.size() != dim()) throw std::invalid_argument("unpack: wrong dimension");
  KernelParams out;
  out.a.assign(v.begin(), v.begin() + p_);
  out.tau.resize(p_);
  for (std::size_t mu = 0; mu < p_; ++mu) out.tau[mu] = std::exp(v[p_ + mu]);
  out.gamma.assign(v.begin() + 2 * p_, v.end());
  return out;
}

std::vector<double> RkObjective::pack(const KernelParams& params) const {
  std::vector<double> v;
  v.insert(v.end(), params.a.begin(), params.a.end());
  for (double t : params.tau) v.push_back(std::log(t));
  v.insert(v.end(), params.gamma.begin(), params.gamma.end());
  return v;
}

RkObjective::EvalCache RkObjective::build_eval_cache(const KernelParams& params) const {
  const std::size_t n = subjects_.size();
  EvalCache cache;
  cache.fixed_part.resize(n);
  cache.weighted.assign(n * p_, 0.0);
  cache.denom_a.assign(n * p_, 0.0);
  parallel_for(static_cast<std::ptrdiff_t>(n), [&](std::ptrdiff_t j) {
    const auto& subj = subjects_[j];
    double fp = 0.0;
    for (std::size_t nu = 0; nu < q_; ++nu) fp += params.gamma[nu] * subj.fixed[nu];
    cache.fixed_part[j] = fp;
    if (subj.s > 0.0) {
      for (std::size_t mu = 0; mu < p_; ++mu) {
        const double tau = std::max(params.tau[mu], 1e-12);
        cache.weighted[j * p_ + mu] = weighted_sum_full(subj.trajs[mu], subj.s, tau);
        cache.denom_a[j * p_ + mu] = -std::expm1(-subj.s / tau);
      }
    }
  });
  return cache;
}

double RkObjective::subject_exponent(std::size_t j, double t,
                                     const KernelParams& params,
                                     const EvalCache& cache) const {
  const auto& subj = subjects_[j];
  double e = cache.fixed_part[j];
  if (subj.s == 0.0) {
    for (std::size_t mu = 0; mu < p_; ++mu) {
      const double beta = s0_ == S0Policy::Constant
                              ? params.a[mu]
                              : params.a[mu] *
                                    std::exp(-t / std::max(params.tau[mu], 1e-12));
      e += beta * subj.z0[mu];
    }
    return e;
  }
  if (t >= subj.s) {
    // m = s: both kernels reuse the cached full-window sums
    for (std::size_t mu = 0; mu < p_; ++mu) {
      const double a = params.a[mu];
      const double tau = std::max(params.tau[mu], 1e-12);
      const double w = cache.weighted[j * p_ + mu];
      if (model_ == KernelModel::A) {
        e += a * w / cache.denom_a[j * p_ + mu];
      } else {
        const double decay = std::exp(-(t - subj.s) / tau);
        e += a * decay * w + (a / subj.s) * (1.0 - decay + std::exp(-t / tau)) *
                                 subj.z_total[mu];
      }
    }
    return e;
  }
  for (std::size_t mu = 0; mu < p_; ++mu)
    e += covariate_integral(model_, params.a[mu], params.tau[mu], t, subj.s,
                            subj.trajs[mu], subj.s);
  return e;
}

double RkObjective::log_risk_denominator(double t, const KernelParams& params,
                                         const EvalCache& cache,
                                         std::vector<double>& buffer) const {
  buffer.clear();
  for (std::size_t j = 0; j < subjects_.size(); ++j)
    if (subjects_[j].T >= t) buffer.push_back(subject_exponent(j, t, params, cache));
  return log_sum_exp(buffer);
}

double RkObjective::operator()(const KernelParams& params) const {
  if (params.a.size() != p_ || params.tau.size() != p_ || params.gamma.size() != q_)
    throw std::invalid_argument("neg_log_pl: parameter dimensions do not match data");

  if (static_engine_) {
    std::vector<double> lp(subjects_.size());
    for (std::size_t j = 0; j < subjects_.size(); ++j) {
      double fp = 0.0;
      for (std::size_t nu = 0; nu < q_; ++nu)
        fp += params.gamma[nu] * subjects_[j].fixed[nu];
      lp[j] = fp;
    }
    return static_engine_->neg_log_pl(lp);
  }

  const EvalCache cache = build_eval_cache(params);
  const std::size_t nt = distinct_event_times_.size();
  std::vector<double> terms(nt);
  parallel_for(static_cast<std::ptrdiff_t>(nt), [&](std::ptrdiff_t k) {
    const double t = distinct_event_times_[k];
    std::vector<double> buffer;
    buffer.reserve(subjects_.size());
    const double log_denom = log_risk_denominator(t, params, cache, buffer);
    double numer = 0.0;
    for (std::size_t i : events_at_[k])
      numer += subject_exponent(i, t, params, cache);
    terms[k] = static_cast<double>(events_at_[k].size()) * log_denom - numer;
  });

  double nll = 0.0;
  for (double v : terms) nll += v;  // fixed order
  if (!std::isfinite(nll)) {
    // locate a subject with a non-finite exponent for the error message
    for (std::size_t k = 0; k < nt; ++k) {
      const double t = distinct_event_times_[k];
      for (std::size_t j = 0; j < subjects_.size(); ++j) {
        if (subjects_[j].T < t) continue;
        if (!std::isfinite(subject_exponent(j, t, params, cache)))
          throw std::runtime_error("neg_log_pl: non-finite exponent for subject " +
                                   subjects_[j].subject->id);
      }
    }
  }
  return nll;
}

RiskTable RkObjective::risk_table(const KernelParams& params) const {
  RiskTable table;
  table.times = distinct_event_times_;
  table.d.resize(events_at_.size());
  for (std::size_t k = 0; k < events_at_.size(); ++k)
    table.d[k] = static_cast<int>(events_at_[k].size());
  table.log_denom.resize(table.times.size());

  if (static_engine_) {
    std::vector<double> lp(subjects_.size());
    for (std::size_t j = 0; j < subjects_.size(); ++j) {
      double fp = 0.0;
      for (std::size_t nu = 0; nu < q_; ++nu)
        fp += params.gamma[nu] * subjects_[j].fixed[nu];
      lp[j] = fp;
    }
    const BaseHazard h = static_engine_->breslow(lp);
    // log denominators back out of the jumps: log d - log jump
    for (std::size_t k = 0; k < table.times.size(); ++k)
      table.log_denom[k] =
          std::log(static_cast<double>(table.d[k])) - std::log(h.jumps[k]);
    return table;
  }

  const EvalCache cache = build_eval_cache(params);
  parallel_for(static_cast<std::ptrdiff_t>(table.times.size()), [&](std::ptrdiff_t k) {
    std::vector<double> buffer;
    table.log_denom[k] =
        log_risk_denominator(table.times[k], params, cache, buffer);
  });
  return table;
}

double neg_log_pl(const KernelParams& params, KernelModel model, S0Policy s0,
                  const Dataset& data) {
  return RkObjective(data, model, s0)(params);
}

FittedRkModel fit_rk(const Dataset& data, KernelModel model, S0Policy s0,
                     const FitConfig& cfg) {
  if (data.n_long() == 0 && data.n_fixed() == 0)
    throw std::invalid_argument("fit_rk: no covariates to fit");
  if (cfg.jobs >= 0) set_jobs(cfg.jobs);

  RkObjective objective(data, model, s0);
  const std::size_t d = objective.dim();
  const std::size_t p = objective.n_long();

  std::vector<std::vector<double>> starts = cfg.starts;
  if (starts.empty()) {
    double mean_t = 0.0;
    for (const auto& s : data.subjects) mean_t += s.event_time;
    mean_t /= static_cast<double>(data.subjects.size());
    if (!(mean_t > 0.0)) mean_t = 1.0;
    if (p == 0) {
      starts.push_back(std::vector<double>(d, 0.0));
    } else {
      for (double scale : {0.1 * mean_t, mean_t}) {
        std::vector<double> x(d, 0.0);
        for (std::size_t mu = 0; mu < p; ++mu) x[p + mu] = std::log(scale);
        starts.push_back(std::move(x));
      }
    }
  }

  FittedRkModel out;
  out.model = model;
  out.s0 = s0;
  out.converged = false;
  out.meta.seed = cfg.seed;
  out.meta.starts = starts;

  auto fn = [&](const std::vector<double>& v) { return objective(objective.unpack(v)); };

  double best_f = std::numeric_limits<double>::infinity();
  std::vector<double> best_x;
  bool any_ok = false;
  for (std::size_t si = 0; si < starts.size(); ++si) {
    if (starts[si].size() != d)
      throw std::invalid_argument("fit_rk: start point has wrong dimension");
    try {
      const MinimizeResult r = minimize(fn, starts[si], cfg.opt);
      out.meta.start_objectives.push_back(r.f);
      out.meta.start_evals.push_back(r.n_evals);
      out.meta.start_sweeps.push_back(r.n_sweeps);
      out.meta.start_converged.push_back(r.converged);
      any_ok = true;
      if (r.f < best_f) {
        best_f = r.f;
        best_x = r.x;
        out.converged = r.converged;
        out.meta.best_start = static_cast<int>(si);
      }
    } catch (const std::exception& e) {
      out.meta.start_objectives.push_back(std::numeric_limits<double>::quiet_NaN());
      out.meta.start_evals.push_back(0);
      out.meta.start_sweeps.push_back(0);
      out.meta.start_converged.push_back(false);
      out.meta.warnings.push_back("start " + std::to_string(si) +
                                  " failed: " + e.what());
    }
  }
  if (!any_ok)
    throw std::runtime_error("fit_rk: every start failed: " +
                             (out.meta.warnings.empty() ? std::string("unknown")
                                                        : out.meta.warnings.front()));
  if (!out.converged)
    out.meta.warnings.push_back("no start converged within the iteration budget; "
                                "reporting the best run");

  out.params = objective.unpack(best_x);
  out.objective_value = best_f;
  out.train = std::make_shared<Dataset>(data);
  out.risk = objective.risk_table(out.params);
  return out;
}

FittedRkModel revive_fitted(KernelModel model, S0Policy s0, KernelParams params,
                            std::shared_ptr<const Dataset> train,
                            double objective_value, bool converged, FitMeta meta) {
  FittedRkModel out;
  out.model = model;
  out.s0 = s0;
  out.params = std::move(params);
  out.train = std::move(train);
  out.objective_value = objective_value;
  out.converged = converged;
  out.meta = std::move(meta);
  out.risk = RkObjective(*out.train, model, s0).risk_table(out.params);
  return out;
}

BaseHazard breslow_jumps(const FittedRkModel& fitted) {
  BaseHazard h;
  h.jump_times = fitted.risk.times;
  h.jumps.resize(fitted.risk.times.size());
  for (std::size_t k = 0; k < h.jumps.size(); ++k)
    h.jumps[k] = std::exp(std::log(static_cast<double>(fitted.risk.d[k])) -
                          fitted.risk.log_denom[k]);
  return h;
}

}  // namespace rk
