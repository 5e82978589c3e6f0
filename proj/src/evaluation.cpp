#include "rk/evaluation.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>

#include "rk/parallel.hpp"

namespace rk {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

double loss(LossFn fn, double x) {
  return fn == LossFn::Squared ? x * x : std::fabs(x);
}

double RkDynamicModel::survival(const Subject& subject, double base_time,
                                double u) const {
  return predict_rk(fitted_, subject, base_time, u, base_time);
}

double RkDynamicModel::survival_conditional(const Subject& subject,
                                            double base_time, double lower,
                                            double u) const {
  return predict_rk(fitted_, subject, base_time, u, lower);
}

double LandmarkDynamicModel::survival(const Subject& subject, double base_time,
                                      double u) const {
  if (std::fabs(base_time - model_.landmark_time) > 1e-9)
    throw std::invalid_argument("landmark model evaluated away from its landmark time");
  const std::vector<double> z = last_observed(subject, model_.landmark_time);
  return predict_lm(model_, z, subject.fixed_covariates, u);
}

double LandmarkDynamicModel::survival_conditional(const Subject& subject,
                                                  double base_time, double lower,
                                                  double u) const {
  if (std::fabs(base_time - model_.landmark_time) > 1e-9)
    throw std::invalid_argument("landmark model evaluated away from its landmark time");
  const std::vector<double> z = last_observed(subject, model_.landmark_time);
  return predict_lm_conditional(model_, z, subject.fixed_covariates, u, lower);
}

double prediction_error(const DynamicModel& model, const Dataset& test, double t,
                        double u, LossFn fn) {
  if (u < t) throw std::invalid_argument("prediction_error: u must be >= t");

  std::vector<const Subject*> at_risk;
  for (const auto& s : test.subjects)
    if (s.event_time >= t) at_risk.push_back(&s);
  if (at_risk.empty())
    throw std::runtime_error("prediction_error: empty test risk set at t");

  std::vector<double> terms(at_risk.size());
  parallel_for(static_cast<std::ptrdiff_t>(at_risk.size()), [&](std::ptrdiff_t i) {
    const Subject& s = *at_risk[i];
    const double pi = model.survival(s, t, u);
    if (s.event_time >= u) {
      terms[i] = loss(fn, 1.0 - pi);
    } else if (s.event) {
      terms[i] = loss(fn, 0.0 - pi);
    } else {
      const double pi_c = model.survival_conditional(s, t, s.event_time, u);
      terms[i] = pi_c * loss(fn, 1.0 - pi) + (1.0 - pi_c) * loss(fn, 0.0 - pi);
    }
  });

  double sum = 0.0;
  for (double v : terms) sum += v;  // fixed order
  return sum / static_cast<double>(at_risk.size());
}

std::vector<double> make_grid(double start, double stop, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("make_grid: step must be positive");
  if (stop < start) throw std::invalid_argument("make_grid: stop before start");
  const int n = static_cast<int>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> grid(n);
  for (int i = 0; i < n; ++i) grid[i] = start + step * i;
  return grid;
}

namespace {

struct Accumulator {
  explicit Accumulator(std::size_t n_models, Protocol protocol, double anchor,
                       const std::vector<double>& grid, int n_splits,
                       std::span<const EvalModelSpec> models) {
    curves.resize(n_models);
    for (std::size_t m = 0; m < n_models; ++m) {
      auto& c = curves[m];
      c.protocol = protocol;
      c.anchor = anchor;
      c.model = models[m].name;
      c.grid = grid;
      c.per_split.assign(n_splits, std::vector<double>(grid.size(), kNaN));
    }
    risk_sizes.assign(n_splits, std::vector<double>(grid.size(), kNaN));
  }

  void finalize() {
    for (auto& c : curves) {
      const std::size_t g = c.grid.size();
      c.values.assign(g, kNaN);
      c.split_count.assign(g, 0);
      c.n_at_risk.assign(g, kNaN);
      for (std::size_t i = 0; i < g; ++i) {
        double sum = 0.0;
        int cnt = 0;
        for (const auto& row : c.per_split)
          if (!std::isnan(row[i])) {
            sum += row[i];
            ++cnt;
          }
        c.split_count[i] = cnt;
        if (cnt > 0) c.values[i] = sum / cnt;
        double rsum = 0.0;
        int rcnt = 0;
        for (const auto& row : risk_sizes)
          if (!std::isnan(row[i])) {
            rsum += row[i];
            ++rcnt;
          }
        if (rcnt > 0) c.n_at_risk[i] = rsum / rcnt;
      }
    }
  }

  std::vector<PeCurve> curves;
  std::vector<std::vector<double>> risk_sizes;  // per split x grid
};

int test_risk_size(const Dataset& test, double t) {
  int n = 0;
  for (const auto& s : test.subjects)
    if (s.event_time >= t) ++n;
  return n;
}

}  // namespace

ProtocolResult fixed_base_protocol(std::span<const EvalModelSpec> models,
                                   const Dataset& data, const SplitSpec& spec,
                                   double t, const std::vector<double>& u_grid,
                                   LossFn fn) {
  for (double u : u_grid)
    if (u < t) throw std::invalid_argument("fixed_base_protocol: grid point before t");

  ProtocolResult out;
  Accumulator acc(models.size(), Protocol::FixedBase, t, u_grid, spec.n_splits,
                  models);

  for (int k = 0; k < spec.n_splits; ++k) {
    Dataset train, test;
    try {
      std::tie(train, test) = split(data, spec, k);
    } catch (const std::exception& e) {
      out.warnings.push_back("split " + std::to_string(k) + ": " + e.what());
      continue;
    }
    const int n_risk = test_risk_size(test, t);
    for (std::size_t i = 0; i < u_grid.size(); ++i)
      acc.risk_sizes[k][i] = n_risk;
    if (n_risk == 0) {
      out.warnings.push_back("split " + std::to_string(k) +
                             ": empty test risk set at t; skipped");
      continue;
    }

    for (std::size_t m = 0; m < models.size(); ++m) {
      std::unique_ptr<DynamicModel> fitted;
      try {
        fitted = models[m].fit(train, t);
      } catch (const std::exception& e) {
        out.warnings.push_back("split " + std::to_string(k) + ", model " +
                               models[m].name + ": fit failed: " + e.what());
        continue;
      }
      for (std::size_t i = 0; i < u_grid.size(); ++i) {
        try {
          acc.curves[m].per_split[k][i] =
              prediction_error(*fitted, test, t, u_grid[i], fn);
        } catch (const std::exception& e) {
          out.warnings.push_back("split " + std::to_string(k) + ", model " +
                                 models[m].name + ", u=" + std::to_string(u_grid[i]) +
                                 ": " + e.what());
        }
      }
    }
  }

  acc.finalize();
  out.curves = std::move(acc.curves);
  return out;
}

ProtocolResult fixed_window_protocol(std::span<const EvalModelSpec> models,
                                     const Dataset& data, const SplitSpec& spec,
                                     double w, const std::vector<double>& t_grid,
                                     LossFn fn) {
  if (!(w > 0.0))
    throw std::invalid_argument("fixed_window_protocol: window must be positive");
  if (t_grid.empty())
    throw std::invalid_argument("fixed_window_protocol: empty base-time grid");

  ProtocolResult out;
  Accumulator acc(models.size(), Protocol::FixedWindow, w, t_grid, spec.n_splits,
                  models);

  for (int k = 0; k < spec.n_splits; ++k) {
    Dataset train, test;
    try {
      std::tie(train, test) = split(data, spec, k);
    } catch (const std::exception& e) {
      out.warnings.push_back("split " + std::to_string(k) + ": " + e.what());
      continue;
    }

    // models that do not depend on the base time are fitted once per split
    std::vector<std::unique_ptr<DynamicModel>> cached(models.size());
    for (std::size_t m = 0; m < models.size(); ++m) {
      if (models[m].refit_per_base) continue;
      try {
        cached[m] = models[m].fit(train, t_grid.front());
      } catch (const std::exception& e) {
        out.warnings.push_back("split " + std::to_string(k) + ", model " +
                               models[m].name + ": fit failed: " + e.what());
      }
    }

    for (std::size_t i = 0; i < t_grid.size(); ++i) {
      const double t = t_grid[i];
      const double u = t + w;
      const int n_risk = test_risk_size(test, t);
      acc.risk_sizes[k][i] = n_risk;
      if (n_risk == 0) {
        out.warnings.push_back("split " + std::to_string(k) + ", t=" +
                               std::to_string(t) + ": empty test risk set; skipped");
        continue;
      }
      for (std::size_t m = 0; m < models.size(); ++m) {
        const DynamicModel* fitted = cached[m].get();
        std::unique_ptr<DynamicModel> fresh;
        if (models[m].refit_per_base) {
          try {
            fresh = models[m].fit(train, t);
            fitted = fresh.get();
          } catch (const std::exception& e) {
            out.warnings.push_back("split " + std::to_string(k) + ", model " +
                                   models[m].name + ", t=" + std::to_string(t) +
                                   ": fit failed: " + e.what());
            continue;
          }
        }
        if (!fitted) continue;  // split-level fit failure already recorded
        try {
          acc.curves[m].per_split[k][i] = prediction_error(*fitted, test, t, u, fn);
        } catch (const std::exception& e) {
          out.warnings.push_back("split " + std::to_string(k) + ", model " +
                                 models[m].name + ", t=" + std::to_string(t) + ": " +
                                 e.what());
        }
      }
    }
  }

  acc.finalize();
  out.curves = std::move(acc.curves);
  return out;
}

}  // namespace rk
