#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rk/cox.hpp"
#include "rk/data.hpp"
#include "rk/kernels.hpp"
#include "rk/optimizer.hpp"
#include "rk/trajectory.hpp"

namespace rk {

struct FitConfig {
  OptimizerConfig opt;
  // Explicit start points in packed coordinates (a..., log tau..., gamma...).
  // Empty means the defaults: everything 0 with log tau at log(0.1*Tbar)
  // and log(Tbar), Tbar the mean observed event time.
  std::vector<std::vector<double>> starts;
  std::uint64_t seed = 0;  // recorded in fit metadata
  int jobs = -1;           // worker cap for objective evaluation; -1 inherits
};

struct FitMeta {
  std::uint64_t seed = 0;
  std::vector<std::vector<double>> starts;
  std::vector<double> start_objectives;
  std::vector<long> start_evals;
  std::vector<int> start_sweeps;
  std::vector<bool> start_converged;
  int best_start = -1;
  std::vector<std::string> warnings;
};

// Risk-set denominators of the partial likelihood, evaluated once per
// distinct training event time: log sum_{k: T_k >= t} exp(E_k(t)). Shared
// by the Breslow estimator and the dynamic predictor.
struct RiskTable {
  std::vector<double> times;      // distinct event times, ascending
  std::vector<int> d;             // number of events at each time
  std::vector<double> log_denom;
};

// Negative log partial likelihood of the retarded-kernel hazard (the
// minimisation objective). Builds per-subject trajectory caches once;
// each evaluation is OpenMP-parallel over distinct event times with a
// deterministic final reduction. Fits with no longitudinal covariates
// reduce to a static Cox engine with suffix-sum risk sets.
class RkObjective {
 public:
  RkObjective(const Dataset& data, KernelModel model, S0Policy s0);

  double operator()(const KernelParams& params) const;

  std::size_t dim() const { return 2 * p_ + q_; }
  std::size_t n_long() const { return p_; }
  std::size_t n_fixed() const { return q_; }

  // packed optimizer coordinates: (a..., log tau..., gamma...)
  KernelParams unpack(const std::vector<double>& v) const;
  std::vector<double> pack(const KernelParams& params) const;

  RiskTable risk_table(const KernelParams& params) const;

 private:
  struct SubjectCache {
    double T = 0.0;
    bool event = false;
    double s = 0.0;
    const Subject* subject = nullptr;
    std::vector<StepTrajectory> trajs;  // p entries
    std::vector<double> z_total;        // integral of z over [0, s], p entries
    std::vector<double> z0;             // baseline values, p entries
    std::vector<double> fixed;          // q entries
  };

  struct EvalCache {
    std::vector<double> fixed_part;  // per subject
    std::vector<double> weighted;    // per subject x covariate, shifted sum at m = s
    std::vector<double> denom_a;     // per subject x covariate, -expm1(-s/tau)
  };

  EvalCache build_eval_cache(const KernelParams& params) const;
  double subject_exponent(std::size_t j, double t, const KernelParams& params,
                          const EvalCache& cache) const;
  double log_risk_denominator(double t, const KernelParams& params,
                              const EvalCache& cache,
                              std::vector<double>& buffer) const;

  std::vector<SubjectCache> subjects_;
  std::vector<double> distinct_event_times_;            // ascending
  std::vector<std::vector<std::size_t>> events_at_;     // subject indices per time
  std::size_t p_ = 0, q_ = 0;
  KernelModel model_;
  S0Policy s0_;
  std::optional<StaticCoxEngine> static_engine_;  // p == 0 shortcut
};

struct FittedRkModel {
  KernelModel model = KernelModel::A;
  S0Policy s0 = S0Policy::Constant;
  KernelParams params;
  std::shared_ptr<const Dataset> train;
  double objective_value = 0.0;
  bool converged = false;
  FitMeta meta;
  RiskTable risk;
};

double neg_log_pl(const KernelParams& params, KernelModel model, S0Policy s0,
                  const Dataset& data);

FittedRkModel fit_rk(const Dataset& data, KernelModel model, S0Policy s0,
                     const FitConfig& cfg = {});

// Rebuilds the derived risk table for parameters obtained elsewhere
// (e.g. a fit file read back from disk).
FittedRkModel revive_fitted(KernelModel model, S0Policy s0, KernelParams params,
                            std::shared_ptr<const Dataset> train,
                            double objective_value, bool converged,
                            FitMeta meta = {});

BaseHazard breslow_jumps(const FittedRkModel& fitted);

}  // namespace rk
