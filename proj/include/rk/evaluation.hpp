#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "rk/data.hpp"
#include "rk/landmark.hpp"
#include "rk/prediction.hpp"
#include "rk/rk_fit.hpp"

namespace rk {

enum class LossFn { Squared, Absolute };

double loss(LossFn fn, double x);

enum class Protocol { FixedBase, FixedWindow };

// A fitted model viewed through the two predictions the error estimator
// needs: pi(u | history to base, alive at base) and the conditional
// variant pi(u | history to base, alive at lower >= base).
class DynamicModel {
 public:
  virtual ~DynamicModel() = default;
  virtual double survival(const Subject& subject, double base_time,
                          double u) const = 0;
  virtual double survival_conditional(const Subject& subject, double base_time,
                                      double lower, double u) const = 0;
};

class RkDynamicModel final : public DynamicModel {
 public:
  explicit RkDynamicModel(FittedRkModel fitted) : fitted_(std::move(fitted)) {}
  double survival(const Subject& subject, double base_time, double u) const override;
  double survival_conditional(const Subject& subject, double base_time,
                              double lower, double u) const override;
  const FittedRkModel& fitted() const { return fitted_; }

 private:
  FittedRkModel fitted_;
};

class LandmarkDynamicModel final : public DynamicModel {
 public:
  explicit LandmarkDynamicModel(LandmarkModel model) : model_(std::move(model)) {}
  double survival(const Subject& subject, double base_time, double u) const override;
  double survival_conditional(const Subject& subject, double base_time,
                              double lower, double u) const override;
  const LandmarkModel& model() const { return model_; }

 private:
  LandmarkModel model_;
};

// Censoring-aware prediction error over the test subjects at risk at t
// (T_i >= t): survivors contribute L(1 - pi), observed events L(0 - pi),
// and subjects censored before u a mixture weighted by the model's own
// conditional survival from their censoring time. u == t is allowed and
// gives 0 exactly. Throws std::runtime_error when nobody is at risk.
double prediction_error(const DynamicModel& model, const Dataset& test, double t,
                        double u, LossFn fn);

struct PeCurve {
  Protocol protocol = Protocol::FixedBase;
  double anchor = 0.0;  // the fixed t, or the window w
  std::string model;
  std::vector<double> grid;                   // varying u (or t)
  std::vector<double> values;                 // mean over contributing splits
  std::vector<int> split_count;               // contributing splits per point
  std::vector<double> n_at_risk;              // mean test risk-set size
  std::vector<std::vector<double>> per_split; // raw values, NaN marks a gap
};

struct EvalModelSpec {
  std::string name;
  // landmark models depend on the base time and are refitted per grid point
  // in the fixed-window protocol; retarded-kernel fits are reused.
  bool refit_per_base = false;
  std::function<std::unique_ptr<DynamicModel>(const Dataset& train, double base_time)>
      fit;
};

struct ProtocolResult {
  std::vector<PeCurve> curves;  // one per model, input order
  std::vector<std::string> warnings;
};

ProtocolResult fixed_base_protocol(std::span<const EvalModelSpec> models,
                                   const Dataset& data, const SplitSpec& spec,
                                   double t, const std::vector<double>& u_grid,
                                   LossFn fn);

ProtocolResult fixed_window_protocol(std::span<const EvalModelSpec> models,
                                     const Dataset& data, const SplitSpec& spec,
                                     double w, const std::vector<double>& t_grid,
                                     LossFn fn);

// start, start + step, ..., up to and including stop (tolerant of the usual
// floating-point step accumulation).
std::vector<double> make_grid(double start, double stop, double step);

}  // namespace rk
