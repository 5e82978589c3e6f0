#pragma once

#include <span>
#include <string>
#include <vector>

#include "rk/cox.hpp"
#include "rk/data.hpp"
#include "rk/rk_fit.hpp"

namespace rk {

// Standard Cox model refitted at a landmark time upsilon on the subjects
// still at risk there, using each subject's last observed covariate values.
struct LandmarkModel {
  double landmark_time = 0.0;
  std::vector<double> alpha;  // longitudinal associations, p entries
  std::vector<double> gamma;  // fixed-covariate associations, q entries
  BaseHazard base_hazard;     // jump times all exceed landmark_time
  std::vector<std::string> risk_set_ids;
  double objective_value = 0.0;
  bool converged = false;
  FitMeta meta;
};

// z_mu at the last observation time <= upsilon (the baseline observation
// guarantees there is one).
std::vector<double> last_observed(const Subject& subject, double upsilon);

LandmarkModel fit_landmark(const Dataset& data, double upsilon,
                           const FitConfig& cfg = {});

// exp{ -e^{alpha.z + gamma.zeta} * sum of jumps in (upsilon, u] }
double predict_lm(const LandmarkModel& model, std::span<const double> z,
                  std::span<const double> fixed, double u);

// Same with jumps restricted to (t_censor, u]; equals
// predict_lm(u) / predict_lm(t_censor).
double predict_lm_conditional(const LandmarkModel& model, std::span<const double> z,
                              std::span<const double> fixed, double u,
                              double t_censor);

}  // namespace rk
