#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rk/evaluation.hpp"
#include "rk/landmark.hpp"
#include "rk/rk_fit.hpp"

namespace rk {

// On-disk form of a fit: either a retarded-kernel fit or a landmark fit
// (tagged with its landmark time), always tied to the training data by
// digest.
struct FitFile {
  std::string type;  // "rk" or "landmark"
  KernelModel model = KernelModel::A;
  S0Policy s0 = S0Policy::Constant;
  KernelParams params;                 // rk
  double upsilon = 0.0;                // landmark
  std::vector<double> alpha, gamma;    // landmark
  BaseHazard base_hazard;              // landmark
  std::vector<std::string> risk_set_ids;
  std::vector<std::string> long_names, fixed_names;
  double objective_value = 0.0;
  bool converged = false;
  FitMeta meta;
  std::string dataset_digest;
};

std::string model_name(KernelModel model);
KernelModel parse_model(const std::string& name);
std::string s0_name(S0Policy s0);
S0Policy parse_s0(const std::string& name);
std::string loss_name(LossFn fn);
LossFn parse_loss(const std::string& name);

void save_fit(const FittedRkModel& fitted, const Dataset& train,
              const std::string& path, const std::string& config_digest = "");
void save_fit(const LandmarkModel& model, const Dataset& train,
              const std::string& path, const std::string& config_digest = "");
FitFile load_fit(const std::string& path);

// Reattaches a loaded rk fit to its training data (digest already checked
// by the caller) and rebuilds the risk table.
FittedRkModel revive_rk_fit(const FitFile& file,
                            std::shared_ptr<const Dataset> train);
LandmarkModel revive_landmark_fit(const FitFile& file);

// protocol, anchor, grid point, model name, mean PE, split count, n_at_risk
void save_pe_csv(const std::vector<PeCurve>& curves, const std::string& path);
// same key columns plus the raw value of every contributing split
void save_pe_splits_csv(const std::vector<PeCurve>& curves, const std::string& path);

std::string protocol_name(Protocol p);

// %.17g so values round-trip exactly
std::string format_double(double x);

}  // namespace rk
