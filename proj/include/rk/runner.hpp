#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rk/data.hpp"
#include "rk/evaluation.hpp"
#include "rk/optimizer.hpp"
#include "rk/serialize.hpp"

namespace rk {

// Command exit codes (also the process exit codes of the CLI).
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitDigest = 3;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FixedBaseBlock {
  double t = 0.0;
  std::vector<double> u_grid;
};

struct WindowBlock {
  double w = 0.0;
  std::vector<double> t_grid;
};

// Declarative run description; one file drives fit, predict, evaluate and
// split. All randomness flows from split.seed.
struct RunConfig {
  std::string config_path;
  std::string config_digest;

  std::string data_path;
  CsvSchema schema;
  std::string time_unit;

  KernelModel model = KernelModel::A;
  S0Policy s0 = S0Policy::Constant;
  LossFn loss = LossFn::Squared;
  SplitSpec split;

  std::vector<std::string> eval_models{"A", "B", "landmark"};
  std::optional<FixedBaseBlock> fixed_base;
  std::vector<WindowBlock> fixed_window;

  OptimizerConfig opt;
  std::optional<double> landmark_upsilon;  // extra landmark fit in cmd_fit
  std::string out_dir = "out";
  int jobs = 0;
};

RunConfig load_run_config(const std::string& path);

struct CliOverrides {
  std::optional<std::string> model;
  std::optional<std::string> s0;
  std::optional<std::string> loss;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> jobs;
};

void apply_overrides(RunConfig& cfg, const CliOverrides& o);

int cmd_validate(const RunConfig& cfg);
int cmd_split(const RunConfig& cfg);
int cmd_fit(const RunConfig& cfg);
int cmd_predict(const RunConfig& cfg, const std::string& fit_path,
                const std::string& queries_path, const std::string& out_path,
                bool force = false);
int cmd_evaluate(const RunConfig& cfg);

// 0 = warnings only, 1 = progress, 2 = debug; read from RK_LOG
int log_level();
void log_info(int level, const std::string& message);

}  // namespace rk
