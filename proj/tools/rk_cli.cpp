// Command-line front end: fit, predict, evaluate, split, validate.

#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "rk/runner.hpp"
#include "rk/version.hpp"

namespace {

struct CommonArgs {
  std::string config;
  rk::CliOverrides overrides;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config, "run configuration file (JSON)")
      ->required();
  cmd->add_option("--model", args.overrides.model, "kernel model")
      ->check(CLI::IsMember({"A", "B"}));
  cmd->add_option("--s0", args.overrides.s0, "association for s=0 subjects")
      ->check(CLI::IsMember({"constant", "decay"}));
  cmd->add_option("--loss", args.overrides.loss, "prediction-error loss")
      ->check(CLI::IsMember({"squared", "absolute"}));
  cmd->add_option("--seed", args.overrides.seed, "split seed override");
  cmd->add_option("--out", args.overrides.out, "output directory override");
  cmd->add_option("--jobs", args.overrides.jobs,
                  "worker threads (0 = all cores); results do not depend on it");
}

int load_and_run(const CommonArgs& args,
                 const std::function<int(const rk::RunConfig&)>& fn) {
  try {
    rk::RunConfig cfg = rk::load_run_config(args.config);
    rk::apply_overrides(cfg, args.overrides);
    return fn(cfg);
  } catch (const rk::ConfigError& e) {
    std::cerr << "{\"error\":\"config\",\"detail\":\"" << e.what() << "\"}\n";
    return rk::kExitConfig;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"retarded-kernel survival models: fitting, dynamic prediction "
               "and prediction-error evaluation"};
  app.set_version_flag("--version", rk::kVersion);
  app.require_subcommand(1);

  CommonArgs fit_args, predict_args, evaluate_args, split_args, validate_args;
  std::string fit_path, queries_path, predictions_out = "predictions.csv";
  bool force = false;

  CLI::App* fit = app.add_subcommand("fit", "fit a model to the full dataset");
  add_common(fit, fit_args);

  CLI::App* predict =
      app.add_subcommand("predict", "dynamic predictions for a batch of queries");
  add_common(predict, predict_args);
  predict->add_option("--fit", fit_path, "fit JSON produced by the fit command")
      ->required();
  predict->add_option("--queries", queries_path, "CSV with columns id,t,u[,lower]")
      ->required();
  predict->add_option("--predictions-out", predictions_out, "output CSV path");
  predict->add_flag("--force", force, "predict from an unconverged fit");

  CLI::App* evaluate =
      app.add_subcommand("evaluate", "run the configured prediction-error protocols");
  add_common(evaluate, evaluate_args);

  CLI::App* split_cmd =
      app.add_subcommand("split", "materialise the train/test split assignments");
  add_common(split_cmd, split_args);

  CLI::App* validate =
      app.add_subcommand("validate", "load the dataset and report problems");
  add_common(validate, validate_args);

  CLI11_PARSE(app, argc, argv);

  if (fit->parsed()) return load_and_run(fit_args, rk::cmd_fit);
  if (predict->parsed())
    return load_and_run(predict_args, [&](const rk::RunConfig& cfg) {
      return rk::cmd_predict(cfg, fit_path, queries_path, predictions_out, force);
    });
  if (evaluate->parsed()) return load_and_run(evaluate_args, rk::cmd_evaluate);
  if (split_cmd->parsed()) return load_and_run(split_args, rk::cmd_split);
  if (validate->parsed()) return load_and_run(validate_args, rk::cmd_validate);
  return rk::kExitConfig;
}
