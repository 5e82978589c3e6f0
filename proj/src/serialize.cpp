#include "rk/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "rk/version.hpp"

namespace rk {

using nlohmann::json;

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string model_name(KernelModel model) {
  return model == KernelModel::A ? "A" : "B";
}

KernelModel parse_model(const std::string& name) {
  if (name == "A" || name == "a") return KernelModel::A;
  if (name == "B" || name == "b") return KernelModel::B;
  throw std::invalid_argument("unknown kernel model: " + name);
}

std::string s0_name(S0Policy s0) {
  return s0 == S0Policy::Constant ? "constant" : "decay";
}

S0Policy parse_s0(const std::string& name) {
  if (name == "constant") return S0Policy::Constant;
  if (name == "decay") return S0Policy::Decay;
  throw std::invalid_argument("unknown s0 policy: " + name);
}

std::string loss_name(LossFn fn) {
  return fn == LossFn::Squared ? "squared" : "absolute";
}

LossFn parse_loss(const std::string& name) {
  if (name == "squared") return LossFn::Squared;
  if (name == "absolute") return LossFn::Absolute;
  throw std::invalid_argument("unknown loss: " + name);
}

std::string protocol_name(Protocol p) {
  return p == Protocol::FixedBase ? "fixed_base" : "fixed_window";
}

namespace {

json meta_to_json(const FitMeta& meta) {
  return json{{"seed", meta.seed},
              {"starts", meta.starts},
              {"start_objectives", meta.start_objectives},
              {"start_evals", meta.start_evals},
              {"start_sweeps", meta.start_sweeps},
              {"start_converged", meta.start_converged},
              {"best_start", meta.best_start},
              {"warnings", meta.warnings}};
}

FitMeta meta_from_json(const json& j) {
  FitMeta meta;
  if (j.is_null()) return meta;
  meta.seed = j.value("seed", std::uint64_t{0});
  meta.starts = j.value("starts", std::vector<std::vector<double>>{});
  meta.start_objectives = j.value("start_objectives", std::vector<double>{});
  meta.start_evals = j.value("start_evals", std::vector<long>{});
  meta.start_sweeps = j.value("start_sweeps", std::vector<int>{});
  meta.start_converged = j.value("start_converged", std::vector<bool>{});
  meta.best_start = j.value("best_start", -1);
  meta.warnings = j.value("warnings", std::vector<std::string>{});
  return meta;
}

void write_json(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << j.dump(2) << '\n';
}

}  // namespace

void save_fit(const FittedRkModel& fitted, const Dataset& train,
              const std::string& path, const std::string& config_digest) {
  json j{{"library_version", kVersion},
         {"config_digest", config_digest},
         {"type", "rk"},
         {"model", model_name(fitted.model)},
         {"s0", s0_name(fitted.s0)},
         {"params",
          {{"a", fitted.params.a},
           {"tau", fitted.params.tau},
           {"gamma", fitted.params.gamma}}},
         {"long_names", train.long_names},
         {"fixed_names", train.fixed_names},
         {"objective", fitted.objective_value},
         {"converged", fitted.converged},
         {"fit_meta", meta_to_json(fitted.meta)},
         {"dataset_digest", dataset_digest(train)}};
  write_json(j, path);
}

void save_fit(const LandmarkModel& model, const Dataset& train,
              const std::string& path, const std::string& config_digest) {
  json j{{"library_version", kVersion},
         {"config_digest", config_digest},
         {"type", "landmark"},
         {"upsilon", model.landmark_time},
         {"params", {{"alpha", model.alpha}, {"gamma", model.gamma}}},
         {"base_hazard",
          {{"jump_times", model.base_hazard.jump_times},
           {"jumps", model.base_hazard.jumps}}},
         {"risk_set_ids", model.risk_set_ids},
         {"long_names", train.long_names},
         {"fixed_names", train.fixed_names},
         {"objective", model.objective_value},
         {"converged", model.converged},
         {"fit_meta", meta_to_json(model.meta)},
         {"dataset_digest", dataset_digest(train)}};
  write_json(j, path);
}

FitFile load_fit(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open fit file: " + path);
  json j;
  in >> j;

  FitFile f;
  f.type = j.at("type").get<std::string>();
  f.long_names = j.value("long_names", std::vector<std::string>{});
  f.fixed_names = j.value("fixed_names", std::vector<std::string>{});
  f.objective_value = j.at("objective").get<double>();
  f.converged = j.at("converged").get<bool>();
  f.meta = meta_from_json(j.value("fit_meta", json()));
  f.dataset_digest = j.at("dataset_digest").get<std::string>();
  if (f.type == "rk") {
    f.model = parse_model(j.at("model").get<std::string>());
    f.s0 = parse_s0(j.at("s0").get<std::string>());
    f.params.a = j.at("params").at("a").get<std::vector<double>>();
    f.params.tau = j.at("params").at("tau").get<std::vector<double>>();
    f.params.gamma = j.at("params").at("gamma").get<std::vector<double>>();
  } else if (f.type == "landmark") {
    f.upsilon = j.at("upsilon").get<double>();
    f.alpha = j.at("params").at("alpha").get<std::vector<double>>();
    f.gamma = j.at("params").at("gamma").get<std::vector<double>>();
    f.base_hazard.jump_times =
        j.at("base_hazard").at("jump_times").get<std::vector<double>>();
    f.base_hazard.jumps = j.at("base_hazard").at("jumps").get<std::vector<double>>();
    f.risk_set_ids = j.value("risk_set_ids", std::vector<std::string>{});
  } else {
    throw std::runtime_error("unknown fit type in " + path + ": " + f.type);
  }
  return f;
}

FittedRkModel revive_rk_fit(const FitFile& file,
                            std::shared_ptr<const Dataset> train) {
  return revive_fitted(file.model, file.s0, file.params, std::move(train),
                       file.objective_value, file.converged, file.meta);
}

LandmarkModel revive_landmark_fit(const FitFile& file) {
  LandmarkModel m;
  m.landmark_time = file.upsilon;
  m.alpha = file.alpha;
  m.gamma = file.gamma;
  m.base_hazard = file.base_hazard;
  m.risk_set_ids = file.risk_set_ids;
  m.objective_value = file.objective_value;
  m.converged = file.converged;
  m.meta = file.meta;
  return m;
}

void save_pe_csv(const std::vector<PeCurve>& curves, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << "protocol,anchor,grid,model,mean_pe,split_count,n_at_risk\n";
  for (const auto& c : curves)
    for (std::size_t i = 0; i < c.grid.size(); ++i)
      out << protocol_name(c.protocol) << ',' << format_double(c.anchor) << ','
          << format_double(c.grid[i]) << ',' << c.model << ','
          << format_double(c.values[i]) << ',' << c.split_count[i] << ','
          << format_double(c.n_at_risk[i]) << '\n';
}

void save_pe_splits_csv(const std::vector<PeCurve>& curves,
                        const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << "protocol,anchor,grid,model,split,pe\n";
  for (const auto& c : curves)
    for (std::size_t k = 0; k < c.per_split.size(); ++k)
      for (std::size_t i = 0; i < c.grid.size(); ++i) {
        if (std::isnan(c.per_split[k][i])) continue;
        out << protocol_name(c.protocol) << ',' << format_double(c.anchor) << ','
            << format_double(c.grid[i]) << ',' << c.model << ',' << k << ','
            << format_double(c.per_split[k][i]) << '\n';
      }
}

}  // namespace rk
