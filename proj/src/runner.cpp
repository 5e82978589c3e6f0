#include "rk/runner.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "rk/parallel.hpp"
#include "rk/version.hpp"

namespace rk {

using nlohmann::json;
namespace fs = std::filesystem;

int log_level() {
  static const int level = [] {
    const char* env = std::getenv("RK_LOG");
    return env ? std::atoi(env) : 0;
  }();
  return level;
}

void log_info(int level, const std::string& message) {
  if (log_level() >= level) std::cerr << "[rk] " << message << '\n';
}

namespace {

void report_error(const std::string& kind, const std::string& detail) {
  const json j{{"error", kind}, {"detail", detail}};
  std::cerr << j.dump() << '\n';
}

std::vector<double> parse_grid(const json& j, const std::string& what) {
  if (j.is_array()) {
    auto grid = j.get<std::vector<double>>();
    if (grid.empty()) throw ConfigError(what + ": empty grid");
    for (std::size_t i = 1; i < grid.size(); ++i)
      if (!(grid[i] > grid[i - 1]))
        throw ConfigError(what + ": grid not strictly increasing");
    return grid;
  }
  if (j.is_object()) {
    const double start = j.at("start").get<double>();
    const double stop = j.at("stop").get<double>();
    const double step = j.at("step").get<double>();
    return make_grid(start, stop, step);
  }
  throw ConfigError(what + ": grid must be an array or {start,stop,step}");
}

}  // namespace

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string raw = buffer.str();

  json j;
  try {
    j = json::parse(raw);
  } catch (const std::exception& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }

  RunConfig cfg;
  cfg.config_path = path;
  cfg.config_digest = fnv1a_digest(raw);

  try {
    const json& data = j.at("data");
    cfg.data_path = data.at("path").get<std::string>();
    cfg.time_unit = data.value("time_unit", "");
    const json& schema = data.at("schema");
    cfg.schema.id = schema.at("id").get<std::string>();
    cfg.schema.time = schema.at("time").get<std::string>();
    cfg.schema.event_time = schema.at("event_time").get<std::string>();
    cfg.schema.event = schema.at("event").get<std::string>();
    cfg.schema.longitudinal =
        schema.value("longitudinal", std::vector<std::string>{});
    cfg.schema.fixed = schema.value("fixed", std::vector<std::string>{});
    cfg.schema.rebase = schema.value("rebase", false);

    if (j.contains("model")) cfg.model = parse_model(j.at("model").get<std::string>());
    if (j.contains("s0")) cfg.s0 = parse_s0(j.at("s0").get<std::string>());
    if (j.contains("loss")) cfg.loss = parse_loss(j.at("loss").get<std::string>());

    if (j.contains("split")) {
      const json& s = j.at("split");
      cfg.split.seed = s.value("seed", std::uint64_t{0});
      cfg.split.fraction = s.value("fraction", 0.5);
      cfg.split.n_splits = s.value("count", 20);
    }

    if (j.contains("evaluate")) {
      const json& ev = j.at("evaluate");
      cfg.eval_models =
          ev.value("models", std::vector<std::string>{"A", "B", "landmark"});
      if (ev.contains("fixed_base")) {
        FixedBaseBlock b;
        b.t = ev.at("fixed_base").at("t").get<double>();
        b.u_grid = parse_grid(ev.at("fixed_base").at("u"), "fixed_base.u");
        for (double u : b.u_grid)
          if (u < b.t) throw ConfigError("fixed_base: u grid point before t");
        cfg.fixed_base = b;
      }
      if (ev.contains("fixed_window")) {
        for (const json& wj : ev.at("fixed_window").at("windows")) {
          WindowBlock b;
          b.w = wj.at("w").get<double>();
          if (!(b.w > 0.0)) throw ConfigError("fixed_window: w must exceed 0");
          b.t_grid = parse_grid(wj.at("t"), "fixed_window.t");
          cfg.fixed_window.push_back(std::move(b));
        }
      }
    }

    if (j.contains("optimizer")) {
      const json& o = j.at("optimizer");
      cfg.opt.x_tol = o.value("x_tol", cfg.opt.x_tol);
      cfg.opt.f_tol = o.value("f_tol", cfg.opt.f_tol);
      cfg.opt.max_iters = o.value("max_iters", cfg.opt.max_iters);
      cfg.opt.max_line_evals = o.value("max_line_evals", cfg.opt.max_line_evals);
    }

    if (j.contains("fit") && j.at("fit").contains("landmark_upsilon"))
      cfg.landmark_upsilon = j.at("fit").at("landmark_upsilon").get<double>();

    cfg.out_dir = j.value("out", std::string("out"));
    cfg.jobs = j.value("jobs", 0);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("config error in " + path + ": " + e.what());
  }
  return cfg;
}

void apply_overrides(RunConfig& cfg, const CliOverrides& o) {
  if (o.model) cfg.model = parse_model(*o.model);
  if (o.s0) cfg.s0 = parse_s0(*o.s0);
  if (o.loss) cfg.loss = parse_loss(*o.loss);
  if (o.seed) cfg.split.seed = *o.seed;
  if (o.out) cfg.out_dir = *o.out;
  if (o.jobs) cfg.jobs = *o.jobs;
}

namespace {

Dataset load_data(const RunConfig& cfg) {
  return load_long_csv(cfg.data_path, cfg.schema, cfg.time_unit);
}

void ensure_out_dir(const RunConfig& cfg) {
  fs::create_directories(cfg.out_dir);
}

json run_header(const RunConfig& cfg, const Dataset& data) {
  return json{{"library_version", kVersion},
              {"config_digest", cfg.config_digest},
              {"data_path", cfg.data_path},
              {"dataset_digest", dataset_digest(data)},
              {"seed", cfg.split.seed},
              {"split_fraction", cfg.split.fraction},
              {"n_splits", cfg.split.n_splits},
              {"split_stratification", "none"},
              {"s0", s0_name(cfg.s0)},
              {"loss", loss_name(cfg.loss)}};
}

// model factories shared by cmd_evaluate
std::vector<EvalModelSpec> build_model_specs(const RunConfig& cfg) {
  std::vector<EvalModelSpec> specs;
  for (const auto& name : cfg.eval_models) {
    if (name == "A" || name == "B") {
      const KernelModel km = parse_model(name);
      EvalModelSpec spec;
      spec.name = "RK-" + name;
      spec.refit_per_base = false;
      spec.fit = [km, cfg](const Dataset& train, double) {
        FitConfig fc;
        fc.opt = cfg.opt;
        fc.seed = cfg.split.seed;
        return std::make_unique<RkDynamicModel>(fit_rk(train, km, cfg.s0, fc));
      };
      specs.push_back(std::move(spec));
    } else if (name == "landmark") {
      EvalModelSpec spec;
      spec.name = "landmark";
      spec.refit_per_base = true;
      spec.fit = [cfg](const Dataset& train, double base_time) {
        FitConfig fc;
        fc.opt = cfg.opt;
        fc.seed = cfg.split.seed;
        return std::make_unique<LandmarkDynamicModel>(
            fit_landmark(train, base_time, fc));
      };
      specs.push_back(std::move(spec));
    } else {
      throw ConfigError("unknown model in evaluate.models: " + name);
    }
  }
  return specs;
}

}  // namespace

int cmd_validate(const RunConfig& cfg) {
  try {
    const Dataset data = load_data(cfg);
    json j = run_header(cfg, data);
    j["subjects"] = data.subjects.size();
    j["events"] = data.n_events();
    j["longitudinal"] = data.long_names;
    j["fixed"] = data.fixed_names;
    std::cout << j.dump(2) << '\n';
    return kExitOk;
  } catch (const DataError& e) {
    report_error("invalid data", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    report_error("runtime", e.what());
    return kExitRuntime;
  }
}

int cmd_split(const RunConfig& cfg) {
  try {
    const Dataset data = load_data(cfg);
    ensure_out_dir(cfg);
    const std::string path = cfg.out_dir + "/splits.csv";
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "split,id,half\n";
    for (int k = 0; k < cfg.split.n_splits; ++k) {
      const auto [train, test] = split(data, cfg.split, k);
      for (const auto& s : train.subjects) out << k << ',' << s.id << ",train\n";
      for (const auto& s : test.subjects) out << k << ',' << s.id << ",test\n";
    }
    json meta = run_header(cfg, data);
    std::ofstream mf(cfg.out_dir + "/split_meta.json");
    mf << meta.dump(2) << '\n';
    log_info(1, "wrote " + path);
    return kExitOk;
  } catch (const DataError& e) {
    report_error("invalid data", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    report_error("runtime", e.what());
    return kExitRuntime;
  }
}

int cmd_fit(const RunConfig& cfg) {
  try {
    set_jobs(cfg.jobs);
    const Dataset data = load_data(cfg);
    ensure_out_dir(cfg);

    FitConfig fc;
    fc.opt = cfg.opt;
    fc.seed = cfg.split.seed;

    const FittedRkModel fitted = fit_rk(data, cfg.model, cfg.s0, fc);
    const std::string path =
        cfg.out_dir + "/fit_" + model_name(cfg.model) + ".json";
    save_fit(fitted, data, path, cfg.config_digest);
    log_info(1, "wrote " + path + " (objective " +
                    format_double(fitted.objective_value) + ")");
    for (const auto& w : fitted.meta.warnings) std::cerr << "[rk] warning: " << w << '\n';

    if (cfg.landmark_upsilon) {
      const LandmarkModel lm = fit_landmark(data, *cfg.landmark_upsilon, fc);
      const std::string lm_path = cfg.out_dir + "/fit_landmark.json";
      save_fit(lm, data, lm_path, cfg.config_digest);
      log_info(1, "wrote " + lm_path);
    }
    return kExitOk;
  } catch (const DataError& e) {
    report_error("invalid data", e.what());
    return kExitConfig;
  } catch (const ConfigError& e) {
    report_error("config", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    report_error("runtime", e.what());
    return kExitRuntime;
  }
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r' && c != '"') {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

int cmd_predict(const RunConfig& cfg, const std::string& fit_path,
                const std::string& queries_path, const std::string& out_path,
                bool force) {
  try {
    set_jobs(cfg.jobs);
    const Dataset data = load_data(cfg);
    const FitFile fit = load_fit(fit_path);
    if (fit.dataset_digest != dataset_digest(data)) {
      report_error("digest mismatch",
                   "fit file " + fit_path + " was computed from different data");
      return kExitDigest;
    }
    if (!fit.converged && !force) {
      report_error("unconverged fit",
                   "fit did not converge; pass --force to predict anyway");
      return kExitConfig;
    }

    std::ifstream qin(queries_path);
    if (!qin) throw std::runtime_error("cannot open queries file: " + queries_path);
    std::string line;
    if (!std::getline(qin, line))
      throw std::runtime_error("empty queries file: " + queries_path);
    const auto header = split_fields(line);
    auto col = [&](const std::string& name) -> int {
      for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<int>(i);
      return -1;
    };
    const int ci = col("id"), ct = col("t"), cu = col("u"), cl = col("lower");
    if (ci < 0 || ct < 0 || cu < 0)
      throw ConfigError("queries file needs columns id,t,u");

    std::optional<FittedRkModel> rk_model;
    std::optional<LandmarkModel> lm_model;
    auto train = std::make_shared<const Dataset>(data);
    if (fit.type == "rk")
      rk_model = revive_rk_fit(fit, train);
    else
      lm_model = revive_landmark_fit(fit);

    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    out << "id,t,u,pi,model,s0,conditional\n";
    long row_no = 1;
    while (std::getline(qin, line)) {
      ++row_no;
      if (line.empty()) continue;
      const auto f = split_fields(line);
      const std::string id = f[ci];
      const double t = std::stod(f[ct]);
      const double u = std::stod(f[cu]);
      double lower = -1.0;
      if (cl >= 0 && static_cast<std::size_t>(cl) < f.size() && !f[cl].empty())
        lower = std::stod(f[cl]);

      const Subject* subject = nullptr;
      for (const auto& s : data.subjects)
        if (s.id == id) {
          subject = &s;
          break;
        }
      if (!subject)
        throw std::runtime_error("queries row " + std::to_string(row_no) +
                                 ": unknown subject id " + id);

      double pi;
      std::string mname, s0name = "-";
      if (rk_model) {
        pi = predict_rk(*rk_model, *subject, t, u, lower);
        mname = model_name(rk_model->model);
        s0name = s0_name(rk_model->s0);
      } else {
        if (std::fabs(t - lm_model->landmark_time) > 1e-9)
          throw ConfigError("queries row " + std::to_string(row_no) +
                            ": landmark fit is anchored at upsilon=" +
                            format_double(lm_model->landmark_time) +
                            ", query t=" + f[ct]);
        const auto z = last_observed(*subject, lm_model->landmark_time);
        pi = lower < 0.0 ? predict_lm(*lm_model, z, subject->fixed_covariates, u)
                         : predict_lm_conditional(*lm_model, z,
                                                  subject->fixed_covariates, u, lower);
        mname = "landmark";
      }
      out << id << ',' << format_double(t) << ',' << format_double(u) << ','
          << format_double(pi) << ',' << mname << ',' << s0name << ','
          << (lower >= 0.0 ? 1 : 0) << '\n';
    }
    log_info(1, "wrote " + out_path);
    return kExitOk;
  } catch (const DataError& e) {
    report_error("invalid data", e.what());
    return kExitConfig;
  } catch (const ConfigError& e) {
    report_error("config", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    report_error("runtime", e.what());
    return kExitRuntime;
  }
}

int cmd_evaluate(const RunConfig& cfg) {
  try {
    set_jobs(cfg.jobs);
    if (!cfg.fixed_base && cfg.fixed_window.empty())
      throw ConfigError("evaluate: no protocol block in config");
    const Dataset data = load_data(cfg);
    ensure_out_dir(cfg);
    const auto specs = build_model_specs(cfg);

    json meta = run_header(cfg, data);
    meta["models"] = cfg.eval_models;
    std::vector<std::string> warnings;

    if (cfg.fixed_base) {
      log_info(1, "fixed-base protocol at t=" + format_double(cfg.fixed_base->t));
      const ProtocolResult r = fixed_base_protocol(
          specs, data, cfg.split, cfg.fixed_base->t, cfg.fixed_base->u_grid,
          cfg.loss);
      save_pe_csv(r.curves, cfg.out_dir + "/pe_fixed_base.csv");
      save_pe_splits_csv(r.curves, cfg.out_dir + "/pe_fixed_base_splits.csv");
      warnings.insert(warnings.end(), r.warnings.begin(), r.warnings.end());
      meta["fixed_base"] = {{"t", cfg.fixed_base->t},
                            {"u_grid", cfg.fixed_base->u_grid}};
    }

    if (!cfg.fixed_window.empty()) {
      std::vector<PeCurve> all;
      json wmeta = json::array();
      for (const auto& block : cfg.fixed_window) {
        log_info(1, "fixed-window protocol, w=" + format_double(block.w));
        const ProtocolResult r = fixed_window_protocol(
            specs, data, cfg.split, block.w, block.t_grid, cfg.loss);
        all.insert(all.end(), r.curves.begin(), r.curves.end());
        warnings.insert(warnings.end(), r.warnings.begin(), r.warnings.end());
        wmeta.push_back({{"w", block.w}, {"t_grid", block.t_grid}});
      }
      save_pe_csv(all, cfg.out_dir + "/pe_fixed_window.csv");
      save_pe_splits_csv(all, cfg.out_dir + "/pe_fixed_window_splits.csv");
      meta["fixed_window"] = wmeta;
    }

    meta["warnings"] = warnings;
    std::ofstream mf(cfg.out_dir + "/evaluate_meta.json");
    mf << meta.dump(2) << '\n';
    for (const auto& w : warnings) log_info(1, "warning: " + w);
    log_info(1, "evaluation written to " + cfg.out_dir);
    return kExitOk;
  } catch (const DataError& e) {
    report_error("invalid data", e.what());
    return kExitConfig;
  } catch (const ConfigError& e) {
    report_error("config", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    report_error("runtime", e.what());
    return kExitRuntime;
  }
}

}  // namespace rk
