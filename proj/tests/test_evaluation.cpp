#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <vector>

#include "rk/evaluation.hpp"
#include "rk/reference.hpp"
#include "support/synth.hpp"

using rk::Dataset;
using rk::DynamicModel;
using rk::EvalModelSpec;
using rk::LossFn;
using rk::Subject;

namespace {

Subject bare_subject(const std::string& id, double t, bool event) {
  Subject s;
  s.id = id;
  s.event_time = t;
  s.event = event;
  s.obs_times = {0.0};
  return s;
}

// predictor stub returning fixed values; pins the estimator arithmetic
class ConstModel final : public DynamicModel {
 public:
  ConstModel(double pi, double pi_conditional)
      : pi_(pi), pi_conditional_(pi_conditional) {}
  double survival(const Subject&, double, double) const override { return pi_; }
  double survival_conditional(const Subject&, double, double, double) const override {
    return pi_conditional_;
  }

 private:
  double pi_, pi_conditional_;
};

}  // namespace

TEST_CASE("perfect predictions cost nothing") {
  Dataset test;
  test.subjects.push_back(bare_subject("a", 5.0, false));
  test.subjects.push_back(bare_subject("b", 6.0, true));
  const ConstModel m(1.0, 1.0);
  CHECK(rk::prediction_error(m, test, 1.0, 2.0, LossFn::Squared) == 0.0);
}

TEST_CASE("pi = 0.5 everywhere gives 0.25 under squared loss") {
  Dataset test;
  test.subjects.push_back(bare_subject("a", 5.0, false));   // survivor
  test.subjects.push_back(bare_subject("b", 1.5, true));    // event before u
  test.subjects.push_back(bare_subject("c", 9.0, true));    // survivor
  const ConstModel m(0.5, 1.0);  // no censoring inside [t, u)
  CHECK(rk::prediction_error(m, test, 1.0, 2.0, LossFn::Squared) ==
        doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("censored subject mixes the two losses with its conditional survival") {
  Dataset test;
  test.subjects.push_back(bare_subject("a", 1.5, false));  // censored in [t, u)
  const ConstModel m(0.8, 0.9);
  const double pe = rk::prediction_error(m, test, 1.0, 2.0, LossFn::Squared);
  CHECK(std::fabs(pe - 0.1) <= 1e-12);  // 0.9*0.04 + 0.1*0.64
}

TEST_CASE("u equal to t is free of error") {
  Dataset test;
  test.subjects.push_back(bare_subject("a", 5.0, false));
  const ConstModel m(1.0, 1.0);
  CHECK(rk::prediction_error(m, test, 2.0, 2.0, LossFn::Squared) == 0.0);
}

TEST_CASE("absolute loss variant") {
  Dataset test;
  test.subjects.push_back(bare_subject("a", 9.0, false));  // survivor
  const ConstModel m(0.7, 1.0);
  CHECK(rk::prediction_error(m, test, 1.0, 2.0, LossFn::Absolute) ==
        doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("risk set: only subjects with T_i >= t count; empty set throws") {
  Dataset test;
  test.subjects.push_back(bare_subject("a", 0.5, true));   // before t
  test.subjects.push_back(bare_subject("b", 5.0, false));  // survivor
  const ConstModel m(0.6, 1.0);
  CHECK(rk::prediction_error(m, test, 1.0, 2.0, LossFn::Squared) ==
        doctest::Approx(0.16).epsilon(1e-12));
  CHECK_THROWS_AS(rk::prediction_error(m, test, 10.0, 11.0, LossFn::Squared),
                  std::runtime_error);
}

TEST_CASE("subject order does not matter and the reference path agrees") {
  Dataset test = rk::synth::longitudinal(50, 1, 201);
  const Dataset train = rk::synth::longitudinal(80, 1, 202);
  rk::FitConfig fc;
  fc.opt.f_tol = 1e-7;
  const rk::RkDynamicModel m(
      rk::fit_rk(train, rk::KernelModel::A, rk::S0Policy::Constant, fc));

  const double t = 1.0, u = 4.0;
  const double pe1 = rk::prediction_error(m, test, t, u, LossFn::Squared);
  const double ref = rk::reference::prediction_error(m, test, t, u, LossFn::Squared);
  CHECK(std::fabs(pe1 - ref) <= 1e-12);

  std::reverse(test.subjects.begin(), test.subjects.end());
  const double pe2 = rk::prediction_error(m, test, t, u, LossFn::Squared);
  CHECK(std::fabs(pe1 - pe2) <= 1e-12);
}

TEST_CASE("no censoring in the window reduces to the two-term mean") {
  const Dataset train = rk::synth::longitudinal(60, 1, 203);
  Dataset test = rk::synth::longitudinal(40, 1, 204);
  const double t = 1.0, u = 3.0;
  // force every subject censored inside [t, u) out to an event at u
  for (auto& s : test.subjects)
    if (!s.event && s.event_time >= t && s.event_time < u) {
      s.event = true;
    }
  rk::FitConfig fc;
  fc.opt.f_tol = 1e-7;
  const rk::RkDynamicModel m(
      rk::fit_rk(train, rk::KernelModel::B, rk::S0Policy::Constant, fc));

  double direct = 0.0;
  int n = 0;
  for (const auto& s : test.subjects) {
    if (s.event_time < t) continue;
    ++n;
    const double pi = m.survival(s, t, u);
    const double status = s.event_time >= u ? 1.0 : 0.0;
    direct += (status - pi) * (status - pi);
  }
  direct /= n;
  CHECK(rk::prediction_error(m, test, t, u, LossFn::Squared) ==
        doctest::Approx(direct).epsilon(1e-13));
}

namespace {

std::vector<EvalModelSpec> toy_specs() {
  std::vector<EvalModelSpec> specs;
  for (const char* name : {"RK-A", "RK-B"}) {
    EvalModelSpec spec;
    spec.name = name;
    spec.refit_per_base = false;
    const rk::KernelModel km =
        std::string(name) == "RK-A" ? rk::KernelModel::A : rk::KernelModel::B;
    spec.fit = [km](const Dataset& train, double) {
      rk::FitConfig fc;
      fc.opt.f_tol = 1e-6;
      fc.opt.x_tol = 1e-5;
      return std::make_unique<rk::RkDynamicModel>(
          rk::fit_rk(train, km, rk::S0Policy::Constant, fc));
    };
    specs.push_back(std::move(spec));
  }
  EvalModelSpec lm;
  lm.name = "landmark";
  lm.refit_per_base = true;
  lm.fit = [](const Dataset& train, double base) {
    rk::FitConfig fc;
    fc.opt.f_tol = 1e-6;
    fc.opt.x_tol = 1e-5;
    return std::make_unique<rk::LandmarkDynamicModel>(
        rk::fit_landmark(train, base, fc));
  };
  specs.push_back(std::move(lm));
  return specs;
}

}  // namespace

TEST_CASE("fixed-base protocol: shape, averaging and bounds") {
  const Dataset data = rk::synth::longitudinal(90, 1, 205);
  rk::SplitSpec spec;
  spec.seed = 5;
  spec.fraction = 0.5;
  spec.n_splits = 3;

  const auto grid = rk::make_grid(1.0, 3.0, 0.5);
  REQUIRE(grid.size() == 5);
  const auto specs = toy_specs();
  const auto result =
      rk::fixed_base_protocol(specs, data, spec, 1.0, grid, LossFn::Squared);

  REQUIRE(result.curves.size() == 3);
  for (const auto& c : result.curves) {
    CHECK(c.grid == grid);
    CHECK(c.per_split.size() == 3);
    for (std::size_t i = 0; i < c.grid.size(); ++i) {
      CHECK(c.split_count[i] == 3);
      CHECK(c.values[i] >= 0.0);
      CHECK(c.values[i] <= 1.0);
      double mean = 0.0;
      for (const auto& row : c.per_split) mean += row[i];
      mean /= 3.0;
      CHECK(c.values[i] == doctest::Approx(mean).epsilon(1e-15));
    }
    // PE at u == t vanishes by construction
    CHECK(c.values[0] == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("fixed-window protocol: landmark refits per base time and gaps appear") {
  const Dataset data = rk::synth::longitudinal(70, 1, 206);
  rk::SplitSpec spec;
  spec.seed = 6;
  spec.fraction = 0.5;
  spec.n_splits = 2;

  // push the grid far enough that late landmark fits run out of events
  const std::vector<double> t_grid{0.0, 1.0, 2.0, 6.0, 9.5};
  const auto specs = toy_specs();
  const auto result =
      rk::fixed_window_protocol(specs, data, spec, 1.0, t_grid, LossFn::Squared);

  REQUIRE(result.curves.size() == 3);
  const auto& lm_curve = result.curves[2];
  CHECK(lm_curve.model == "landmark");
  // early grid points evaluated everywhere
  CHECK(lm_curve.split_count[0] == 2);
  // the far end loses at least one split to fit failure or empty risk sets,
  // and every loss is recorded as a warning
  bool any_gap = false;
  for (std::size_t i = 0; i < t_grid.size(); ++i)
    if (lm_curve.split_count[i] < 2) any_gap = true;
  CHECK(any_gap);
  CHECK_FALSE(result.warnings.empty());

  CHECK_THROWS_AS(rk::fixed_window_protocol(specs, data, spec, 0.0, t_grid,
                                            LossFn::Squared),
                  std::invalid_argument);
}

TEST_CASE("make_grid arithmetic") {
  CHECK(rk::make_grid(3.0, 8.0, 0.2).size() == 26);
  CHECK(rk::make_grid(6.0, 18.0, 0.2).size() == 61);
  CHECK(rk::make_grid(3.0, 10.0, 0.2).size() == 36);
  CHECK(rk::make_grid(0.0, 9.0, 0.2).size() == 46);
  const auto g = rk::make_grid(1.0, 1.0, 0.5);
  REQUIRE(g.size() == 1);
  CHECK(g[0] == 1.0);
  CHECK_THROWS_AS(rk::make_grid(1.0, 0.0, 0.5), std::invalid_argument);
}
