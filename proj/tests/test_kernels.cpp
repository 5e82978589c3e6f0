#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "rk/kernels.hpp"
#include "rk/trajectory.hpp"
#include "support/oracles.hpp"

using rk::KernelModel;
using rk::KernelParams;
using rk::S0Policy;
using rk::Segment;
using rk::StepTrajectory;

TEST_CASE("kernel values match high-precision evaluation of the closed forms") {
  // model A, a=1, tau=1, t=s=1, t'=0.5: e^{0.5}/(e-1)
  const double a_expect = std::exp(0.5) / (std::exp(1.0) - 1.0);
  CHECK(rk::kernel_value(KernelModel::A, 1.0, 1.0, 1.0, 0.5, 1.0) ==
        doctest::Approx(a_expect).epsilon(1e-12));
  CHECK(a_expect == doctest::Approx(0.95952).epsilon(1e-5));

  // model B, a=1, tau=1, t=2, s=1, t'=0.5
  const double b_expect =
      std::exp(-1.5) + (1.0 - std::exp(-2.0) * (std::exp(1.0) - 1.0));
  CHECK(rk::kernel_value(KernelModel::B, 1.0, 1.0, 2.0, 0.5, 1.0) ==
        doctest::Approx(b_expect).epsilon(1e-12));
  CHECK(b_expect == doctest::Approx(0.99059).epsilon(1e-5));
}

TEST_CASE("causality: t' beyond t contributes nothing") {
  CHECK(rk::kernel_value(KernelModel::A, 1.0, 1.0, 1.0, 1.5, 2.0) == 0.0);
  CHECK(rk::kernel_value(KernelModel::B, -2.0, 0.3, 1.0, 1.5, 2.0) == 0.0);
}

TEST_CASE("normalization: the kernel integrates to a over [0, min(s,t)]") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int rep = 0; rep < 100; ++rep) {
    const KernelModel model = rep % 2 ? KernelModel::A : KernelModel::B;
    const double a = -3.0 + 6.0 * unif(rng);
    const double tau = std::pow(10.0, -3.0 + 4.0 * unif(rng));
    const double s = 0.05 + 9.95 * unif(rng);
    const double t = 0.05 + 19.95 * unif(rng);
    const double m = std::min(s, t);
    const double integral = rk::oracle::integrate(
        [&](double tp) { return rk::kernel_value(model, a, tau, t, tp, s); }, 0.0,
        m, 1e-13 * std::max(1.0, std::fabs(a)));
    CHECK(std::fabs(integral - a) <= 1e-8 * std::max(1.0, std::fabs(a)));
  }
}

TEST_CASE("segment integrals match the worked examples") {
  // model A full interval: the constancy condition gives exactly a
  CHECK(rk::segment_integral(KernelModel::A, 1.0, 1.0, 1.0, 1.0, {0.0, 1.0, 1.0}) ==
        doctest::Approx(1.0).epsilon(1e-12));

  // model A, a=2, tau=0.5, t=s=1, segment (0, 0.5, 1)
  const double ex_a = 2.0 * (std::exp(-1.0) - std::exp(-2.0)) / (1.0 - std::exp(-2.0));
  CHECK(rk::segment_integral(KernelModel::A, 2.0, 0.5, 1.0, 1.0, {0.0, 0.5, 1.0}) ==
        doctest::Approx(ex_a).epsilon(1e-12));
  CHECK(ex_a == doctest::Approx(0.53788).epsilon(1e-5));

  // model B, a=1, tau=1, t=2, s=1, segment (0, 0.5, 1)
  const double ex_b = (std::exp(-1.5) - std::exp(-2.0)) +
                      (1.0 - std::exp(-1.0) + std::exp(-2.0)) * 0.5;
  CHECK(rk::segment_integral(KernelModel::B, 1.0, 1.0, 2.0, 1.0, {0.0, 0.5, 1.0}) ==
        doctest::Approx(ex_b).epsilon(1e-12));
  CHECK(ex_b == doctest::Approx(0.47152).epsilon(1e-5));
}

TEST_CASE("segment integral agrees with adaptive quadrature of kernel_value") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int rep = 0; rep < 200; ++rep) {
    const KernelModel model = rep % 2 ? KernelModel::A : KernelModel::B;
    const double a = -3.0 + 6.0 * unif(rng);
    const double tau = std::pow(10.0, -2.0 + 3.0 * unif(rng));
    const double s = 0.1 + 9.9 * unif(rng);
    const double t = 0.1 + 14.9 * unif(rng);
    const double m = std::min(s, t);
    double lo = unif(rng) * m, hi = unif(rng) * m;
    if (lo > hi) std::swap(lo, hi);
    if (hi - lo < 1e-6) continue;
    const double value = unif(rng) * 4.0 - 2.0;

    const auto integrand = [&](double tp) {
      return value * rk::kernel_value(model, a, tau, t, tp, s);
    };
    // scale the quadrature tolerance to the integrand itself so segments in
    // the kernel's far tail are still resolved to relative precision
    double fmax = 0.0;
    for (int k = 0; k <= 8; ++k)
      fmax = std::max(fmax, std::fabs(integrand(lo + (hi - lo) * k / 8.0)));
    if (fmax * (hi - lo) < 1e-200) continue;  // both sides are zero for doubles
    const double closed = rk::segment_integral(model, a, tau, t, s, {lo, hi, value});
    const double quad =
        rk::oracle::integrate(integrand, lo, hi, 1e-13 * fmax * (hi - lo));
    CHECK(std::fabs(closed - quad) <=
          1e-8 * std::max(std::fabs(closed), std::fabs(quad)));
  }
}

TEST_CASE("model A forgets nothing after the final observation time") {
  for (double t_prime : {0.0, 0.3, 0.9, 1.0}) {
    const double v1 = rk::kernel_value(KernelModel::A, 1.3, 0.7, 1.5, t_prime, 1.0);
    const double v2 = rk::kernel_value(KernelModel::A, 1.3, 0.7, 87.0, t_prime, 1.0);
    CHECK(v1 == v2);  // bitwise: t only enters through min(s, t)
  }
}

TEST_CASE("model B settles at a/s for late evaluation times") {
  for (double tau : {0.01, 0.4, 2.0}) {
    const double a = 1.7, s = 3.0;
    const double t = s + 60.0 * tau;
    for (double t_prime : {0.0, 1.0, 2.9}) {
      const double v = rk::kernel_value(KernelModel::B, a, tau, t, t_prime, s);
      CHECK(std::fabs(v - a / s) <= 1e-6 * std::fabs(a / s));
    }
  }
}

TEST_CASE("no overflow for extreme time scales and horizons") {
  for (double tau : {1e-12, 1e-9, 1e-3, 1.0, 1e3}) {
    for (double t : {1e-6, 1.0, 1e3, 1e6}) {
      const double s = 0.5 * t;
      if (!(s > 0.0)) continue;
      const double tp = 0.25 * t;
      for (auto model : {KernelModel::A, KernelModel::B}) {
        const double v = rk::kernel_value(model, 2.0, tau, t, tp, s);
        CHECK(std::isfinite(v));
        const double integral =
            rk::segment_integral(model, 2.0, tau, t, s, {0.0, s, 1.0});
        CHECK(std::isfinite(integral));
      }
    }
  }
}

TEST_CASE("exponent: fixed covariates only") {
  KernelParams params;
  params.gamma = {0.7};
  const std::vector<double> fixed{1.0};
  CHECK(rk::exponent(KernelModel::A, S0Policy::Constant, params, {}, fixed, 2.0,
                     1.0, 1.0) == doctest::Approx(0.7).epsilon(1e-15));
}

TEST_CASE("exponent: constancy condition for a constant trajectory") {
  KernelParams params;
  params.a = {1.4};
  params.tau = {0.3};
  params.gamma = {0.5};
  const std::vector<double> fixed{2.0};
  const auto traj = StepTrajectory::from_observations(
      std::vector<double>{0.0, 1.0, 2.0}, std::vector<double>{3.0, 3.0, 3.0});
  std::vector<StepTrajectory> trajs{traj};
  for (double t : {2.0, 2.5, 10.0}) {
    for (auto model : {KernelModel::A, KernelModel::B}) {
      const double e = rk::exponent(model, S0Policy::Constant, params, trajs,
                                    fixed, t, 2.0, 2.0);
      CHECK(e == doctest::Approx(0.5 * 2.0 + 1.4 * 3.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("exponent: s = 0 fallback policies") {
  KernelParams params;
  params.a = {2.0};
  params.tau = {0.5};
  const auto traj = StepTrajectory::from_observations(std::vector<double>{0.0},
                                                      std::vector<double>{3.0});
  std::vector<StepTrajectory> trajs{traj};
  for (double t : {0.5, 1.0, 7.0}) {
    CHECK(rk::exponent(KernelModel::A, S0Policy::Constant, params, trajs, {}, t,
                       0.0, 0.0) == doctest::Approx(6.0).epsilon(1e-15));
    CHECK(rk::exponent(KernelModel::B, S0Policy::Decay, params, trajs, {}, t, 0.0,
                       0.0) == doctest::Approx(6.0 * std::exp(-t / 0.5)).epsilon(1e-12));
  }
}

TEST_CASE("exponent approaches the instantaneous value as tau -> 0") {
  KernelParams params;
  const auto traj = StepTrajectory::from_observations(
      std::vector<double>{0.0, 2.0, 4.0, 6.0}, std::vector<double>{2.0, 3.5, 1.5, 2.5});
  std::vector<StepTrajectory> trajs{traj};
  const double s = 6.0;
  const double tau = 1e-4 * s;
  params.a = {1.2};
  params.tau = {tau};
  for (double t : {0.5, 2.0, 3.9, 5.5}) {  // each at least 10 tau from a midpoint
    const double z_t = traj.value_at(t);
    for (auto model : {KernelModel::A, KernelModel::B}) {
      const double e =
          rk::exponent(model, S0Policy::Constant, params, trajs, {}, t, s, s);
      CHECK(std::fabs(e - 1.2 * z_t) <= 1e-3 * std::fabs(1.2 * z_t));
    }
  }
}

TEST_CASE("covariate_integral equals the sum of per-segment closed forms") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<double> times{0.0}, values{unif(rng) * 4.0 - 2.0};
    const int extra = static_cast<int>(unif(rng) * 5);
    for (int i = 0; i < extra; ++i) {
      times.push_back(times.back() + 0.2 + unif(rng));
      values.push_back(unif(rng) * 4.0 - 2.0);
    }
    const auto traj = StepTrajectory::from_observations(times, values);
    const double s = times.back() + unif(rng);
    const double t = 0.2 + unif(rng) * 2.0 * s;
    const double limit = unif(rng) * s;
    const auto model = rep % 2 ? KernelModel::A : KernelModel::B;
    const double a = unif(rng) * 2.0 - 1.0;
    const double tau = 0.05 + unif(rng) * 3.0;

    const double lim = std::min(limit, t);
    double direct = 0.0;
    for (const auto& seg : traj.segments_up_to(lim))
      direct += rk::segment_integral(model, a, tau, t, s, seg);
    const double fused = rk::covariate_integral(model, a, tau, t, s, traj, limit);
    CHECK(fused == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("invalid kernel arguments are rejected") {
  CHECK_THROWS_AS(rk::kernel_value(KernelModel::A, 1.0, -1.0, 1.0, 0.5, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(rk::kernel_value(KernelModel::A, 1.0, 1.0, 1.0, 0.5, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(rk::kernel_value(KernelModel::A, 1.0, 1.0, 2.0, -0.5, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      rk::segment_integral(KernelModel::B, 1.0, 1.0, 2.0, 1.0, {0.5, 1.5, 1.0}),
      std::invalid_argument);
}
