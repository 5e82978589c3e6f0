// Timing comparison between the serial reference implementations and the
// OpenMP production kernels, on synthetic longitudinal data. Also reports
// the largest disagreement so speed never silently buys wrong numbers.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <vector>

#include "rk/evaluation.hpp"
#include "rk/parallel.hpp"
#include "rk/prediction.hpp"
#include "rk/reference.hpp"
#include "rk/rk_fit.hpp"

#include "../tests/support/synth.hpp"

namespace {

using clock_type = std::chrono::steady_clock;

template <typename Fn>
double time_ms(Fn&& fn, int reps) {
  fn();  // warm up
  const auto start = clock_type::now();
  for (int r = 0; r < reps; ++r) fn();
  const auto stop = clock_type::now();
  return std::chrono::duration<double, std::milli>(stop - start).count() / reps;
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t n = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 400;
  const int reps = argc > 2 ? std::atoi(argv[2]) : 5;

  const rk::Dataset data = rk::synth::longitudinal(n, 2, 42);
  const rk::Dataset train = rk::synth::longitudinal(n, 2, 43);

  rk::KernelParams params;
  params.a = {0.4, -0.2};
  params.tau = {0.8, 2.5};
  params.gamma = {0.3};

  std::printf("N=%zu subjects, %zu events, reps=%d\n", data.subjects.size(),
              data.n_events(), reps);

  for (const auto model : {rk::KernelModel::A, rk::KernelModel::B}) {
    const char* name = model == rk::KernelModel::A ? "A" : "B";
    const rk::RkObjective objective(data, model, rk::S0Policy::Constant);

    const double ref = rk::reference::neg_log_pl(params, model,
                                                 rk::S0Policy::Constant, data);
    const double prod = objective(params);

    const double t_ref = time_ms(
        [&] { rk::reference::neg_log_pl(params, model, rk::S0Policy::Constant, data); },
        reps);
    rk::set_jobs(1);
    const double t_serial = time_ms([&] { objective(params); }, reps);
    rk::set_jobs(0);
    const double t_parallel = time_ms([&] { objective(params); }, reps);

    std::printf("neg_log_pl model %s: reference %8.2f ms | cached serial %8.2f ms "
                "(%.1fx) | openmp %8.2f ms (%.1fx) | |diff| %.3e\n",
                name, t_ref, t_serial, t_ref / t_serial, t_parallel,
                t_ref / t_parallel, std::fabs(ref - prod));
  }

  // prediction-error evaluation path
  rk::FitConfig fc;
  fc.opt.f_tol = 1e-6;
  fc.opt.x_tol = 1e-6;
  const rk::RkDynamicModel fitted(
      rk::fit_rk(train, rk::KernelModel::A, rk::S0Policy::Constant, fc));

  const double t = 2.0, u = 5.0;
  const double pe_ref =
      rk::reference::prediction_error(fitted, data, t, u, rk::LossFn::Squared);
  const double pe_prod = rk::prediction_error(fitted, data, t, u, rk::LossFn::Squared);

  const double t_ref = time_ms(
      [&] { rk::reference::prediction_error(fitted, data, t, u, rk::LossFn::Squared); },
      reps);
  rk::set_jobs(1);
  const double t_serial = time_ms(
      [&] { rk::prediction_error(fitted, data, t, u, rk::LossFn::Squared); }, reps);
  rk::set_jobs(0);
  const double t_parallel = time_ms(
      [&] { rk::prediction_error(fitted, data, t, u, rk::LossFn::Squared); }, reps);

  std::printf("prediction_error:    reference %8.2f ms | serial %8.2f ms (%.1fx) | "
              "openmp %8.2f ms (%.1fx) | |diff| %.3e\n",
              t_ref, t_serial, t_ref / t_serial, t_parallel, t_ref / t_parallel,
              std::fabs(pe_ref - pe_prod));
  return 0;
}
