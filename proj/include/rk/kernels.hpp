#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "rk/trajectory.hpp"

namespace rk {

// The two retarded-kernel parameterisations. Both decay exponentially in
// t - t' with time scale tau and integrate to a over [0, min(s,t)].
// A keeps no explicit t dependence once t exceeds the final observation
// time s; B keeps decaying towards a/s.
enum class KernelModel { A, B };

// Association used for subjects observed only at baseline (s = 0), where
// the kernel forms are undefined: a constant association a, or a*exp(-t/tau).
enum class S0Policy { Constant, Decay };

// Full association parameter set: one (a, tau) pair per longitudinal
// covariate plus one gamma per fixed covariate. The nonparametric base
// hazard is handled separately (Breslow form).
struct KernelParams {
  std::vector<double> a;      // associations, length p
  std::vector<double> tau;    // impact time scales, length p, > 0
  std::vector<double> gamma;  // fixed-covariate associations, length q
};

namespace detail {

// e^{hi} - e^{lo} for lo <= hi <= 0. expm1 avoids cancellation when the
// exponents nearly coincide; the direct difference avoids 0 * inf when
// they are far apart.
inline double exp_diff(double lo, double hi) {
  const double d = hi - lo;
  if (d < 1.0) return std::exp(lo) * std::expm1(d);
  return std::exp(hi) - std::exp(lo);
}

}  // namespace detail

// beta(t, t', s) for one covariate. Returns 0 for t' > t (causality).
// Evaluated in shifted form so every exponential argument is <= 0; safe for
// tau down to 1e-12 and t up to 1e6.
double kernel_value(KernelModel model, double a, double tau, double t,
                    double t_prime, double s);

// Closed form of the integral of beta(t, t', s) * seg.value over
// [seg.start, seg.end], which must lie inside [0, min(s,t)].
double segment_integral(KernelModel model, double a, double tau, double t,
                        double s, const Segment& seg);

// Integral of beta * z over [0, min(limit, t)] for one covariate trajectory,
// computed piece by piece with one exponential per breakpoint.
double covariate_integral(KernelModel model, double a, double tau, double t,
                          double s, const StepTrajectory& traj, double limit);

// The full hazard exponent at time t for one subject:
//   sum_nu gamma_nu zeta_nu + sum_mu int_0^{min(obs_limit,t)} beta_mu z_mu dt'.
// For s = 0 the longitudinal part degenerates to sum_mu beta_mu(t) z_mu(0)
// with beta_mu(t) given by the S0Policy.
double exponent(KernelModel model, S0Policy s0, const KernelParams& params,
                std::span<const StepTrajectory> trajs,
                std::span<const double> fixed, double t, double s,
                double obs_limit);

}  // namespace rk
