#include "rk/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rk {

namespace {

constexpr double kTauFloor = 1e-12;  // guards pathological inputs only

double checked_tau(double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("kernel: tau must be positive");
  return std::max(tau, kTauFloor);
}

}  // namespace

double kernel_value(KernelModel model, double a, double tau, double t,
                    double t_prime, double s) {
  if (t_prime > t) return 0.0;  // causality
  tau = checked_tau(tau);
  if (!(s > 0.0)) throw std::invalid_argument("kernel: s must be positive");
  if (!(t > 0.0)) throw std::invalid_argument("kernel: t must be positive");
  const double m = std::min(s, t);
  if (t_prime < 0.0 || t_prime > m)
    throw std::invalid_argument("kernel: t_prime outside [0, min(s,t)]");

  if (model == KernelModel::A) {
    // (a/tau) e^{t'/tau} / (e^{m/tau} - 1), shifted by e^{-m/tau}
    return (a / tau) * std::exp((t_prime - m) / tau) / (-std::expm1(-m / tau));
  }
  // model B: (a/tau) e^{-(t-t')/tau} + (a/m) {1 - e^{-t/tau}(e^{m/tau} - 1)}
  return (a / tau) * std::exp(-(t - t_prime) / tau) +
         (a / m) * (1.0 - std::exp(-(t - m) / tau) + std::exp(-t / tau));
}

double segment_integral(KernelModel model, double a, double tau, double t,
                        double s, const Segment& seg) {
  tau = checked_tau(tau);
  if (!(s > 0.0)) throw std::invalid_argument("segment_integral: s must be positive");
  if (!(t > 0.0)) throw std::invalid_argument("segment_integral: t must be positive");
  const double m = std::min(s, t);
  if (seg.start < 0.0 || seg.end > m || !(seg.start < seg.end))
    throw std::invalid_argument("segment_integral: segment outside [0, min(s,t)]");

  if (model == KernelModel::A) {
    const double num = detail::exp_diff((seg.start - m) / tau, (seg.end - m) / tau);
    return a * seg.value * num / (-std::expm1(-m / tau));
  }
  const double decay =
      detail::exp_diff(-(t - seg.start) / tau, -(t - seg.end) / tau);
  const double plateau = (1.0 - std::exp(-(t - m) / tau) + std::exp(-t / tau)) / m;
  return a * seg.value * (decay + plateau * (seg.end - seg.start));
}

double covariate_integral(KernelModel model, double a, double tau, double t,
                          double s, const StepTrajectory& traj, double limit) {
  tau = checked_tau(tau);
  const double m = std::min(s, t);
  const double lim = std::min(limit, t);
  if (lim <= 0.0) return 0.0;
  if (lim > m + 1e-12 * std::max(1.0, m))
    throw std::invalid_argument("covariate_integral: limit beyond min(s,t)");

  const auto& cps = traj.change_points();
  const auto& vals = traj.segment_values();

  // sum_l v_l (e^{(b_l - m)/tau} - e^{(b_{l-1} - m)/tau}); exp_diff keeps
  // the per-segment difference accurate for any tau. Same telescoping
  // factor for both models.
  double weighted = 0.0;  // integral of e^{(t'-m)/tau} z(t') / tau
  double plain = 0.0;     // integral of z(t') (model B plateau term)
  double start = 0.0;
  for (std::size_t i = 0; i < vals.size() && start < lim; ++i) {
    const double end = i < cps.size() ? std::min(cps[i], lim) : lim;
    if (end > start) {
      weighted += vals[i] * detail::exp_diff((start - m) / tau, (end - m) / tau);
      plain += vals[i] * (end - start);
      start = end;
    }
  }

  if (model == KernelModel::A) return a * weighted / (-std::expm1(-m / tau));
  // model B: the decaying factor is e^{-(t-m)/tau} * weighted
  const double decay = std::exp(-(t - m) / tau);
  return a * decay * weighted +
         (a / m) * (1.0 - decay + std::exp(-t / tau)) * plain;
}

double exponent(KernelModel model, S0Policy s0, const KernelParams& params,
                std::span<const StepTrajectory> trajs,
                std::span<const double> fixed, double t, double s,
                double obs_limit) {
  if (trajs.size() != params.a.size() || params.a.size() != params.tau.size())
    throw std::invalid_argument("exponent: trajectory/parameter count mismatch");
  if (fixed.size() != params.gamma.size())
    throw std::invalid_argument("exponent: fixed covariate count mismatch");
  if (obs_limit < 0.0 || obs_limit > s + 1e-12 * std::max(1.0, s))
    throw std::invalid_argument("exponent: obs_limit outside [0, s]");
  if (!(t > 0.0)) throw std::invalid_argument("exponent: t must be positive");

  double e = 0.0;
  for (std::size_t nu = 0; nu < fixed.size(); ++nu) e += params.gamma[nu] * fixed[nu];

  if (s == 0.0) {
    for (std::size_t mu = 0; mu < trajs.size(); ++mu) {
      const double beta = s0 == S0Policy::Constant
                              ? params.a[mu]
                              : params.a[mu] * std::exp(-t / checked_tau(params.tau[mu]));
      e += beta * trajs[mu].value_at(0.0);
    }
    return e;
  }

  for (std::size_t mu = 0; mu < trajs.size(); ++mu)
    e += covariate_integral(model, params.a[mu], params.tau[mu], t, s, trajs[mu],
                            obs_limit);
  return e;
}

}  // namespace rk
