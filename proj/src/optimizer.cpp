#include "rk/optimizer.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace rk {

namespace {

constexpr double kGold = 1.618034;
constexpr double kGlimit = 100.0;  // max bracketing magnification per step
constexpr double kTiny = 1e-25;
constexpr double kCGold = 0.3819660;
constexpr double kZeps = 1e-18;

std::string point_to_string(const std::vector<double>& x) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (i) os << ", ";
    os << x[i];
  }
  os << ')';
  return os.str();
}

struct LineFunction {
  const Objective& f;
  const std::vector<double>& origin;
  const std::vector<double>& dir;
  long* n_evals;
  mutable std::vector<double> scratch;

  double operator()(double alpha) const {
    scratch = origin;
    for (std::size_t i = 0; i < scratch.size(); ++i) scratch[i] += alpha * dir[i];
    const double v = f(scratch);
    ++*n_evals;
    if (!std::isfinite(v))
      throw std::runtime_error("optimizer: objective returned a non-finite value at " +
                               point_to_string(scratch));
    return v;
  }
};

// Searches downhill from (a, b) until a bracketing triple is found.
void bracket(const LineFunction& f, double& ax, double& bx, double& cx,
             double& fa, double& fb, double& fc, int max_evals, int& used) {
  fa = f(ax);
  fb = f(bx);
  used = 2;
  if (fb > fa) {
    std::swap(ax, bx);
    std::swap(fa, fb);
  }
  cx = bx + kGold * (bx - ax);
  fc = f(cx);
  ++used;
  while (fb > fc && used < max_evals) {
    const double r = (bx - ax) * (fb - fc);
    const double q = (bx - cx) * (fb - fa);
    double u = bx - ((bx - cx) * q - (bx - ax) * r) /
                        (2.0 * std::copysign(std::max(std::fabs(q - r), kTiny), q - r));
    const double ulim = bx + kGlimit * (cx - bx);
    double fu;
    if ((bx - u) * (u - cx) > 0.0) {
      fu = f(u);
      ++used;
      if (fu < fc) {
        ax = bx;
        bx = u;
        fa = fb;
        fb = fu;
        return;
      }
      if (fu > fb) {
        cx = u;
        fc = fu;
        return;
      }
      u = cx + kGold * (cx - bx);
      fu = f(u);
      ++used;
    } else if ((cx - u) * (u - ulim) > 0.0) {
      fu = f(u);
      ++used;
      if (fu < fc) {
        bx = cx;
        cx = u;
        u = cx + kGold * (cx - bx);
        fb = fc;
        fc = fu;
        fu = f(u);
        ++used;
      }
    } else if ((u - ulim) * (ulim - cx) >= 0.0) {
      u = ulim;
      fu = f(u);
      ++used;
    } else {
      u = cx + kGold * (cx - bx);
      fu = f(u);
      ++used;
    }
    ax = bx;
    bx = cx;
    cx = u;
    fa = fb;
    fb = fc;
    fc = fu;
  }
}

// Brent's parabolic/golden-section minimization inside a bracket.
double brent(const LineFunction& f, double ax, double bx, double cx, double fbx,
             double tol, int max_evals, double& xmin) {
  double a = std::min(ax, cx);
  double b = std::max(ax, cx);
  double x = bx, w = bx, v = bx;
  double fx = fbx, fw = fbx, fv = fbx;
  double d = 0.0, e = 0.0;

  for (int iter = 0; iter < max_evals; ++iter) {
    const double xm = 0.5 * (a + b);
    const double tol1 = tol * std::fabs(x) + kZeps;
    const double tol2 = 2.0 * tol1;
    if (std::fabs(x - xm) <= tol2 - 0.5 * (b - a)) break;
    if (std::fabs(e) > tol1) {
      const double r = (x - w) * (fx - fv);
      double q = (x - v) * (fx - fw);
      double p = (x - v) * q - (x - w) * r;
      q = 2.0 * (q - r);
      if (q > 0.0) p = -p;
      q = std::fabs(q);
      const double etemp = e;
      e = d;
      if (std::fabs(p) >= std::fabs(0.5 * q * etemp) || p <= q * (a - x) ||
          p >= q * (b - x)) {
        e = x >= xm ? a - x : b - x;
        d = kCGold * e;
      } else {
        d = p / q;
        const double u = x + d;
        if (u - a < tol2 || b - u < tol2) d = std::copysign(tol1, xm - x);
      }
    } else {
      e = x >= xm ? a - x : b - x;
      d = kCGold * e;
    }
    const double u = std::fabs(d) >= tol1 ? x + d : x + std::copysign(tol1, d);
    const double fu = f(u);
    if (fu <= fx) {
      if (u >= x)
        a = x;
      else
        b = x;
      v = w;
      w = x;
      x = u;
      fv = fw;
      fw = fx;
      fx = fu;
    } else {
      if (u < x)
        a = u;
      else
        b = u;
      if (fu <= fw || w == x) {
        v = w;
        w = u;
        fv = fw;
        fw = fu;
      } else if (fu <= fv || v == x || v == w) {
        v = u;
        fv = fu;
      }
    }
  }
  xmin = x;
  return fx;
}

// Minimizes along dir starting at x (alpha = 0, objective value fx there);
// moves x to the line minimum and returns the new value.
double line_minimize(const Objective& objective, std::vector<double>& x,
                     std::vector<double>& dir, double fx, double x_tol,
                     int max_line_evals, long& n_evals) {
  LineFunction f{objective, x, dir, &n_evals, {}};
  double ax = 0.0, bx = 1.0, cx, fa, fb, fc;
  int used = 0;
  bracket(f, ax, bx, cx, fa, fb, fc, max_line_evals, used);
  double alpha = 0.0;
  const double fmin =
      brent(f, ax, bx, cx, fb, x_tol, std::max(1, max_line_evals - used), alpha);
  if (fmin < fx) {  // strict: flat directions must not drift the point
    for (std::size_t i = 0; i < x.size(); ++i) {
      dir[i] *= alpha;
      x[i] += dir[i];
    }
    return fmin;
  }
  dir.assign(dir.size(), 0.0);  // no improvement on this line
  return fx;
}

}  // namespace

MinimizeResult minimize(const Objective& objective, std::vector<double> x0,
                        const OptimizerConfig& cfg) {
  const int d = static_cast<int>(x0.size());
  if (d < 1) throw std::invalid_argument("minimize: empty start point");
  const int max_sweeps = cfg.max_iters > 0 ? cfg.max_iters : 200 * d;

  MinimizeResult res;
  res.x = std::move(x0);
  res.f = objective(res.x);
  res.n_evals = 1;
  if (!std::isfinite(res.f))
    throw std::invalid_argument("minimize: objective not finite at start point " +
                                point_to_string(res.x));

  std::vector<std::vector<double>> dirs(d, std::vector<double>(d, 0.0));
  auto reset_dirs = [&] {
    for (int i = 0; i < d; ++i) {
      dirs[i].assign(d, 0.0);
      dirs[i][i] = 1.0;
    }
  };
  reset_dirs();

  std::vector<double> x_start(d), dir(d);
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    res.n_sweeps = sweep;
    // Reset to coordinate axes every d sweeps, leaving the first full cycle
    // plus its concluding sweep intact (conjugacy needs d+1 undisturbed
    // sweeps on a quadratic).
    if (sweep > d + 1 && (sweep - 1) % d == 0) reset_dirs();

    const double f_start = res.f;
    x_start = res.x;

    for (int k = 0; k < d; ++k) {
      dir = dirs[k];
      res.f = line_minimize(objective, res.x, dir, res.f, cfg.x_tol,
                            cfg.max_line_evals, res.n_evals);
    }

    if (2.0 * (f_start - res.f) <=
        cfg.f_tol * (std::fabs(f_start) + std::fabs(res.f)) + kTiny) {
      res.converged = true;
      return res;
    }

    if (d == 1) continue;

    // Powell update: minimize along the sweep displacement, drop the oldest
    // direction and append the displacement (conjugate on quadratics).
    std::vector<double> displacement(d);
    double norm = 0.0;
    for (int i = 0; i < d; ++i) {
      displacement[i] = res.x[i] - x_start[i];
      norm += std::fabs(displacement[i]);
    }
    if (norm == 0.0) continue;
    std::vector<double> scaled = displacement;
    res.f = line_minimize(objective, res.x, scaled, res.f, cfg.x_tol,
                          cfg.max_line_evals, res.n_evals);
    double scaled_norm = 0.0;
    for (double v : scaled) scaled_norm += std::fabs(v);
    for (int k = 0; k + 1 < d; ++k) dirs[k] = dirs[k + 1];
    dirs[d - 1] = scaled_norm > 0.0 ? scaled : displacement;
  }
  return res;  // budget exhausted; best point, converged = false
}

}  // namespace rk
