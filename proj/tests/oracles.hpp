#pragma once

// Test-only reference computations. None of these call the closed-form
// exponential or the extrema search they are used to check.

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <functional>
#include <random>

#include "impulse/impulse.hpp"

namespace oracle {

using impulse::Mat3;
using impulse::Vec3;

// Pade-based dense exponential (Eigen unsupported module).
inline Mat3 expm(const Mat3& A, double t) {
  const Mat3 M = t * A;
  return M.exp();
}

inline Vec3 post_jump_fixed_point(const impulse::LinearPlant& p, double lambda, double period) {
  const Mat3 E = expm(p.A(), period);
  return (Mat3::Identity() - E).fullPivLu().solve(lambda * impulse::LinearPlant::B());
}

inline double xi(const impulse::LinearPlant& p, double period, double tau) {
  const Vec3 v = post_jump_fixed_point(p, 1.0, period);
  return impulse::LinearPlant::C() * expm(p.A(), tau) * v;
}

inline double bisect(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-14) {
  double flo = f(lo);
  while (hi - lo > tol * std::max(1.0, std::abs(lo))) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Golden-section refinement of a bracketed minimum.
inline double golden_min(const std::function<double(double)>& f, double a, double b, double tol = 1e-12) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - r * (b - a);
  double d = a + r * (b - a);
  while (b - a > tol) {
    if (f(c) < f(d)) {
      b = d;
    } else {
      a = c;
    }
    c = b - r * (b - a);
    d = a + r * (b - a);
  }
  return 0.5 * (a + b);
}

struct GridExtrema {
  double min;
  double argmin;
  double max;
  double argmax;
};

// Dense-grid sampling then golden refinement in the neighbouring cells.
inline GridExtrema grid_extrema(const std::function<double(double)>& f, double T, int points) {
  double best_lo = f(0.0), best_hi = best_lo;
  int ilo = 0, ihi = 0;
  for (int i = 1; i < points; ++i) {
    const double v = f(T * i / (points - 1));
    if (v < best_lo) { best_lo = v; ilo = i; }
    if (v > best_hi) { best_hi = v; ihi = i; }
  }
  const double h = T / (points - 1);
  auto refine = [&](int i, double sign) {
    const double a = std::max(0.0, (i - 1) * h);
    const double b = std::min(T, (i + 1) * h);
    return golden_min([&](double t) { return sign * f(t); }, a, b);
  };
  GridExtrema g{};
  g.argmin = refine(ilo, 1.0);
  g.min = std::min(best_lo, f(g.argmin));
  g.argmax = refine(ihi, -1.0);
  g.max = std::max(best_hi, f(g.argmax));
  return g;
}

// The closed-loop map Q(x) = e^{A Phi(Cx)} (x + F(Cx) B), via the Pade exponential.
inline Vec3 closed_loop_map(const impulse::LinearPlant& p, const impulse::ModulationConfig& m, const Vec3& x) {
  const double ybar = x[2];
  const double lam = impulse::eval_dose(m, ybar);
  const double T = impulse::eval_period(m, ybar);
  return expm(p.A(), T) * (x + lam * impulse::LinearPlant::B());
}

// Central-difference Jacobian of Q.
inline Mat3 fd_jacobian(const impulse::LinearPlant& p, const impulse::ModulationConfig& m, const Vec3& x) {
  Mat3 J;
  for (int j = 0; j < 3; ++j) {
    const double h = 1e-5 * std::max(1.0, std::abs(x[j]));
    Vec3 xp = x, xm = x;
    xp[j] += h;
    xm[j] -= h;
    J.col(j) = (closed_loop_map(p, m, xp) - closed_loop_map(p, m, xm)) / (2.0 * h);
  }
  return J;
}

}  // namespace oracle
