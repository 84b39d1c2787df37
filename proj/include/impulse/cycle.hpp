#pragma once

/**
 * @file cycle.hpp
 * @brief 1-cycles of the pulse-modulated loop: the fixed point of the
 * impulse-to-impulse map, the periodic output kernel, its extrema, and the
 * local (orbital) stability test.
 */

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <array>
#include <complex>
#include <limits>
#include <vector>

#include "impulse/model.hpp"

namespace impulse {

struct CycleSpec {
  double lambda = 0.0;  ///< dose per impulse (ug)
  double period = 1.0;  ///< inter-dose interval (min)
};

inline void check_spec(const CycleSpec& spec) {
  if (!(spec.lambda >= 0.0) || !std::isfinite(spec.lambda)) {
    throw Error(ErrorKind::InvalidParameter, "cycle dose must be nonnegative");
  }
  if (!(spec.period > 0.0) || !std::isfinite(spec.period)) {
    throw Error(ErrorKind::InvalidParameter, "cycle period must be positive");
  }
}

/// States of a 1-cycle at the firing instant.
struct FixedPoint {
  Vec3 pre_jump;   ///< X = x(t_n^-)
  Vec3 post_jump;  ///< X + lambda B
  double ybar0 = 0.0;
};

/**
 * Post-jump state lambda (I - e^{TA})^{-1} B; the pre-jump state is that
 * vector propagated over one period.
 */
inline FixedPoint fixed_point(const LinearPlant& plant, const CycleSpec& spec) {
  check_spec(spec);
  const Mat3 E = mat_exp(plant, spec.period);
  const Mat3 M = Mat3::Identity() - E;
  FixedPoint fp;
  fp.post_jump = spec.lambda * M.triangularView<Eigen::Lower>().solve(LinearPlant::B());
  fp.pre_jump = E * fp.post_jump;
  // Keep X+ = X + lambda B exact in floating point.
  fp.post_jump = fp.pre_jump + spec.lambda * LinearPlant::B();
  fp.ybar0 = LinearPlant::output(fp.pre_jump);
  return fp;
}

/// xi_T(tau) = C e^{tau A} (I - e^{TA})^{-1} B with the resolvent precomputed.
class OutputKernel {
 public:
  OutputKernel(const LinearPlant& plant, double period) : plant_(plant), period_(period) {
    if (!(period > 0.0)) throw Error(ErrorKind::InvalidParameter, "kernel period must be positive");
    const Mat3 M = Mat3::Identity() - mat_exp(plant, period);
    resolvent_b_ = M.triangularView<Eigen::Lower>().solve(LinearPlant::B());
  }

  double period() const { return period_; }

  double operator()(double tau) const {
    check(tau);
    return LinearPlant::C() * mat_exp(plant_, tau) * resolvent_b_;
  }

  double derivative(double tau) const {
    check(tau);
    return LinearPlant::C() * plant_.A() * mat_exp(plant_, tau) * resolvent_b_;
  }

 private:
  void check(double tau) const {
    if (!(tau >= 0.0 && tau <= period_)) {
      throw Error(ErrorKind::OutOfRange, "kernel argument must lie in [0, T]");
    }
  }

  LinearPlant plant_;
  double period_;
  Vec3 resolvent_b_;
};

inline double xi(const LinearPlant& plant, double period, double tau) {
  return OutputKernel(plant, period)(tau);
}

struct XiExtrema {
  double min = 0.0;
  double argmin = 0.0;
  double max = 0.0;
  double argmax = 0.0;
};

/**
 * @brief Global extrema of xi_T on [0, T].
 *
 * xi_T is a sum of three decaying exponentials, so xi_T' has at most two
 * roots. They are bracketed on a 1024-cell grid and bisected; the extrema
 * are then picked among the roots and both endpoints.
 */
inline XiExtrema xi_extrema(const LinearPlant& plant, double period) {
  const OutputKernel kernel(plant, period);
  constexpr int kCells = 1024;
  std::vector<double> candidates{0.0, period};

  const double h = period / kCells;
  double t_prev = 0.0;
  double d_prev = kernel.derivative(0.0);
  for (int i = 1; i <= kCells; ++i) {
    const double t = (i == kCells) ? period : i * h;
    const double d = kernel.derivative(t);
    if (d == 0.0) {
      candidates.push_back(t);
    } else if ((d_prev < 0.0 && d > 0.0) || (d_prev > 0.0 && d < 0.0)) {
      double lo = t_prev;
      double hi = t;
      double d_lo = d_prev;
      while (hi - lo > 1e-12 * std::max(1.0, period)) {
        const double mid = 0.5 * (lo + hi);
        const double d_mid = kernel.derivative(mid);
        if (d_mid == 0.0) {
          lo = hi = mid;
          break;
        }
        if ((d_mid < 0.0) == (d_lo < 0.0)) {
          lo = mid;
          d_lo = d_mid;
        } else {
          hi = mid;
        }
      }
      candidates.push_back(0.5 * (lo + hi));
    }
    t_prev = t;
    d_prev = d;
  }

  XiExtrema ext;
  ext.min = std::numeric_limits<double>::infinity();
  ext.max = -std::numeric_limits<double>::infinity();
  for (double tau : candidates) {
    const double value = kernel(tau);
    if (value < ext.min) {
      ext.min = value;
      ext.argmin = tau;
    }
    if (value > ext.max) {
      ext.max = value;
      ext.argmax = tau;
    }
  }
  return ext;
}

/// Q'(X) = e^{AT} + K C with K = e^{AT} B F' + A X Phi'.
inline Mat3 jacobian(const LinearPlant& plant, const CycleSpec& spec, double f_slope, double phi_slope) {
  const FixedPoint fp = fixed_point(plant, spec);
  const Mat3 E = mat_exp(plant, spec.period);
  const Vec3 J = E * LinearPlant::B();
  const Vec3 D = plant.A() * fp.pre_jump;
  const Vec3 K = J * f_slope + D * phi_slope;
  return E + K * LinearPlant::C();
}

struct SchurResult {
  bool stable = false;
  double spectral_radius = 0.0;
};

/// Sorted by decreasing modulus, ties broken by real then imaginary part.
template <typename Derived>
std::vector<std::complex<double>> eigenvalues(const Eigen::MatrixBase<Derived>& m) {
  Eigen::EigenSolver<Eigen::MatrixXd> solver(m.template cast<double>().eval(), false);
  const auto ev = solver.eigenvalues();
  std::vector<std::complex<double>> out(ev.data(), ev.data() + ev.size());
  std::sort(out.begin(), out.end(), [](const auto& x, const auto& y) {
    if (std::abs(x) != std::abs(y)) return std::abs(x) > std::abs(y);
    if (x.real() != y.real()) return x.real() > y.real();
    return x.imag() > y.imag();
  });
  return out;
}

/// Strict test: modulus exactly 1 counts as unstable.
template <typename Derived>
SchurResult is_schur(const Eigen::MatrixBase<Derived>& m) {
  SchurResult r;
  for (const auto& ev : eigenvalues(m)) r.spectral_radius = std::max(r.spectral_radius, std::abs(ev));
  r.stable = r.spectral_radius < 1.0;
  return r;
}

struct OutputRange {
  double ybar_min = 0.0;  ///< lowest concentration over the cycle
  double ybar_max = 0.0;
  double y_max = 100.0;   ///< highest effect, attained where ybar is lowest
  double y_min = 100.0;
  double tau_ybar_min = 0.0;
  double tau_ybar_max = 0.0;
};

inline OutputRange output_range(const LinearPlant& plant, const HillNonlinearity& h, const CycleSpec& spec) {
  check_spec(spec);
  const XiExtrema ext = xi_extrema(plant, spec.period);
  OutputRange r;
  r.ybar_min = spec.lambda * ext.min;
  r.ybar_max = spec.lambda * ext.max;
  r.tau_ybar_min = ext.argmin;
  r.tau_ybar_max = ext.argmax;
  r.y_max = hill(h, r.ybar_min);
  r.y_min = hill(h, r.ybar_max);
  return r;
}

struct CycleSolution {
  CycleSpec spec;
  FixedPoint states;
  OutputRange range;
  Mat3 jacobian = Mat3::Zero();
  std::vector<std::complex<double>> eigenvalues;
  SchurResult schur;
};

/// Everything known about the 1-cycle (lambda, T) under the given fixed-point slopes.
inline CycleSolution solve_cycle(const LinearPlant& plant, const HillNonlinearity& h, const CycleSpec& spec,
                                 double f_slope, double phi_slope) {
  CycleSolution sol;
  sol.spec = spec;
  sol.states = fixed_point(plant, spec);
  sol.range = output_range(plant, h, spec);
  sol.jacobian = jacobian(plant, spec, f_slope, phi_slope);
  sol.eigenvalues = eigenvalues(sol.jacobian);
  sol.schur = is_schur(sol.jacobian);
  return sol;
}

}  // namespace impulse
