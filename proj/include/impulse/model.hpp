#pragma once

/**
 * @file model.hpp
 * @brief Third-order positive Wiener plant: a cascade of three first-order
 * compartments feeding a static Hill output map.
 *
 * Units throughout: time in min, rates in 1/min, doses in ug, concentrations
 * in ug/ml, effect in percent.
 */

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <string>

#include "impulse/error.hpp"

namespace impulse {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Nominal population values for the atracurium NMB model.
inline constexpr double kNominalAlpha = 0.0374;
inline constexpr double kNominalC50 = 3.2425;
inline constexpr double kNominalGamma = 2.6677;

struct PlantParams {
  double alpha = kNominalAlpha;
  std::array<double, 3> v{1.0, 4.0, 10.0};
  /// Coupling g1; g2 follows from g1 * g2 = v1 v2 v3 alpha^3. Unset selects
  /// g1 = v1 alpha, g2 = v2 v3 alpha^2.
  std::optional<double> g1;

  double gain_product() const { return v[0] * v[1] * v[2] * alpha * alpha * alpha; }
};

/**
 * @brief Lower-triangular Metzler/Hurwitz plant x' = A x, ybar = C x with
 * input vector B = e1 and output C = e3 (so C B = 0).
 */
class LinearPlant {
 public:
  LinearPlant(std::array<double, 3> a, double g1, double g2) : a_(a), g1_(g1), g2_(g2) {
    A_ << -a[0], 0.0, 0.0,
          g1, -a[1], 0.0,
          0.0, g2, -a[2];
  }

  const Mat3& A() const { return A_; }
  static Vec3 B() { return Vec3::UnitX(); }
  static Eigen::RowVector3d C() { return Eigen::RowVector3d(0.0, 0.0, 1.0); }

  /// Eigenvalue magnitudes: A has spectrum {-a1, -a2, -a3}.
  const std::array<double, 3>& a() const { return a_; }
  double g1() const { return g1_; }
  double g2() const { return g2_; }

  /// Steady-state ratio g1 g2 / (a2 a3) between the first and last compartment.
  double transfer_ratio() const { return g1_ * g2_ / (a_[1] * a_[2]); }

  static double output(const Vec3& x) { return x[2]; }

 private:
  std::array<double, 3> a_;
  double g1_;
  double g2_;
  Mat3 A_;
};

inline LinearPlant build_plant(const PlantParams& p) {
  if (!(p.alpha > 0.0 && p.alpha <= 0.1)) {
    throw Error(ErrorKind::InvalidParameter, "alpha must lie in (0, 0.1], got " + std::to_string(p.alpha));
  }
  for (double vi : p.v) {
    if (!(vi > 0.0) || !std::isfinite(vi)) {
      throw Error(ErrorKind::InvalidParameter, "rate multipliers v must be positive");
    }
  }
  if (p.v[0] == p.v[1] || p.v[0] == p.v[2] || p.v[1] == p.v[2]) {
    throw Error(ErrorKind::DegenerateSpectrum, "rate multipliers v must be pairwise distinct");
  }
  const std::array<double, 3> a{p.v[0] * p.alpha, p.v[1] * p.alpha, p.v[2] * p.alpha};
  const double product = p.gain_product();
  const double g1 = p.g1.value_or(a[0]);
  if (!(g1 > 0.0) || !std::isfinite(g1)) {
    throw Error(ErrorKind::InvalidParameter, "g1 must be positive");
  }
  const double g2 = p.g1 ? product / g1 : p.v[1] * p.v[2] * p.alpha * p.alpha;
  return LinearPlant(a, g1, g2);
}

namespace detail {

// exp(M) by scaling and squaring with a truncated Taylor series.
inline Mat3 expm_scaled_series(const Mat3& M, double tol = 1e-13) {
  const double norm = M.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5) {
    squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  }
  const Mat3 S = M / std::ldexp(1.0, squarings);
  Mat3 result = Mat3::Identity();
  Mat3 term = Mat3::Identity();
  for (int k = 1; k < 64; ++k) {
    term = term * S / static_cast<double>(k);
    result += term;
    if (term.cwiseAbs().maxCoeff() <= tol * result.cwiseAbs().maxCoeff()) break;
  }
  for (int i = 0; i < squarings; ++i) result = result * result;
  return result;
}

// Divided difference (e^{-x t} - e^{-y t}) / (y - x) of the decaying exponential.
inline double exp_divided_difference(double x, double ex, double y, double ey) {
  return (ex - ey) / (y - x);
}

}  // namespace detail

/**
 * @brief Exact e^{tA} for the lower-triangular plant.
 *
 * Distinct eigenvalues use the closed-form divided-difference entries; nearly
 * coincident ones (relative gap below 1e-8) fall back to scaling and squaring.
 */
inline Mat3 mat_exp(const LinearPlant& plant, double t) {
  if (!(t >= 0.0)) {
    throw Error(ErrorKind::InvalidParameter, "mat_exp requires t >= 0");
  }
  const auto& a = plant.a();
  const double amax = std::max({a[0], a[1], a[2]});
  const double gap = std::min({std::abs(a[0] - a[1]), std::abs(a[1] - a[2]), std::abs(a[0] - a[2])});
  if (gap < 1e-8 * amax) {
    return detail::expm_scaled_series(t * plant.A());
  }
  const double e1 = std::exp(-a[0] * t);
  const double e2 = std::exp(-a[1] * t);
  const double e3 = std::exp(-a[2] * t);
  const double d12 = detail::exp_divided_difference(a[0], e1, a[1], e2);
  const double d23 = detail::exp_divided_difference(a[1], e2, a[2], e3);
  const double d123 = (d12 - d23) / (a[2] - a[0]);
  Mat3 E;
  E << e1, 0.0, 0.0,
       plant.g1() * d12, e2, 0.0,
       plant.g1() * plant.g2() * d123, plant.g2() * d23, e3;
  return E;
}

/**
 * @brief Hill map phi(ybar) = 100 C50^g / (C50^g + ybar^g), decreasing from
 * 100 at ybar = 0 towards 0.
 */
class HillNonlinearity {
 public:
  HillNonlinearity() = default;
  HillNonlinearity(double c50, double gamma) : c50_(c50), gamma_(gamma) {
    if (!(c50 > 0.0) || !std::isfinite(c50)) {
      throw Error(ErrorKind::InvalidParameter, "C50 must be positive");
    }
    if (!(gamma > 0.0 && gamma <= 10.0)) {
      throw Error(ErrorKind::InvalidParameter, "Hill slope gamma must lie in (0, 10]");
    }
  }

  double c50() const { return c50_; }
  double gamma() const { return gamma_; }

  HillNonlinearity with_gamma(double gamma) const { return {c50_, gamma}; }

 private:
  double c50_ = kNominalC50;
  double gamma_ = kNominalGamma;
};

inline double hill(const HillNonlinearity& h, double ybar) {
  if (!(ybar >= 0.0)) {
    throw Error(ErrorKind::InvalidParameter, "Hill map requires a nonnegative concentration");
  }
  return 100.0 / (1.0 + std::pow(ybar / h.c50(), h.gamma()));
}

inline double hill_inv(const HillNonlinearity& h, double y) {
  if (!(y > 0.0 && y < 100.0)) {
    throw Error(ErrorKind::OutOfRange, "Hill inverse defined for effect in (0, 100)");
  }
  return h.c50() * std::pow(100.0 / y - 1.0, 1.0 / h.gamma());
}

inline double hill_deriv(const HillNonlinearity& h, double ybar) {
  if (ybar < 0.0 || std::isnan(ybar)) {
    throw Error(ErrorKind::InvalidParameter, "Hill derivative requires a nonnegative concentration");
  }
  const double g = h.gamma();
  if (ybar == 0.0) {
    if (g < 1.0) throw Error(ErrorKind::Singularity, "Hill derivative unbounded at 0 for gamma < 1");
    return g == 1.0 ? -100.0 / h.c50() : 0.0;
  }
  const double r = std::pow(ybar / h.c50(), g);
  return -g * 100.0 * r / (ybar * (1.0 + r) * (1.0 + r));
}

}  // namespace impulse
