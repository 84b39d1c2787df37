#pragma once

/**
 * @file feasibility.hpp
 * @brief Can a 1-cycle keep the effect y(t) inside a corridor [y_min, y_max]?
 *
 * Three levels of answer: ultimate bounds valid for any solution with bounded
 * doses and periods, a necessary dose interval for a given period together
 * with a cheap sufficient test, and the exact check through the extrema of
 * the output kernel.
 */

#include <cmath>
#include <optional>
#include <utility>

#include "impulse/cycle.hpp"

namespace impulse {

class Corridor {
 public:
  Corridor(double y_min, double y_max, const HillNonlinearity& h = {}) : y_min_(y_min), y_max_(y_max) {
    if (!(y_min > 0.0 && y_min < y_max && y_max < 100.0)) {
      throw Error(ErrorKind::InvalidParameter, "corridor requires 0 < y_min < y_max < 100");
    }
    // phi is decreasing: the effect bounds swap order on the concentration side.
    ybar_min_ = hill_inv(h, y_max);
    ybar_max_ = hill_inv(h, y_min);
  }

  double y_min() const { return y_min_; }
  double y_max() const { return y_max_; }
  double ybar_min() const { return ybar_min_; }
  double ybar_max() const { return ybar_max_; }

 private:
  double y_min_;
  double y_max_;
  double ybar_min_;
  double ybar_max_;
};

struct UltimateBounds {
  double upper = 0.0;  ///< bound on limsup ybar(t)
  double lower = 0.0;  ///< bound on liminf ybar(t)
};

/// Asymptotic ybar envelope for any impulse train with doses in
/// [lambda_low, lambda_star] and periods in [t_star, t_hi].
inline UltimateBounds ultimate_bounds(const LinearPlant& plant, double lambda_star, double lambda_low,
                                      double t_star, double t_hi) {
  if (!(t_star > 0.0) || !(t_hi >= t_star)) {
    throw Error(ErrorKind::InvalidParameter, "periods must satisfy 0 < T_star <= T_hi");
  }
  if (!(lambda_low >= 0.0) || !(lambda_star >= lambda_low)) {
    throw Error(ErrorKind::InvalidParameter, "doses must satisfy 0 <= lambda_low <= lambda_star");
  }
  const double a1 = plant.a()[0];
  const double ratio = plant.transfer_ratio();
  UltimateBounds b;
  b.upper = ratio * lambda_star / -std::expm1(-a1 * t_star);
  b.lower = ratio * lambda_low * std::exp(-a1 * t_hi) / -std::expm1(-a1 * t_hi);
  return b;
}

struct DoseInterval {
  double lo = 0.0;
  double hi = 0.0;

  bool empty() const { return lo > hi; }
  bool contains(double lambda) const { return lo <= lambda && lambda <= hi; }
};

/// Doses any corridor-compatible 1-cycle of period T must lie in.
inline DoseInterval necessary_interval(const LinearPlant& plant, const Corridor& corridor, double period) {
  if (!(period > 0.0)) throw Error(ErrorKind::InvalidParameter, "period must be positive");
  const double a1 = plant.a()[0];
  const double inv_ratio = 1.0 / plant.transfer_ratio();
  return {inv_ratio * corridor.ybar_min() * -std::expm1(-a1 * period),
          inv_ratio * corridor.ybar_max() * std::expm1(a1 * period)};
}

/// Witness dose when the simple sufficient condition holds, otherwise nullopt.
inline std::optional<double> sufficient_simple(const LinearPlant& plant, const Corridor& corridor, double period,
                                               double lambda_max) {
  if (!(period > 0.0) || !(lambda_max > 0.0)) {
    throw Error(ErrorKind::InvalidParameter, "period and lambda_max must be positive");
  }
  const double a1 = plant.a()[0];
  if (!(std::exp(a1 * period) * corridor.ybar_min() < corridor.ybar_max())) return std::nullopt;
  const double witness = corridor.ybar_min() * std::expm1(a1 * period) / plant.transfer_ratio();
  if (!(lambda_max >= witness)) return std::nullopt;
  return witness;
}

struct IffResult {
  bool holds = false;      ///< ybar_min <= lambda xi_T(tau) <= ybar_max on [0, T]
  bool ratio_ok = false;   ///< some dose works for this period
  double lambda_opt = 0.0; ///< smallest admissible dose for this period
  double ratio = 0.0;      ///< max xi_T / min xi_T
  double corridor_ratio = 0.0;
  XiExtrema extrema;
};

/// Relative slack on the concentration corridor; absorbs the rounding of
/// regimens quoted to four decimals.
inline constexpr double kCorridorRelTol = 1e-6;

inline IffResult iff_check(const LinearPlant& plant, const Corridor& corridor, const CycleSpec& spec,
                           double rel_tol = kCorridorRelTol) {
  check_spec(spec);
  IffResult r;
  r.extrema = xi_extrema(plant, spec.period);
  r.ratio = r.extrema.max / r.extrema.min;
  r.corridor_ratio = corridor.ybar_max() / corridor.ybar_min();
  r.ratio_ok = r.ratio <= r.corridor_ratio * (1.0 + rel_tol) / (1.0 - rel_tol);
  r.lambda_opt = corridor.ybar_min() / r.extrema.min;
  r.holds = corridor.ybar_min() * (1.0 - rel_tol) <= spec.lambda * r.extrema.min &&
            spec.lambda * r.extrema.max <= corridor.ybar_max() * (1.0 + rel_tol);
  return r;
}

struct FeasibilityReport {
  CycleSpec spec;
  DoseInterval necessary;
  std::optional<double> sufficient_witness;
  IffResult iff;
};

inline FeasibilityReport assess(const LinearPlant& plant, const Corridor& corridor, const CycleSpec& spec,
                                double lambda_max) {
  FeasibilityReport rep;
  rep.spec = spec;
  rep.necessary = necessary_interval(plant, corridor, spec.period);
  rep.sufficient_witness = sufficient_simple(plant, corridor, spec.period, lambda_max);
  rep.iff = iff_check(plant, corridor, spec);
  return rep;
}

}  // namespace impulse
