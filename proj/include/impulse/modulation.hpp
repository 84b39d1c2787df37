#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "impulse/model.hpp"

namespace impulse {

/// Which side of the saturation the affine segment hit, if any.
enum class Clamp { None, Low, High };

struct Clamped {
  double value;
  Clamp clamp;
};

/**
 * @brief Saturated piecewise-affine modulation composed with the Hill map:
 *
 *   T = clamp(k2 phi(ybar) + k1, phi_lo, phi_hi)
 *   lambda = clamp(k4 phi(ybar) + k3, f_lo, f_hi)
 */
struct ModulationConfig {
  double k1 = 0.0;
  double k2 = 0.0;
  double k3 = 0.0;
  double k4 = 0.0;
  double phi_lo = 10.0;
  double phi_hi = 40.0;
  double f_lo = 50.0;
  double f_hi = 500.0;
  HillNonlinearity hill{};

  /// Same gains, different plant-side Hill slope.
  ModulationConfig with_gamma(double gamma) const {
    ModulationConfig copy = *this;
    copy.hill = hill.with_gamma(gamma);
    return copy;
  }
};

namespace detail {
inline Clamped saturate(double v, double lo, double hi) {
  if (v < lo) return {lo, Clamp::Low};
  if (v > hi) return {hi, Clamp::High};
  return {v, Clamp::None};
}
}  // namespace detail

inline Clamped eval_period_detail(const ModulationConfig& cfg, double ybar) {
  return detail::saturate(cfg.k2 * hill(cfg.hill, ybar) + cfg.k1, cfg.phi_lo, cfg.phi_hi);
}

inline Clamped eval_dose_detail(const ModulationConfig& cfg, double ybar) {
  return detail::saturate(cfg.k4 * hill(cfg.hill, ybar) + cfg.k3, cfg.f_lo, cfg.f_hi);
}

inline double eval_period(const ModulationConfig& cfg, double ybar) {
  return eval_period_detail(cfg, ybar).value;
}

inline double eval_dose(const ModulationConfig& cfg, double ybar) {
  return eval_dose_detail(cfg, ybar).value;
}

struct ValidationReport {
  std::vector<std::string> violations;
  std::vector<std::string> warnings;

  bool ok() const { return violations.empty(); }
};

/// Structural checks on the modulation; never throws.
inline ValidationReport validate(const ModulationConfig& cfg) {
  ValidationReport report;
  auto& v = report.violations;
  if (!(cfg.phi_lo > 0.0)) v.emplace_back("period lower bound must be positive");
  if (!(cfg.phi_lo <= cfg.phi_hi)) v.emplace_back("period bounds inverted");
  if (!(cfg.f_lo > 0.0)) v.emplace_back("dose lower bound must be positive");
  if (!(cfg.f_lo <= cfg.f_hi)) v.emplace_back("dose bounds inverted");
  // phi is decreasing in ybar, so the signs of k2/k4 fix the monotonicity.
  if (!(cfg.k2 <= 0.0)) v.emplace_back("period must be non-decreasing in ybar");
  if (!(cfg.k4 >= 0.0)) v.emplace_back("dose must be non-increasing in ybar");
  for (double k : {cfg.k1, cfg.k2, cfg.k3, cfg.k4}) {
    if (!std::isfinite(k)) {
      v.emplace_back("modulation coefficients must be finite");
      break;
    }
  }
  // Over ybar in (0, inf) phi sweeps (0, 100); warn when the affine segment
  // never leaves the clamp, i.e. the controller is constant.
  if (report.ok()) {
    const double t_hi = cfg.k1;               // phi -> 0
    const double t_lo = cfg.k2 * 100.0 + cfg.k1;  // phi -> 100
    if (t_hi < cfg.phi_lo || t_lo > cfg.phi_hi) {
      report.warnings.emplace_back("period modulation saturated over the whole range");
    }
    const double f_hi = cfg.k4 * 100.0 + cfg.k3;
    const double f_lo = cfg.k3;
    if (f_hi < cfg.f_lo || f_lo > cfg.f_hi) {
      report.warnings.emplace_back("dose modulation saturated over the whole range");
    }
  }
  return report;
}

/// Warnings for an operating point sitting in a clamped region.
inline std::vector<std::string> operating_point_warnings(const ModulationConfig& cfg, double ybar0) {
  std::vector<std::string> out;
  if (eval_dose_detail(cfg, ybar0).clamp != Clamp::None) {
    out.emplace_back("dose modulation is saturated at the operating point");
  }
  if (eval_period_detail(cfg, ybar0).clamp != Clamp::None) {
    out.emplace_back("period modulation is saturated at the operating point");
  }
  return out;
}

}  // namespace impulse
