#pragma once

/**
 * @file design.hpp
 * @brief Synthesis of the piecewise-affine modulation that renders a
 * prescribed 1-cycle (lambda, T) with prescribed slopes F'(ybar0), Phi'(ybar0).
 */

#include <string>
#include <vector>

#include "impulse/feasibility.hpp"
#include "impulse/sim.hpp"

namespace impulse {

struct ModulationBounds {
  double phi_lo = 10.0;
  double phi_hi = 40.0;
  double f_lo = 50.0;
  double f_hi = 500.0;
};

struct DesignRequest {
  CycleSpec spec{300.0, 20.0};
  double f_slope = -0.15;   ///< desired F'(ybar0), ug per ug/ml
  double phi_slope = 0.29;  ///< desired Phi'(ybar0), min per ug/ml
  ModulationBounds bounds{};
  PlantParams plant{};
  HillNonlinearity hill{};
};

struct DesignResult {
  ModulationConfig modulation;
  CycleSolution cycle;
  LinearPlant plant;
  std::vector<std::string> warnings;
};

inline DesignResult synthesize(const DesignRequest& req) {
  check_spec(req.spec);
  if (!(req.f_slope <= 0.0)) throw Error(ErrorKind::InvalidParameter, "dose slope must be <= 0");
  if (!(req.phi_slope >= 0.0)) throw Error(ErrorKind::InvalidParameter, "period slope must be >= 0");

  const LinearPlant plant = build_plant(req.plant);
  CycleSolution cycle = solve_cycle(plant, req.hill, req.spec, req.f_slope, req.phi_slope);
  const double ybar0 = cycle.states.ybar0;
  if (!(ybar0 > 0.0)) throw Error(ErrorKind::InvalidParameter, "operating point needs a positive output");

  const double dphi = hill_deriv(req.hill, ybar0);
  if (dphi == 0.0 || !std::isfinite(dphi)) {
    throw Error(ErrorKind::DegenerateSlope, "Hill slope vanishes at the operating point");
  }
  const double phi0 = hill(req.hill, ybar0);

  ModulationConfig mod;
  mod.hill = req.hill;
  mod.k4 = req.f_slope / dphi;
  mod.k2 = req.phi_slope / dphi;
  mod.k3 = req.spec.lambda - mod.k4 * phi0;
  mod.k1 = req.spec.period - mod.k2 * phi0;
  mod.phi_lo = req.bounds.phi_lo;
  mod.phi_hi = req.bounds.phi_hi;
  mod.f_lo = req.bounds.f_lo;
  mod.f_hi = req.bounds.f_hi;

  DesignResult result{mod, std::move(cycle), plant, {}};
  const ValidationReport v = validate(mod);
  for (const auto& s : v.violations) result.warnings.push_back(s);
  for (const auto& s : v.warnings) result.warnings.push_back(s);
  for (auto& s : operating_point_warnings(mod, ybar0)) result.warnings.push_back(std::move(s));
  if (!result.cycle.schur.stable) {
    result.warnings.push_back("Jacobian is not Schur stable: the 1-cycle is not locally attractive");
  }
  return result;
}

struct DesignVerification {
  IffResult iff;
  double residual = 0.0;  ///< ||Q(X) - X|| for the synthesized closed loop
  double closed_loop_lambda = 0.0;
  double closed_loop_period = 0.0;
  bool fixed_point_ok = false;
  bool compliant = false;
  bool overdosing = false;   ///< effect drops below y_min somewhere in the cycle
  bool underdosing = false;  ///< effect rises above y_max somewhere in the cycle
  bool near_lower_edge = false;
  std::vector<std::string> notes;
};

inline DesignVerification verify_design(const DesignResult& result, const Corridor& corridor) {
  DesignVerification out;
  const CycleSpec& spec = result.cycle.spec;
  out.iff = iff_check(result.plant, corridor, spec);

  const Vec3& x = result.cycle.states.pre_jump;
  const StepResult s = step(result.plant, result.modulation, x);
  out.residual = (s.next - x).norm();
  out.closed_loop_lambda = s.lambda;
  out.closed_loop_period = s.period;
  out.fixed_point_ok = out.residual <= 1e-9 * (1.0 + x.norm());

  const OutputRange& r = result.cycle.range;
  out.compliant = out.iff.holds;
  out.overdosing = r.y_min < corridor.y_min();
  out.underdosing = r.y_max > corridor.y_max();
  // Highest effect within 25% of the corridor width above y_min.
  const double width = corridor.y_max() - corridor.y_min();
  out.near_lower_edge = r.y_max <= corridor.y_min() + 0.25 * width;

  if (!out.fixed_point_ok) out.notes.emplace_back("closed loop does not reproduce the design fixed point");
  if (out.overdosing) out.notes.emplace_back("effect falls below the corridor: overdosing pattern");
  if (out.underdosing) out.notes.emplace_back("effect rises above the corridor: underdosing pattern");
  if (out.near_lower_edge) out.notes.emplace_back("highest effect sits near the lower corridor edge");
  return out;
}

struct SlopeBox {
  double f_slope_min = -1.0;
  double f_slope_max = 0.0;
  double phi_slope_min = 0.0;
  double phi_slope_max = 1.0;
  int steps = 21;
};

struct SlopeChoice {
  double f_slope = 0.0;
  double phi_slope = 0.0;
  double spectral_radius = 0.0;
};

/// Convenience beyond the synthesis procedure itself: grid search over a
/// slope box for the smallest Jacobian spectral radius.
inline SlopeChoice tune_slopes(const LinearPlant& plant, const CycleSpec& spec, const SlopeBox& box) {
  if (box.steps < 2) throw Error(ErrorKind::InvalidParameter, "slope grid needs at least 2 steps");
  SlopeChoice best{0.0, 0.0, std::numeric_limits<double>::infinity()};
  for (int i = 0; i < box.steps; ++i) {
    const double fs = box.f_slope_min + (box.f_slope_max - box.f_slope_min) * i / (box.steps - 1);
    for (int j = 0; j < box.steps; ++j) {
      const double ps = box.phi_slope_min + (box.phi_slope_max - box.phi_slope_min) * j / (box.steps - 1);
      const double rho = is_schur(jacobian(plant, spec, fs, ps)).spectral_radius;
      if (rho < best.spectral_radius) best = {fs, ps, rho};
    }
  }
  return best;
}

}  // namespace impulse
