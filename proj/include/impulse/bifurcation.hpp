#pragma once

/**
 * @file bifurcation.hpp
 * @brief Parameter sweeps of the closed loop with the controller frozen at
 * its nominal design: steady-state period detection per parameter value.
 */

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "impulse/cycle.hpp"
#include "impulse/sim.hpp"

namespace impulse {

enum class SweepParameter { Alpha, Gamma };

inline std::string_view to_string(SweepParameter p) { return p == SweepParameter::Alpha ? "alpha" : "gamma"; }

struct SweepConfig {
  SweepParameter parameter = SweepParameter::Alpha;
  double lo = 0.0274;
  double hi = 0.04824;
  std::size_t steps = 101;  ///< 1 evaluates lo only
  std::size_t transient_impulses = 500;
  std::size_t record_impulses = 128;
  std::size_t max_period = 32;
  double tol = 1e-6;
  int coordinate = 0;  ///< state component charted in the diagram
  std::optional<Vec3> initial_state;
  unsigned threads = 1;  ///< 0 picks hardware concurrency
};

inline void check_sweep(const SweepConfig& cfg) {
  if (cfg.steps < 1) throw Error(ErrorKind::InvalidParameter, "sweep needs at least one step");
  if (cfg.steps >= 2 && !(cfg.lo < cfg.hi)) throw Error(ErrorKind::InvalidParameter, "sweep range needs lo < hi");
  if (cfg.max_period < 1 || 2 * cfg.max_period > cfg.record_impulses) {
    throw Error(ErrorKind::InvalidParameter, "max_period must lie in [1, record_impulses / 2]");
  }
  if (!(cfg.tol > 0.0)) throw Error(ErrorKind::InvalidParameter, "tolerance must be positive");
  if (cfg.coordinate < 0 || cfg.coordinate > 2) throw Error(ErrorKind::InvalidParameter, "coordinate must be 0, 1 or 2");
}

/// Smallest p <= max_period with ||X_{n+p} - X_n|| <= tol (1 + ||X_n||) for every recorded n.
inline std::optional<std::size_t> detect_period(std::span<const Vec3> samples, std::size_t max_period, double tol) {
  if (max_period == 0 || samples.size() < 2 * max_period) return std::nullopt;
  for (std::size_t p = 1; p <= max_period; ++p) {
    bool ok = true;
    for (std::size_t n = 0; n + p < samples.size() && ok; ++n) {
      ok = (samples[n + p] - samples[n]).norm() <= tol * (1.0 + samples[n].norm());
    }
    if (ok) return p;
  }
  return std::nullopt;
}

struct PeriodicPoint {
  Vec3 state;  ///< pre-jump state at firing
  double lambda = 0.0;
  double period = 0.0;
  Clamp dose_clamp = Clamp::None;
  Clamp period_clamp = Clamp::None;
};

struct BifurcationRow {
  double value = 0.0;
  std::optional<std::size_t> period;  ///< nullopt: aperiodic within max_period
  std::vector<PeriodicPoint> points;  ///< p points, or every recorded impulse if aperiodic
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double period_min = 0.0;
  double period_max = 0.0;
};

struct BifurcationDiagram {
  SweepParameter parameter = SweepParameter::Alpha;
  int coordinate = 0;
  std::vector<BifurcationRow> rows;
};

struct SaturationFlags {
  bool dose_low = false;
  bool dose_high = false;
  bool period_low = false;
  bool period_high = false;

  bool any() const { return dose_low || dose_high || period_low || period_high; }
};

/// Whether any periodic point fired with an engaged clamp (border regimes).
inline SaturationFlags classify_saturation(const BifurcationRow& row) {
  SaturationFlags f;
  for (const auto& p : row.points) {
    f.dose_low |= p.dose_clamp == Clamp::Low;
    f.dose_high |= p.dose_clamp == Clamp::High;
    f.period_low |= p.period_clamp == Clamp::Low;
    f.period_high |= p.period_clamp == Clamp::High;
  }
  return f;
}

inline SaturationFlags classify_saturation(const PeriodicPoint& p) {
  BifurcationRow row;
  row.points.push_back(p);
  return classify_saturation(row);
}

namespace detail {

inline BifurcationRow sweep_row(const PlantParams& plant_template, const ModulationConfig& modulation,
                                const SweepConfig& cfg, double value) {
  PlantParams pp = plant_template;
  ModulationConfig mod = modulation;
  if (cfg.parameter == SweepParameter::Alpha) {
    pp.alpha = value;
    // A split given as an explicit g1 is tied to the nominal alpha; rescale it.
    if (pp.g1) pp.g1 = *pp.g1 * value / plant_template.alpha;
  } else {
    mod = modulation.with_gamma(value);
  }
  const LinearPlant plant = build_plant(pp);

  Vec3 x = cfg.initial_state.value_or(
      fixed_point(plant, CycleSpec{std::clamp(mod.k3, mod.f_lo, mod.f_hi), std::clamp(mod.k1, mod.phi_lo, mod.phi_hi)})
          .pre_jump);
  for (std::size_t i = 0; i < cfg.transient_impulses; ++i) x = step(plant, mod, x).next;

  std::vector<Vec3> states;
  std::vector<PeriodicPoint> recorded;
  states.reserve(cfg.record_impulses);
  recorded.reserve(cfg.record_impulses);
  for (std::size_t i = 0; i < cfg.record_impulses; ++i) {
    const StepResult s = step(plant, mod, x);
    states.push_back(x);
    recorded.push_back({x, s.lambda, s.period, s.dose_clamp, s.period_clamp});
    x = s.next;
  }

  BifurcationRow row;
  row.value = value;
  row.period = detect_period(states, cfg.max_period, cfg.tol);
  const std::size_t keep = row.period ? *row.period : recorded.size();
  row.points.assign(recorded.begin(), recorded.begin() + static_cast<std::ptrdiff_t>(keep));
  auto [lmin, lmax] = std::minmax_element(recorded.begin(), recorded.end(),
                                          [](const auto& a, const auto& b) { return a.lambda < b.lambda; });
  auto [tmin, tmax] = std::minmax_element(recorded.begin(), recorded.end(),
                                          [](const auto& a, const auto& b) { return a.period < b.period; });
  row.lambda_min = lmin->lambda;
  row.lambda_max = lmax->lambda;
  row.period_min = tmin->period;
  row.period_max = tmax->period;
  return row;
}

}  // namespace detail

inline std::vector<double> sweep_values(const SweepConfig& cfg) {
  std::vector<double> out;
  for (std::size_t i = 0; i < cfg.steps; ++i) {
    out.push_back(cfg.steps == 1 ? cfg.lo
                                 : cfg.lo + (cfg.hi - cfg.lo) * static_cast<double>(i) / static_cast<double>(cfg.steps - 1));
  }
  return out;
}

/// Rows are independent; they may run on several threads but come back in
/// parameter order.
inline BifurcationDiagram sweep(const PlantParams& plant_template, const ModulationConfig& modulation,
                                const SweepConfig& cfg) {
  check_sweep(cfg);
  const std::vector<double> values = sweep_values(cfg);
  BifurcationDiagram diagram;
  diagram.parameter = cfg.parameter;
  diagram.coordinate = cfg.coordinate;
  diagram.rows.resize(values.size());

  unsigned workers = cfg.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : cfg.threads;
  workers = std::min<unsigned>(workers, static_cast<unsigned>(values.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      diagram.rows[i] = detail::sweep_row(plant_template, modulation, cfg, values[i]);
    }
    return diagram;
  }

  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < values.size(); i = next++) {
          diagram.rows[i] = detail::sweep_row(plant_template, modulation, cfg, values[i]);
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return diagram;
}

}  // namespace impulse
