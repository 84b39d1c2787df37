#pragma once

/**
 * @file sim.hpp
 * @brief Event-exact simulation of the closed loop. Between impulses the
 * linear flow is advanced with the closed-form exponential, so neither event
 * states nor dense samples carry integration error.
 */

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "impulse/modulation.hpp"

namespace impulse {

struct StepResult {
  double lambda = 0.0;
  double period = 0.0;
  Vec3 next;  ///< pre-jump state at the next firing
  Clamp dose_clamp = Clamp::None;
  Clamp period_clamp = Clamp::None;
};

/// One firing: dose and period from the output at t_n, then flow for T_n.
inline StepResult step(const LinearPlant& plant, const ModulationConfig& mod, const Vec3& state) {
  const double ybar = LinearPlant::output(state);
  const Clamped dose = eval_dose_detail(mod, ybar);
  const Clamped period = eval_period_detail(mod, ybar);
  StepResult r;
  r.lambda = dose.value;
  r.period = period.value;
  r.dose_clamp = dose.clamp;
  r.period_clamp = period.clamp;
  r.next = mat_exp(plant, r.period) * (state + r.lambda * LinearPlant::B());
  return r;
}

struct Event {
  std::size_t n = 0;
  double t = 0.0;
  double lambda = 0.0;
  double period = 0.0;
  Vec3 pre;
  Vec3 post;
};

struct Sample {
  double t = 0.0;
  Vec3 x;
  double ybar = 0.0;
  double y = 0.0;
};

struct SimTrace {
  std::vector<Event> events;
  std::vector<Sample> dense;
  Vec3 final_state = Vec3::Zero();  ///< pre-jump state after the last event
  double end_time = 0.0;
  std::string meta;
};

/// Stop after `impulses` firings, or once the firing time reaches `end_time`,
/// whichever comes first. At least one must be set.
struct Horizon {
  std::optional<std::size_t> impulses;
  std::optional<double> end_time;
};

struct SimOptions {
  double dense_dt = 0.05;
  bool dense = true;
  /// Overrides the controller's dose at the first firing (induction bolus).
  std::optional<double> first_dose;
};

inline SimTrace simulate(const LinearPlant& plant, const ModulationConfig& mod, const Vec3& x0,
                         const Horizon& horizon, const SimOptions& opts = {}) {
  if ((x0.array() < 0.0).any()) throw Error(ErrorKind::InvalidParameter, "initial state must be nonnegative");
  if (!(opts.dense_dt > 0.0)) throw Error(ErrorKind::InvalidParameter, "dense_dt must be positive");
  if (!horizon.impulses && !horizon.end_time) {
    throw Error(ErrorKind::InvalidParameter, "horizon needs an impulse count or an end time");
  }
  if ((horizon.impulses && *horizon.impulses == 0) || (horizon.end_time && !(*horizon.end_time > 0.0))) {
    throw Error(ErrorKind::InvalidParameter, "horizon must be positive");
  }

  SimTrace trace;
  Vec3 state = x0;
  double t = 0.0;
  for (std::size_t n = 0;; ++n) {
    if (horizon.impulses && n >= *horizon.impulses) break;
    if (horizon.end_time && t >= *horizon.end_time) break;
    StepResult s = step(plant, mod, state);
    if (n == 0 && opts.first_dose) {
      s.lambda = *opts.first_dose;
      s.next = mat_exp(plant, s.period) * (state + s.lambda * LinearPlant::B());
    }
    Event ev;
    ev.n = n;
    ev.t = t;
    ev.lambda = s.lambda;
    ev.period = s.period;
    ev.pre = state;
    ev.post = state + s.lambda * LinearPlant::B();
    trace.events.push_back(ev);
    state = s.next;
    t += s.period;
  }
  trace.final_state = state;
  trace.end_time = horizon.end_time ? std::min(t, *horizon.end_time) : t;

  if (opts.dense) {
    const HillNonlinearity& h = mod.hill;
    auto push = [&](double ts, const Vec3& x) {
      Sample smp;
      smp.t = ts;
      smp.x = x;
      smp.ybar = LinearPlant::output(x);
      smp.y = hill(h, std::max(0.0, smp.ybar));
      trace.dense.push_back(smp);
    };
    std::size_t k = 0;
    for (std::size_t i = 0; i < trace.events.size(); ++i) {
      const Event& ev = trace.events[i];
      const double t_next = ev.t + ev.period;
      const bool last = i + 1 == trace.events.size();
      for (;; ++k) {
        const double ts = static_cast<double>(k) * opts.dense_dt;
        if (ts > trace.end_time) break;
        if (ts > t_next || (!last && ts == t_next)) break;
        push(ts, mat_exp(plant, ts - ev.t) * ev.post);
      }
    }
  }
  return trace;
}

struct Convergence {
  std::size_t n_settle = 0;
  double lambda = 0.0;
  double period = 0.0;
};

/// First event index after which consecutive events agree to `tol`
/// (relative to 1 + magnitude) in dose, period and pre-jump state.
inline std::optional<Convergence> detect_convergence(const SimTrace& trace, double tol) {
  const auto& ev = trace.events;
  if (ev.size() < 10) return std::nullopt;
  auto close = [tol](const Event& a, const Event& b) {
    return std::abs(b.lambda - a.lambda) <= tol * (1.0 + std::abs(a.lambda)) &&
           std::abs(b.period - a.period) <= tol * (1.0 + std::abs(a.period)) &&
           (b.pre - a.pre).norm() <= tol * (1.0 + a.pre.norm());
  };
  std::size_t settle = ev.size() - 1;
  while (settle > 0 && close(ev[settle - 1], ev[settle])) --settle;
  if (settle == ev.size() - 1) return std::nullopt;
  return Convergence{settle, ev.back().lambda, ev.back().period};
}

}  // namespace impulse
