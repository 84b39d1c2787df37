#pragma once

/**
 * @file config.hpp
 * @brief JSON run configuration shared by every CLI subcommand.
 *
 * Layout (all sections optional unless a command needs them):
 *
 *   plant      { alpha, v[3], g1 }
 *   hill       { c50, gamma }
 *   modulation { k1, k2, k3, k4, phi_lo, phi_hi, f_lo, f_hi }   -- or --
 *   design     { lambda, period, f_slope, phi_slope, bounds{phi_lo, phi_hi, f_lo, f_hi} }
 *   corridor   { y_min, y_max }
 *   cycle      { lambda, period }          (feasibility target; defaults to design)
 *   feasibility{ lambda_max }
 *   scenario   { x0: "zero" | "fixed_point" | [x1,x2,x3], first_dose, impulses, end_time, dense_dt }
 *   sweep      { parameter, lo, hi, steps, transient_impulses, record_impulses, max_period, tol, coordinate, threads }
 */

#include <json.hpp>

#include <optional>
#include <string>
#include <variant>

#include "impulse/bifurcation.hpp"
#include "impulse/design.hpp"

namespace impulse {

/// Raised for malformed or inconsistent configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CorridorSpec {
  double y_min = 2.0;
  double y_max = 10.0;
};

struct Scenario {
  enum class Start { Zero, FixedPoint, Explicit };
  Start start = Start::Zero;
  Vec3 x0 = Vec3::Zero();
  std::optional<double> first_dose = 450.0;  ///< induction bolus replacing the first modulated dose
  std::optional<std::size_t> impulses = 30;
  std::optional<double> end_time;
  double dense_dt = 0.05;
};

struct RunConfig {
  PlantParams plant;
  HillNonlinearity hill;
  std::optional<ModulationConfig> modulation;
  std::optional<DesignRequest> design;
  std::optional<CorridorSpec> corridor;
  std::optional<CycleSpec> cycle;
  double lambda_max = 500.0;
  std::optional<Scenario> scenario;
  std::optional<SweepConfig> sweep;
};

namespace detail {

using nlohmann::json;

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

inline void require_object(const json& j, const char* section) {
  if (!j.is_object()) throw ConfigError(std::string("section '") + section + "' must be an object");
}

inline void read_bounds(const json& j, double& phi_lo, double& phi_hi, double& f_lo, double& f_hi) {
  read(j, "phi_lo", phi_lo);
  read(j, "phi_hi", phi_hi);
  read(j, "f_lo", f_lo);
  read(j, "f_hi", f_hi);
}

}  // namespace detail

inline RunConfig parse_config(const nlohmann::json& j) {
  using detail::read;
  using detail::require_object;
  if (!j.is_object()) throw ConfigError("config root must be an object");
  RunConfig cfg;

  if (j.contains("plant")) {
    const auto& p = j["plant"];
    require_object(p, "plant");
    read(p, "alpha", cfg.plant.alpha);
    read(p, "v", cfg.plant.v);
    if (p.contains("g1") && !p["g1"].is_null()) {
      double g1 = 0.0;
      read(p, "g1", g1);
      cfg.plant.g1 = g1;
    }
  }
  if (j.contains("hill")) {
    const auto& h = j["hill"];
    require_object(h, "hill");
    double c50 = cfg.hill.c50();
    double gamma = cfg.hill.gamma();
    read(h, "c50", c50);
    read(h, "gamma", gamma);
    cfg.hill = HillNonlinearity(c50, gamma);
  }
  if (j.contains("modulation")) {
    const auto& m = j["modulation"];
    require_object(m, "modulation");
    ModulationConfig mod;
    read(m, "k1", mod.k1);
    read(m, "k2", mod.k2);
    read(m, "k3", mod.k3);
    read(m, "k4", mod.k4);
    detail::read_bounds(m, mod.phi_lo, mod.phi_hi, mod.f_lo, mod.f_hi);
    mod.hill = cfg.hill;
    cfg.modulation = mod;
  }
  if (j.contains("design")) {
    const auto& d = j["design"];
    require_object(d, "design");
    DesignRequest req;
    read(d, "lambda", req.spec.lambda);
    read(d, "period", req.spec.period);
    read(d, "f_slope", req.f_slope);
    read(d, "phi_slope", req.phi_slope);
    if (d.contains("bounds")) {
      require_object(d["bounds"], "design.bounds");
      detail::read_bounds(d["bounds"], req.bounds.phi_lo, req.bounds.phi_hi, req.bounds.f_lo, req.bounds.f_hi);
    }
    req.plant = cfg.plant;
    req.hill = cfg.hill;
    cfg.design = req;
  }
  if (cfg.modulation && cfg.design) {
    throw ConfigError("give either 'modulation' or 'design', not both");
  }
  if (j.contains("corridor")) {
    const auto& c = j["corridor"];
    require_object(c, "corridor");
    CorridorSpec cs;
    read(c, "y_min", cs.y_min);
    read(c, "y_max", cs.y_max);
    cfg.corridor = cs;
  }
  if (j.contains("cycle")) {
    const auto& c = j["cycle"];
    require_object(c, "cycle");
    CycleSpec spec;
    read(c, "lambda", spec.lambda);
    read(c, "period", spec.period);
    cfg.cycle = spec;
  }
  if (j.contains("feasibility")) {
    require_object(j["feasibility"], "feasibility");
    read(j["feasibility"], "lambda_max", cfg.lambda_max);
  }
  if (j.contains("scenario")) {
    const auto& s = j["scenario"];
    require_object(s, "scenario");
    Scenario sc;
    if (s.contains("x0")) {
      const auto& x0 = s["x0"];
      if (x0.is_string()) {
        const auto name = x0.get<std::string>();
        if (name == "zero") {
          sc.start = Scenario::Start::Zero;
        } else if (name == "fixed_point") {
          sc.start = Scenario::Start::FixedPoint;
        } else {
          throw ConfigError("scenario.x0 must be \"zero\", \"fixed_point\" or a 3-vector");
        }
      } else if (x0.is_array() && x0.size() == 3) {
        sc.start = Scenario::Start::Explicit;
        for (int i = 0; i < 3; ++i) {
          if (!x0[i].is_number()) throw ConfigError("scenario.x0 entries must be numbers");
          sc.x0[i] = x0[i].get<double>();
        }
      } else {
        throw ConfigError("scenario.x0 must be \"zero\", \"fixed_point\" or a 3-vector");
      }
    }
    if (s.contains("first_dose")) {
      if (s["first_dose"].is_null()) {
        sc.first_dose.reset();
      } else {
        double d = 0.0;
        read(s, "first_dose", d);
        sc.first_dose = d;
      }
    }
    if (s.contains("impulses")) {
      if (s["impulses"].is_null()) {
        sc.impulses.reset();
      } else {
        std::size_t n = 0;
        read(s, "impulses", n);
        sc.impulses = n;
      }
    }
    if (s.contains("end_time") && !s["end_time"].is_null()) {
      double t = 0.0;
      read(s, "end_time", t);
      sc.end_time = t;
    }
    read(s, "dense_dt", sc.dense_dt);
    cfg.scenario = sc;
  }
  if (j.contains("sweep")) {
    const auto& s = j["sweep"];
    require_object(s, "sweep");
    SweepConfig sw;
    std::string param = "alpha";
    read(s, "parameter", param);
    if (param == "alpha") {
      sw.parameter = SweepParameter::Alpha;
    } else if (param == "gamma") {
      sw.parameter = SweepParameter::Gamma;
      sw.lo = 1.403;
      sw.hi = 5.5619;
    } else {
      throw ConfigError("sweep.parameter must be \"alpha\" or \"gamma\"");
    }
    read(s, "lo", sw.lo);
    read(s, "hi", sw.hi);
    read(s, "steps", sw.steps);
    read(s, "transient_impulses", sw.transient_impulses);
    read(s, "record_impulses", sw.record_impulses);
    read(s, "max_period", sw.max_period);
    read(s, "tol", sw.tol);
    read(s, "coordinate", sw.coordinate);
    read(s, "threads", sw.threads);
    cfg.sweep = sw;
  }
  return cfg;
}

/// The reference configuration: nominal patient, 300 ug every 20 min design.
inline nlohmann::json default_config_json() {
  const DesignRequest d;
  const SweepConfig sw;
  return {
      {"plant", {{"alpha", kNominalAlpha}, {"v", {1.0, 4.0, 10.0}}, {"g1", nullptr}}},
      {"hill", {{"c50", kNominalC50}, {"gamma", kNominalGamma}}},
      {"design",
       {{"lambda", d.spec.lambda},
        {"period", d.spec.period},
        {"f_slope", d.f_slope},
        {"phi_slope", d.phi_slope},
        {"bounds",
         {{"phi_lo", d.bounds.phi_lo}, {"phi_hi", d.bounds.phi_hi}, {"f_lo", d.bounds.f_lo}, {"f_hi", d.bounds.f_hi}}}}},
      {"corridor", {{"y_min", 2.0}, {"y_max", 10.0}}},
      {"feasibility", {{"lambda_max", 500.0}}},
      {"scenario", {{"x0", "zero"}, {"first_dose", 450.0}, {"impulses", 30}, {"end_time", nullptr}, {"dense_dt", 0.05}}},
      {"sweep",
       {{"parameter", "alpha"},
        {"lo", sw.lo},
        {"hi", sw.hi},
        {"steps", sw.steps},
        {"transient_impulses", sw.transient_impulses},
        {"record_impulses", sw.record_impulses},
        {"max_period", sw.max_period},
        {"tol", sw.tol},
        {"coordinate", sw.coordinate},
        {"threads", sw.threads}}},
  };
}

}  // namespace impulse
