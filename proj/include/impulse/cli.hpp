#pragma once

/**
 * @file cli.hpp
 * @brief Subcommands behind the `impulse-dose` executable.
 *
 * Each command fully validates its configuration and computes all outputs
 * before the first file is written.
 */

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "impulse/config.hpp"
#include "impulse/report.hpp"

namespace impulse::cli {

enum ExitCode : int { kOk = 0, kNegative = 1, kInvalidConfig = 2, kIoFailure = 3 };

struct Options {
  std::filesystem::path out_dir = ".";
  bool svg = false;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using OutputFiles = std::vector<std::pair<std::string, std::string>>;

namespace detail {

using nlohmann::json;

inline void write_files(const std::filesystem::path& dir, const OutputFiles& files) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  for (const auto& [name, content] : files) {
    const auto path = dir / name;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    f << content;
    if (!f.flush()) throw IoError("write failed for " + path.string());
  }
}

inline json vec_json(const Vec3& v) { return json::array({v[0], v[1], v[2]}); }

inline json eigen_json(const std::vector<std::complex<double>>& evs) {
  json arr = json::array();
  for (const auto& e : evs) arr.push_back({{"re", e.real()}, {"im", e.imag()}, {"abs", std::abs(e)}});
  return arr;
}

inline json modulation_json(const ModulationConfig& m) {
  return {{"k1", m.k1},         {"k2", m.k2},         {"k3", m.k3},     {"k4", m.k4},
          {"phi_lo", m.phi_lo}, {"phi_hi", m.phi_hi}, {"f_lo", m.f_lo}, {"f_hi", m.f_hi}};
}

inline json range_json(const OutputRange& r) {
  return {{"ybar_min", r.ybar_min}, {"ybar_max", r.ybar_max}, {"y_min", r.y_min},
          {"y_max", r.y_max},       {"tau_ybar_min", r.tau_ybar_min}, {"tau_ybar_max", r.tau_ybar_max}};
}

inline json iff_json(const IffResult& r) {
  return {{"iff_holds", r.holds},   {"ratio_ok", r.ratio_ok}, {"lambda_opt", r.lambda_opt},
          {"ratio", r.ratio},       {"corridor_ratio", r.corridor_ratio},
          {"xi_min", r.extrema.min}, {"xi_argmin", r.extrema.argmin},
          {"xi_max", r.extrema.max}, {"xi_argmax", r.extrema.argmax}};
}

inline Corridor make_corridor(const RunConfig& cfg) {
  if (!cfg.corridor) throw ConfigError("this command needs a 'corridor' section");
  return Corridor(cfg.corridor->y_min, cfg.corridor->y_max, cfg.hill);
}

struct Controller {
  ModulationConfig modulation;
  std::optional<DesignResult> design;
};

inline Controller resolve_controller(const RunConfig& cfg) {
  if (cfg.modulation) {
    const ValidationReport v = validate(*cfg.modulation);
    if (!v.ok()) throw ConfigError("invalid modulation: " + v.violations.front());
    return {*cfg.modulation, std::nullopt};
  }
  if (cfg.design) {
    DesignResult d = synthesize(*cfg.design);
    const ValidationReport v = validate(d.modulation);
    if (!v.ok()) throw ConfigError("synthesized modulation invalid: " + v.violations.front());
    return {d.modulation, std::move(d)};
  }
  throw ConfigError("this command needs a 'modulation' or a 'design' section");
}

}  // namespace detail

inline std::pair<int, OutputFiles> cmd_design(const RunConfig& cfg, std::ostream& out) {
  using detail::json;
  if (!cfg.design) throw ConfigError("design needs a 'design' section");
  const DesignResult d = synthesize(*cfg.design);
  const ValidationReport v = validate(d.modulation);
  if (!v.ok()) throw ConfigError("synthesized modulation invalid: " + v.violations.front());

  json report{
      {"command", "design"},
      {"cycle", {{"lambda", d.cycle.spec.lambda}, {"period", d.cycle.spec.period}}},
      {"slopes", {{"f_slope", cfg.design->f_slope}, {"phi_slope", cfg.design->phi_slope}}},
      {"hill_slope_at_ybar0", hill_deriv(cfg.design->hill, d.cycle.states.ybar0)},
      {"modulation", detail::modulation_json(d.modulation)},
      {"fixed_point", {{"pre_jump", detail::vec_json(d.cycle.states.pre_jump)},
                       {"post_jump", detail::vec_json(d.cycle.states.post_jump)},
                       {"ybar0", d.cycle.states.ybar0}}},
      {"output_range", detail::range_json(d.cycle.range)},
      {"eigenvalues", detail::eigen_json(d.cycle.eigenvalues)},
      {"spectral_radius", d.cycle.schur.spectral_radius},
      {"schur_stable", d.cycle.schur.stable},
      {"warnings", d.warnings},
  };
  if (cfg.corridor) {
    const Corridor corridor = detail::make_corridor(cfg);
    const DesignVerification ver = verify_design(d, corridor);
    report["corridor_check"] = {{"y_min", corridor.y_min()},
                                {"y_max", corridor.y_max()},
                                {"compliant", ver.compliant},
                                {"overdosing", ver.overdosing},
                                {"underdosing", ver.underdosing},
                                {"near_lower_edge", ver.near_lower_edge},
                                {"closed_loop_residual", ver.residual},
                                {"fixed_point_ok", ver.fixed_point_ok},
                                {"iff", detail::iff_json(ver.iff)},
                                {"notes", ver.notes}};
  }

  out << "k1=" << fmt_num(d.modulation.k1) << " k2=" << fmt_num(d.modulation.k2) << " k3=" << fmt_num(d.modulation.k3)
      << " k4=" << fmt_num(d.modulation.k4) << '\n';
  out << "X=(" << fmt_num(d.cycle.states.pre_jump[0]) << ", " << fmt_num(d.cycle.states.pre_jump[1]) << ", "
      << fmt_num(d.cycle.states.pre_jump[2]) << ") spectral_radius=" << fmt_num(d.cycle.schur.spectral_radius)
      << (d.cycle.schur.stable ? " stable" : " UNSTABLE") << '\n';
  for (const auto& w : d.warnings) out << "warning: " << w << '\n';
  return {kOk, {{"design.json", report.dump(2) + "\n"}}};
}

inline std::pair<int, OutputFiles> cmd_feasibility(const RunConfig& cfg, std::ostream& out) {
  using detail::json;
  const Corridor corridor = detail::make_corridor(cfg);
  std::optional<CycleSpec> spec = cfg.cycle;
  if (!spec && cfg.design) spec = cfg.design->spec;
  if (!spec) throw ConfigError("feasibility needs a 'cycle' or 'design' section");
  check_spec(*spec);
  if (!(cfg.lambda_max > 0.0)) throw ConfigError("feasibility.lambda_max must be positive");
  const LinearPlant plant = build_plant(cfg.plant);
  const FeasibilityReport rep = assess(plant, corridor, *spec, cfg.lambda_max);

  json report{
      {"command", "feasibility"},
      {"cycle", {{"lambda", spec->lambda}, {"period", spec->period}}},
      {"corridor", {{"y_min", corridor.y_min()}, {"y_max", corridor.y_max()},
                    {"ybar_min", corridor.ybar_min()}, {"ybar_max", corridor.ybar_max()}}},
      {"necessary_interval", {{"lo", rep.necessary.lo}, {"hi", rep.necessary.hi},
                              {"contains_lambda", rep.necessary.contains(spec->lambda)}}},
      {"sufficient_simple", rep.sufficient_witness ? json(*rep.sufficient_witness) : json(nullptr)},
      {"lambda_max", cfg.lambda_max},
  };
  report.update(detail::iff_json(rep.iff));

  out << "necessary interval: [" << fmt_num(rep.necessary.lo) << ", " << fmt_num(rep.necessary.hi) << "]\n";
  out << "lambda_opt=" << fmt_num(rep.iff.lambda_opt) << " ratio=" << fmt_num(rep.iff.ratio)
      << " corridor_ratio=" << fmt_num(rep.iff.corridor_ratio) << '\n';
  out << (rep.iff.holds ? "feasible" : "infeasible") << '\n';
  return {rep.iff.holds ? kOk : kNegative, {{"feasibility.json", report.dump(2) + "\n"}}};
}

inline std::pair<int, OutputFiles> cmd_simulate(const RunConfig& cfg, std::ostream& out, bool svg) {
  if (!cfg.scenario) throw ConfigError("simulate needs a 'scenario' section");
  const Scenario& sc = *cfg.scenario;
  if (!(sc.dense_dt > 0.0)) throw ConfigError("scenario.dense_dt must be positive");
  const auto ctl = detail::resolve_controller(cfg);
  const LinearPlant plant = build_plant(cfg.plant);

  Vec3 x0 = Vec3::Zero();
  switch (sc.start) {
    case Scenario::Start::Zero: break;
    case Scenario::Start::Explicit: x0 = sc.x0; break;
    case Scenario::Start::FixedPoint: {
      if (ctl.design) {
        x0 = ctl.design->cycle.states.pre_jump;
      } else if (cfg.cycle) {
        x0 = fixed_point(plant, *cfg.cycle).pre_jump;
      } else {
        throw ConfigError("x0 = \"fixed_point\" needs a 'design' or 'cycle' section");
      }
      break;
    }
  }
  if ((x0.array() < 0.0).any()) throw ConfigError("scenario.x0 must be nonnegative");

  SimTrace trace;
  const bool empty = (sc.impulses && *sc.impulses == 0) || (sc.end_time && !(*sc.end_time > 0.0)) ||
                     (!sc.impulses && !sc.end_time);
  if (!empty) {
    SimOptions opts;
    opts.dense_dt = sc.dense_dt;
    opts.first_dose = sc.first_dose;
    trace = simulate(plant, ctl.modulation, x0, Horizon{sc.impulses, sc.end_time}, opts);
  }

  std::ostringstream events;
  std::ostringstream dense;
  write_events_csv(events, trace);
  write_dense_csv(dense, trace);
  OutputFiles files{{"events.csv", events.str()}, {"dense.csv", dense.str()}};
  if (svg) {
    std::ostringstream s;
    write_trace_svg(s, trace);
    files.emplace_back("trace.svg", s.str());
  }
  out << trace.events.size() << " events, " << trace.dense.size() << " samples, end t=" << fmt_num(trace.end_time)
      << '\n';
  return {kOk, std::move(files)};
}

inline std::pair<int, OutputFiles> cmd_bifurcate(const RunConfig& cfg, std::ostream& out) {
  if (!cfg.sweep) throw ConfigError("bifurcate needs a 'sweep' section");
  check_sweep(*cfg.sweep);
  const auto ctl = detail::resolve_controller(cfg);
  const BifurcationDiagram diagram = sweep(cfg.plant, ctl.modulation, *cfg.sweep);
  std::ostringstream csv;
  write_bifurcation_csv(csv, diagram);
  std::size_t periodic = 0;
  for (const auto& r : diagram.rows) periodic += r.period.has_value();
  out << diagram.rows.size() << " parameter values, " << periodic << " periodic\n";
  return {kOk, {{"bifurcation.csv", csv.str()}}};
}

/// Parses, dispatches, writes. Errors become a one-line JSON record on `err`.
inline int run(const std::string& command, const nlohmann::json& config, const Options& opts, std::ostream& out,
               std::ostream& err) {
  auto error_record = [&err](std::string_view kind, const std::string& msg) {
    err << nlohmann::json{{"error", kind}, {"message", msg}}.dump() << '\n';
  };
  std::pair<int, OutputFiles> result;
  try {
    const RunConfig cfg = parse_config(config);
    if (command == "design") {
      result = cmd_design(cfg, out);
    } else if (command == "feasibility") {
      result = cmd_feasibility(cfg, out);
    } else if (command == "simulate") {
      result = cmd_simulate(cfg, out, opts.svg);
    } else if (command == "bifurcate") {
      result = cmd_bifurcate(cfg, out);
    } else {
      error_record("InvalidCommand", "unknown command '" + command + "'");
      return kInvalidConfig;
    }
  } catch (const ConfigError& e) {
    error_record("InvalidConfig", e.what());
    return kInvalidConfig;
  } catch (const Error& e) {
    error_record(to_string(e.kind()), e.what());
    return kInvalidConfig;
  } catch (const nlohmann::json::exception& e) {
    error_record("InvalidConfig", e.what());
    return kInvalidConfig;
  }
  try {
    detail::write_files(opts.out_dir, result.second);
  } catch (const IoError& e) {
    error_record("IoError", e.what());
    return kIoFailure;
  }
  return result.first;
}

inline int run_file(const std::string& command, const std::filesystem::path& config_path, const Options& opts,
                    std::ostream& out, std::ostream& err) {
  std::ifstream in(config_path);
  if (!in) {
    err << nlohmann::json{{"error", "IoError"}, {"message", "cannot read " + config_path.string()}}.dump() << '\n';
    return kIoFailure;
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    err << nlohmann::json{{"error", "InvalidConfig"}, {"message", e.what()}}.dump() << '\n';
    return kInvalidConfig;
  }
  return run(command, j, opts, out, err);
}

}  // namespace impulse::cli
