#include <CLI11.hpp>

#include <iostream>

#include "impulse/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Design, verify and simulate pulse-modulated dosing feedback", "impulse-dose"};
  app.require_subcommand(0, 1);

  std::string config_path;
  impulse::cli::Options opts;
  std::string out_dir = ".";
  bool print_defaults = false;
  app.add_flag("--print-defaults", print_defaults, "Print the default configuration and exit");

  for (const char* name : {"design", "feasibility", "simulate", "bifurcate"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_flag("--svg", opts.svg, "Also write an SVG plot (simulate)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : impulse::cli::kInvalidConfig;
  }

  if (print_defaults) {
    std::cout << impulse::default_config_json().dump(2) << '\n';
    return 0;
  }
  if (app.get_subcommands().empty()) {
    std::cerr << app.help();
    return impulse::cli::kInvalidConfig;
  }
  opts.out_dir = out_dir;
  return impulse::cli::run_file(app.get_subcommands().front()->get_name(), config_path, opts, std::cout, std::cerr);
}
