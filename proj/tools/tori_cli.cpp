#include <iostream>

#include "CLI11.hpp"
#include "tori/app.hpp"
#include "tori/errors.hpp"

int main(int argc, char** argv) {
  CLI::App cli{"Lower-dimensional elliptic invariant tori by the parametrization method"};
  cli.require_subcommand(1);

  std::string config;
  std::string out_dir;
  auto* run = cli.add_subcommand("run", "solve the configured problem and write a run directory");
  run->add_option("config", config, "YAML config")->required()->check(CLI::ExistingFile);
  run->add_option("-o,--output", out_dir, "override output_dir");

  std::string run_dir;
  auto* plots = cli.add_subcommand("plots", "emit plot data from a finished run directory");
  plots->add_option("dir", run_dir, "run directory")->required()->check(CLI::ExistingDirectory);

  CLI11_PARSE(cli, argc, argv);

  if (*run) {
    tori::app::Config cfg;
    try {
      cfg = tori::app::load_config(config);
    } catch (const tori::Error& e) {
      std::cerr << "config rejected (" << e.kind() << "): " << e.what() << '\n';
      return 1;
    }
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    const int status = tori::app::run(cfg, std::cout);
    if (status == 0) std::cout << "wrote " << cfg.output_dir.string() << '\n';
    return status;
  }
  try {
    tori::app::emit_plots(run_dir);
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }
  return 0;
}
