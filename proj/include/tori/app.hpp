#pragma once

// Batch runner behind the `tori` command: config file -> init -> continuation in
// epsilon -> verification -> output directory.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "tori/init_pendula.hpp"
#include "tori/verify.hpp"

namespace tori::app {

struct Config {
  std::string model = "pendula";  // "pendula" (n = 4, d = 2) or "pendulum" (n = d = 1)
  int n = 4;
  int d = 2;
  Vector omega;
  Vector beta;
  PendulaParams params;
  std::vector<Real> eps_schedule{0};
  std::vector<int> grid{128, 128};
  Real newton_tol = Real(1e-11);
  int max_steps = 12;
  Real divisor_floor = Real(1e-8);
  int oversample = 2;
  std::filesystem::path output_dir = "run";
  bool verify = true;
  Real verify_time = 10;
  int verify_samples = 16;
  unsigned seed = 1;
  std::string precision = "double";
};

/// Parses and validates. Reals may be written as numbers or as sqrt(x).
/// Throws ConfigError, or InvalidData for frequencies violating the
/// non-resonance assumptions (beta_i = 0, |beta_i| = |beta_j|).
Config load_config(const std::filesystem::path& path);
Config parse_config(const std::string& text);

IterateOptions iterate_options(const Config& cfg);

/// Writes convergence.csv, continuation.csv, K.coeffs, W.coeffs, verify.txt into
/// cfg.output_dir; on error writes failure.json instead and returns nonzero.
int run(const Config& cfg, std::ostream& log);

/// Reads a finished run directory and writes fig1_convergence.dat and
/// surface_K<j>.dat (theta1 theta2 K_j) next to it.
void emit_plots(const std::filesystem::path& run_dir);

}  // namespace tori::app
