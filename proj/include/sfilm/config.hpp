// Run configuration: a flat sectioned key-value text format, validated with
// line-precise errors. The grammar is documented in the README.

#pragma once

#include <stdexcept>
#include <string>

#include "sfilm/constitutive.hpp"
#include "sfilm/dynamics.hpp"

namespace sfilm {

struct ConfigError : std::runtime_error {
  int line;
  ConfigError(int line_, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line_) + ": " + msg), line(line_) {}
};

enum class Preset { constant, cosine, from_file };

struct RunConfig {
  // [grid]
  int n_cells = 0;
  double length = 0;

  // [params]
  double G = 0;
  double D = 0;
  double eps = 0.01;
  double eta1 = 0.875;
  std::string sigma_kind = "linear";  // linear | logarithmic
  double sigma_s = 2.0;
  double beta = 1.0;
  double gamma_inf = 0;   // logarithmic only
  int sigma_sign = 1;     // logarithmic only
  double gamma_max = 0;   // logarithmic only

  // [scheme]
  Scheme scheme = Scheme::regularized;

  // [initial]
  Preset preset = Preset::cosine;
  double h_mean = 0, h_amp = 0;
  double gamma_mean = 0, gamma_amp = 0;
  int mode = 1;
  std::string initial_file;

  // [control]
  double dt0 = 0;  // 0 -> dx^2
  double dt_min = 1e-12;
  double dt_max_factor = 2.0;  // dt_max = factor * dx^2
  double t_end = 0;

  // [output]
  std::string directory = "out";
  double snapshot_every = 0;  // 0 -> endpoints only
  int ledger_every = 1;

  Grid make_grid() const { return Grid(n_cells, length); }
  SigmaModel make_sigma() const;
  ModelParams make_params() const;
  StepControl make_control() const;

  // Initial data at cell centers; the regularized scheme lifts by
  // (sqrt(eps), eps) automatically.
  State make_initial_state() const;
};

// Parses and validates the config text; throws ConfigError.
RunConfig parse_config(const std::string& text);

RunConfig load_config_file(const std::string& path);

}  // namespace sfilm
