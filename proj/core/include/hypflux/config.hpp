#pragma once

#include "hypflux/initial_data.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace hypflux {

/// Parsed run or study configuration. Every key has a default except problem.
struct Config {
  // [problem]
  std::string problem;
  std::uint64_t seed = 1;

  // [system]
  std::vector<double> speed{1.0};
  std::vector<double> matrix;  // row-major, Friedrichs only
  double gravity = 9.81;
  double h_min = 0.5;
  double h_max = 1.5;
  double q_max = 1.0;
  std::vector<double> omega_lower;
  std::vector<double> omega_upper;
  double omega_inflation = 0.05;

  // [initial]
  std::string initial_kind = "sine";
  ParamMap initial_params;

  // [mesh]
  std::string mesh_kind = "uniform";
  int cells = 64;
  int cells_y = 0;  // 0: same as cells
  std::vector<double> length{1.0};
  double jitter = 0.0;

  // [flux]
  std::string flux = "rusanov";
  double flux_speed = 0.0;  // 0: auto

  // [time]
  double final_time = 0.1;
  std::string cfl = "strengthened";
  double zeta = 0.1;

  // [run]
  int record_every = 10;
  bool check_admissibility = true;
  std::string quadrature = "midpoint";
  std::string output_dir = "hypflux_out";
  bool write_snapshots = true;
  std::string reference = "auto";  // auto | exact | fine | none
  int fine_factor = 8;
  double radius = 2.0;
  std::vector<double> center{0.0};

  // [study]
  std::vector<int> levels;

  bool operator==(const Config&) const = default;

  int dim() const;
  int components() const;
};

/// Throws ParseError with line or key on malformed input.
Config parse_config(const std::string& text);
Config load_config(const std::string& path);
std::string serialize_config(const Config& cfg);

/// Range and consistency checks; throws ValidationError.
void validate_config(const Config& cfg, bool study);

}  // namespace hypflux
