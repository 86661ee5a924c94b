#pragma once

#include <string>
#include <vector>

#include "polyheat/dyson.hpp"
#include "polyheat/kernel.hpp"
#include "polyheat/plane_wave.hpp"

namespace polyheat {

// Every CLI default in one place.
struct Defaults {
  static constexpr int grid_N = 256;
  static constexpr double grid_L = 6.283185307179586;  // 2 pi
  static constexpr int n_max = 6;
  static constexpr int time_mesh = 64;
  static constexpr double tol = 1e-6;
  static constexpr int spectral_steps = 1024;
};

struct ProblemSpec {
  std::string name = "problem";
  EvolutionParams params;
  double t = 1.0;
  PlaneWaveState u0;
  PlaneWaveState V;
  int grid_N = Defaults::grid_N;
  double grid_L = Defaults::grid_L;
  DysonConfig dyson;
  int spectral_steps = Defaults::spectral_steps;
  double tol = Defaults::tol;
};

/// Parses the JSON problem format:
///   {"p": 4, "alpha": [0, 1], "t": 1,
///    "u0_atoms": [{"y": 0, "re": 1, "im": 0}],
///    "V_atoms": [{"z": 1, "re": 0.4, "im": 0}],
///    "grid": {"N": 256, "L": 6.283185307179586},
///    "dyson": {"n_max": 6, "time_mesh": 64},
///    "spectral": {"steps": 1024}, "tol": 1e-6}
/// Missing optional sections take the Defaults. Throws Error with
/// malformed_config on syntax or schema errors and the usual codes on
/// inadmissible parameters.
ProblemSpec parse_problem(const std::string& text);
ProblemSpec load_problem(const std::string& path);

/// Reads a whole file; throws malformed_config if it cannot be opened.
std::string read_file(const std::string& path);

}  // namespace polyheat
