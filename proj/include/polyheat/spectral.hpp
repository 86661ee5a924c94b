#pragma once

#include <complex>
#include <vector>

#include "polyheat/kernel.hpp"
#include "polyheat/plane_wave.hpp"

namespace polyheat {

// Samples of a periodic function at x_j = j L / N.
struct GridState {
  int N = 0;
  double L = 0.0;
  std::vector<Complex> values;

  /// N a power of two >= 8, L > 0, values finite and of length N.
  void validate() const;
  double x(int j) const { return j * L / N; }
};

/// Unitary DFT: V_m = N^{-1/2} sum_j v_j exp(-2 pi i j m / N). Length must be
/// a power of two.
std::vector<Complex> dft(const std::vector<Complex>& v);
std::vector<Complex> idft(const std::vector<Complex>& v);

/// Signed mode of DFT index j: j for j < N/2, j - N otherwise.
int signed_mode(int j, int N);

double l2_norm(const GridState& g);

GridState free_step(const GridState& g, double dt, const EvolutionParams& params);

/// steps x [exp(V dt/2) free_step(dt) exp(V dt/2)], dt = t / steps.
GridState strang_solve(const GridState& u0, const std::vector<Complex>& v_grid,
                       double t, int steps, const EvolutionParams& params);

/// Grid samples of a plane-wave state. Every frequency must be an integer
/// multiple of 2 pi / L (within 1e-9 in units of modes) and below the
/// Nyquist limit pi N / L.
GridState sample_state(const PlaneWaveState& s, int N, double L);
std::vector<Complex> sample_potential(const PlaneWaveState& V, int N, double L);

}  // namespace polyheat
