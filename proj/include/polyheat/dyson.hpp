#pragma once

#include <cstddef>
#include <vector>

#include "polyheat/kernel.hpp"
#include "polyheat/plane_wave.hpp"

namespace polyheat {

struct DysonConfig {
  int n_max = 6;
  // Uniform Volterra mesh on [0, t] with M nodes (M >= 2).
  int time_mesh = 64;
  // Gauss order per axis for the simplex integrals; 0 picks it from the
  // oscillation rate.
  int simplex_order = 0;
  std::size_t max_atoms = kDefaultAtomCap;
  int n_cap = 32;
  // Tolerance on the change of the once-extrapolated value between the
  // M / 2M - 1 and 2M - 1 / 4M - 3 mesh pairs.
  double mesh_tol = 1e-6;

  void validate() const;
};

/// (t ||V||)^n / n! ||u0||
double dyson_term_bound(double u0_norm, double v_norm, double t, int n);

/// sum_{n > n_max} (t ||V||)^n / n! ||u0||
double dyson_truncation_bound(double u0_norm, double v_norm, double t, int n_max);

struct DysonTerm {
  int n = 0;
  PlaneWaveState state;
  double bound = 0.0;
  bool bound_ok = true;
  // ||T_{2M-1} - T_M||: trapezoid results on the two meshes.
  double mesh_delta = 0.0;
  bool mesh_too_coarse = false;
};

/// S_n(t) u0 from the Volterra recursion on the mesh: trapezoid sums on M,
/// 2M - 1 and 4M - 3 nodes combined by two levels of Richardson
/// extrapolation.
DysonTerm dyson_term(const PlaneWaveState& u0, const PlaneWaveState& V, double t,
                     int n, const DysonConfig& cfg, const EvolutionParams& params);

struct DysonResult {
  PlaneWaveState state;
  double truncation_bound = 0.0;
  std::vector<DysonTerm> terms;
  bool mesh_too_coarse = false;
};

DysonResult dyson_solve(const PlaneWaveState& u0, const PlaneWaveState& V, double t,
                        const DysonConfig& cfg, const EvolutionParams& params);

struct FeynmanKacResult {
  Complex value{};
  double truncation_bound = 0.0;
  // Contribution of each n at x.
  std::vector<Complex> terms;
};

/// Path-integral form: for every tuple of atoms (y0 of u0, z_1..z_n of V)
/// the time-ordered integral over 0 <= s_1 <= ... <= s_n <= t of the closed
/// cylinder exponent, with the phase exp(i x (y0 + z_1 + ... + z_n)).
/// n <= 3 uses a Duffy-mapped tensor Gauss rule, larger n an iterated
/// cell-wise Gauss rule.
FeynmanKacResult feynman_kac_eval(const PlaneWaveState& u0, const PlaneWaveState& V,
                                  double t, double x, const DysonConfig& cfg,
                                  const EvolutionParams& params);

/// The same series collected as a plane-wave state (exact in x).
PlaneWaveState feynman_kac_state(const PlaneWaveState& u0, const PlaneWaveState& V,
                                 double t, const DysonConfig& cfg,
                                 const EvolutionParams& params,
                                 std::vector<PlaneWaveState>* terms = nullptr);

enum class SimplexRule { duffy, iterated, full_cube };

/// Term n of the path-integral series at x with an explicit rule.
/// full_cube integrates the symmetrized integrand over [0, t]^n and divides
/// by n!.
Complex feynman_kac_term(const PlaneWaveState& u0, const PlaneWaveState& V, double t,
                         double x, int n, SimplexRule rule, int order,
                         const EvolutionParams& params);

}  // namespace polyheat
