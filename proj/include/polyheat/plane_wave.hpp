#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "polyheat/kernel.hpp"

namespace polyheat {

inline constexpr std::size_t kDefaultAtomCap = 100000;

struct Wave {
  double y = 0.0;
  Complex a{};
};

// u(x) = sum_j a_j exp(i x y_j). Frequencies are kept sorted; two
// frequencies within 1e-12 max(1, |y|) are merged.
class PlaneWaveState {
 public:
  PlaneWaveState() = default;
  explicit PlaneWaveState(std::vector<Wave> waves,
                          std::size_t max_atoms = kDefaultAtomCap);

  const std::vector<Wave>& waves() const { return waves_; }
  std::size_t size() const { return waves_.size(); }
  bool empty() const { return waves_.empty(); }

  // sum |a_j|
  double fresnel_norm() const;

 private:
  std::vector<Wave> waves_;
};

/// Sorts by frequency and merges near-equal frequencies. Atoms whose merged
/// amplitude is exactly zero are dropped.
std::vector<Wave> merge_waves(std::vector<Wave> waves);

Complex state_eval(const PlaneWaveState& state, double x);

PlaneWaveState free_propagate(const PlaneWaveState& state, double dt,
                              const EvolutionParams& params);

/// Pointwise product with V. Throws state_explosion when the merged result
/// has more than max_atoms atoms.
PlaneWaveState apply_potential(const PlaneWaveState& state,
                               const PlaneWaveState& V,
                               std::size_t max_atoms = kDefaultAtomCap);

PlaneWaveState add(const PlaneWaveState& a, const PlaneWaveState& b);
PlaneWaveState scale(const PlaneWaveState& a, Complex s);

/// ||a - b|| in the sum-of-moduli norm.
double fresnel_distance(const PlaneWaveState& a, const PlaneWaveState& b);

}  // namespace polyheat
