#include "polyheat/plane_wave.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "polyheat/error.hpp"

namespace polyheat {

namespace {

bool close(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a));
}

void check_cap(std::size_t n, std::size_t cap) {
  if (n > cap) {
    throw Error(ErrorCode::state_explosion,
                "state explosion: " + std::to_string(n) + " atoms exceed the cap of " +
                    std::to_string(cap));
  }
}

}  // namespace

std::vector<Wave> merge_waves(std::vector<Wave> waves) {
  for (const Wave& w : waves) {
    if (!std::isfinite(w.y) || !std::isfinite(w.a.real()) || !std::isfinite(w.a.imag())) {
      throw Error(ErrorCode::invalid_argument, "plane wave atoms must be finite");
    }
  }
  std::stable_sort(waves.begin(), waves.end(),
                   [](const Wave& l, const Wave& r) { return l.y < r.y; });
  std::vector<Wave> out;
  out.reserve(waves.size());
  for (const Wave& w : waves) {
    if (!out.empty() && close(out.back().y, w.y)) {
      out.back().a += w.a;
    } else {
      out.push_back(w);
    }
  }
  std::erase_if(out, [](const Wave& w) { return w.a == Complex{}; });
  return out;
}

PlaneWaveState::PlaneWaveState(std::vector<Wave> waves, std::size_t max_atoms)
    : waves_(merge_waves(std::move(waves))) {
  check_cap(waves_.size(), max_atoms);
}

double PlaneWaveState::fresnel_norm() const {
  double s = 0.0;
  for (const Wave& w : waves_) s += std::abs(w.a);
  return s;
}

Complex state_eval(const PlaneWaveState& state, double x) {
  Complex s{};
  for (const Wave& w : state.waves()) s += w.a * std::polar(1.0, x * w.y);
  return s;
}

PlaneWaveState free_propagate(const PlaneWaveState& state, double dt,
                              const EvolutionParams& params) {
  if (!(dt >= 0.0)) throw Error(ErrorCode::invalid_argument, "dt must be >= 0");
  std::vector<Wave> out = state.waves();
  for (Wave& w : out) w.a *= std::exp(params.alpha * dt * std::pow(w.y, params.p));
  const std::size_t cap = std::max(kDefaultAtomCap, out.size());
  return PlaneWaveState(std::move(out), cap);
}

PlaneWaveState apply_potential(const PlaneWaveState& state, const PlaneWaveState& V,
                               std::size_t max_atoms) {
  std::vector<Wave> out;
  out.reserve(state.size() * V.size());
  for (const Wave& u : state.waves()) {
    for (const Wave& v : V.waves()) out.push_back({u.y + v.y, u.a * v.a});
  }
  return PlaneWaveState(std::move(out), max_atoms);
}

PlaneWaveState add(const PlaneWaveState& a, const PlaneWaveState& b) {
  std::vector<Wave> out = a.waves();
  out.insert(out.end(), b.waves().begin(), b.waves().end());
  const std::size_t cap = out.size();
  return PlaneWaveState(std::move(out), cap);
}

PlaneWaveState scale(const PlaneWaveState& a, Complex s) {
  std::vector<Wave> out = a.waves();
  for (Wave& w : out) w.a *= s;
  const std::size_t cap = out.size();
  return PlaneWaveState(std::move(out), cap);
}

double fresnel_distance(const PlaneWaveState& a, const PlaneWaveState& b) {
  return add(a, scale(b, -1.0)).fresnel_norm();
}

}  // namespace polyheat
