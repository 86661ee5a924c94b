#include "polyheat/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

#include "polyheat/error.hpp"

namespace polyheat {

namespace {

constexpr double kPi = std::numbers::pi;

bool power_of_two(std::size_t n) { return n >= 1 && (n & (n - 1)) == 0; }

// The FFTW planner is not thread safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(p);
  }
};

std::vector<Complex> transform(const std::vector<Complex>& v, int sign) {
  if (!power_of_two(v.size())) {
    throw Error(ErrorCode::bad_length,
                "bad length: " + std::to_string(v.size()) + " is not a power of two");
  }
  const int n = static_cast<int>(v.size());
  std::vector<Complex> out(v);
  auto* data = reinterpret_cast<fftw_complex*>(out.data());
  std::unique_ptr<fftw_plan_s, PlanDeleter> plan;
  {
    std::lock_guard lock(planner_mutex());
    plan.reset(fftw_plan_dft_1d(n, data, data, sign, FFTW_ESTIMATE));
  }
  fftw_execute(plan.get());
  const double s = 1.0 / std::sqrt(double(n));
  for (Complex& c : out) c *= s;
  return out;
}

double wavenumber(int j, int N, double L) { return 2.0 * kPi * signed_mode(j, N) / L; }

void check_frequency(double y, int N, double L) {
  const double modes = y * L / (2.0 * kPi);
  if (std::abs(modes - std::round(modes)) > 1e-9) {
    throw Error(ErrorCode::incommensurate_frequency,
                "incommensurate frequency: y = " + std::to_string(y) +
                    " is not a multiple of 2 pi / L");
  }
  if (!(std::abs(y) < kPi * N / L)) {
    throw Error(ErrorCode::aliasing,
                "aliasing: |y| = " + std::to_string(std::abs(y)) +
                    " reaches the Nyquist limit " + std::to_string(kPi * N / L));
  }
}

std::vector<Complex> sample(const PlaneWaveState& s, int N, double L) {
  GridState shape{N, L, std::vector<Complex>(N)};
  shape.validate();
  for (const Wave& w : s.waves()) check_frequency(w.y, N, L);
  std::vector<Complex> out(N);
  for (int j = 0; j < N; ++j) out[j] = state_eval(s, shape.x(j));
  return out;
}

}  // namespace

void GridState::validate() const {
  if (N < 8 || !power_of_two(static_cast<std::size_t>(N))) {
    throw Error(ErrorCode::bad_length, "bad length: N must be a power of two >= 8");
  }
  if (!(L > 0.0) || !std::isfinite(L)) {
    throw Error(ErrorCode::invalid_argument, "grid period L must be positive");
  }
  if (static_cast<int>(values.size()) != N) {
    throw Error(ErrorCode::bad_length, "bad length: grid values do not match N");
  }
  for (const Complex& v : values) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw Error(ErrorCode::invalid_argument, "grid values must be finite");
    }
  }
}

std::vector<Complex> dft(const std::vector<Complex>& v) { return transform(v, FFTW_FORWARD); }

std::vector<Complex> idft(const std::vector<Complex>& v) { return transform(v, FFTW_BACKWARD); }

int signed_mode(int j, int N) { return j < N / 2 ? j : j - N; }

double l2_norm(const GridState& g) {
  double s = 0.0;
  for (const Complex& v : g.values) s += std::norm(v);
  return std::sqrt(s);
}

GridState free_step(const GridState& g, double dt, const EvolutionParams& params) {
  g.validate();
  if (!(dt >= 0.0)) throw Error(ErrorCode::invalid_argument, "dt must be >= 0");
  std::vector<Complex> hat = dft(g.values);
  for (int j = 0; j < g.N; ++j) {
    hat[j] *= std::exp(params.alpha * dt * std::pow(wavenumber(j, g.N, g.L), params.p));
  }
  return GridState{g.N, g.L, idft(hat)};
}

GridState strang_solve(const GridState& u0, const std::vector<Complex>& v_grid, double t,
                       int steps, const EvolutionParams& params) {
  u0.validate();
  validate_params(params.p, params.alpha);
  if (steps < 1) throw Error(ErrorCode::invalid_argument, "steps must be >= 1");
  if (!(t >= 0.0)) throw Error(ErrorCode::invalid_argument, "t must be >= 0");
  if (static_cast<int>(v_grid.size()) != u0.N) {
    throw Error(ErrorCode::bad_length, "bad length: potential grid does not match N");
  }
  const double dt = t / steps;
  std::vector<Complex> half(u0.N);
  for (int j = 0; j < u0.N; ++j) half[j] = std::exp(v_grid[j] * (0.5 * dt));
  std::vector<Complex> symbol(u0.N);
  for (int j = 0; j < u0.N; ++j) {
    symbol[j] = std::exp(params.alpha * dt * std::pow(wavenumber(j, u0.N, u0.L), params.p));
  }
  std::vector<Complex> u = u0.values;
  for (int s = 0; s < steps; ++s) {
    for (int j = 0; j < u0.N; ++j) u[j] *= half[j];
    std::vector<Complex> hat = dft(u);
    for (int j = 0; j < u0.N; ++j) hat[j] *= symbol[j];
    u = idft(hat);
    for (int j = 0; j < u0.N; ++j) u[j] *= half[j];
  }
  return GridState{u0.N, u0.L, std::move(u)};
}

GridState sample_state(const PlaneWaveState& s, int N, double L) {
  return GridState{N, L, sample(s, N, L)};
}

std::vector<Complex> sample_potential(const PlaneWaveState& V, int N, double L) {
  return sample(V, N, L);
}

}  // namespace polyheat
