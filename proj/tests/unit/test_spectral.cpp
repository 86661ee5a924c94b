#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "polyheat/error.hpp"
#include "polyheat/spectral.hpp"
#include "support/random.hpp"

using namespace polyheat;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr Complex kI{0.0, 1.0};

std::vector<Complex> naive_dft(const std::vector<Complex>& v) {
  const std::size_t N = v.size();
  std::vector<Complex> out(N);
  for (std::size_t m = 0; m < N; ++m) {
    for (std::size_t j = 0; j < N; ++j) {
      out[m] += v[j] * std::polar(1.0, -2 * kPi * double((j * m) % N) / N);
    }
    out[m] /= std::sqrt(double(N));
  }
  return out;
}

double norm2(const std::vector<Complex>& v) {
  double s = 0.0;
  for (const Complex& c : v) s += std::norm(c);
  return std::sqrt(s);
}

double max_diff(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

std::vector<Complex> random_vector(std::size_t n, std::mt19937_64& rng) {
  std::vector<Complex> v(n);
  for (Complex& c : v) c = testing::random_complex(rng);
  return v;
}

PlaneWaveState state(std::vector<Wave> w) { return PlaneWaveState(std::move(w)); }

}  // namespace

TEST_CASE("dft: constant, Parseval, round trip and naive oracle") {
  const std::vector<Complex> c(16, Complex{0.5, -1.0});
  const std::vector<Complex> spike = dft(c);
  CHECK(std::abs(spike[0] - Complex{0.5, -1.0} * 4.0) < 1e-14);
  for (std::size_t m = 1; m < spike.size(); ++m) CHECK(std::abs(spike[m]) < 1e-14);

  std::mt19937_64 rng(5);
  for (std::size_t n : {8u, 64u, 256u}) {
    const std::vector<Complex> v = random_vector(n, rng);
    const std::vector<Complex> V = dft(v);
    CHECK(std::abs(norm2(v) - norm2(V)) < 1e-12);
    CHECK(max_diff(idft(V), v) < 1e-12);
    CHECK(max_diff(V, naive_dft(v)) < 1e-12);
  }
  try {
    dft(std::vector<Complex>(12));
    FAIL("length 12 accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::bad_length);
  }
}

TEST_CASE("signed modes") {
  CHECK(signed_mode(0, 8) == 0);
  CHECK(signed_mode(3, 8) == 3);
  CHECK(signed_mode(4, 8) == -4);
  CHECK(signed_mode(7, 8) == -1);
}

TEST_CASE("GridState validation") {
  GridState g{12, 1.0, std::vector<Complex>(12)};
  CHECK_THROWS_AS(g.validate(), Error);
  g = {4, 1.0, std::vector<Complex>(4)};
  CHECK_THROWS_AS(g.validate(), Error);
  g = {8, 1.0, std::vector<Complex>(8)};
  CHECK_NOTHROW(g.validate());
  g.values[3] = Complex{std::nan(""), 0};
  CHECK_THROWS_AS(g.validate(), Error);
}

TEST_CASE("sampling") {
  const GridState one = sample_state(state({{0.0, 1.0}}), 16, 2 * kPi);
  for (const Complex& v : one.values) CHECK(v == Complex{1.0});
  const GridState wave = sample_state(state({{1.0, 1.0}}), 16, 2 * kPi);
  for (int j = 0; j < 16; ++j) CHECK(std::abs(wave.values[j] - std::polar(1.0, wave.x(j))) < 1e-15);

  try {
    sample_state(state({{0.5, 1.0}}), 16, 2 * kPi);
    FAIL("incommensurate frequency accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::incommensurate_frequency);
  }
  try {
    sample_potential(state({{8.0, 1.0}}), 16, 2 * kPi);
    FAIL("Nyquist frequency accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::aliasing);
  }
}

TEST_CASE("free_step") {
  const auto damp = validate_params(4, -1.0);
  const GridState g = sample_state(state({{1.0, 1.0}}), 32, 2 * kPi);
  const GridState s = free_step(g, 1.0, damp);
  for (int j = 0; j < 32; ++j) CHECK(std::abs(s.values[j] - std::exp(-1.0) * g.values[j]) < 1e-12);
  CHECK(max_diff(free_step(g, 0.0, damp).values, g.values) < 1e-15);

  std::mt19937_64 rng(9);
  GridState r{64, 3.0, random_vector(64, rng)};
  for (const auto& params : {validate_params(4, Complex{-0.2, 1}), validate_params(3, kI)}) {
    CHECK(l2_norm(free_step(r, 0.3, params)) <= l2_norm(r) * (1 + 1e-14));
  }
}

TEST_CASE("strang_solve exact cases") {
  const auto p4 = validate_params(4, kI);
  const PlaneWaveState u0 = state({{0.0, 1.0}, {2.0, Complex{0.3, 0.2}}, {-3.0, 0.4}});
  const GridState g = sample_state(u0, 64, 2 * kPi);
  const GridState free = free_step(g, 1.0, p4);
  for (int steps : {1, 7, 64}) {
    CHECK(max_diff(strang_solve(g, std::vector<Complex>(64), 1.0, steps, p4).values, free.values) <
          1e-12);
    const Complex c{-0.3, 0.2};
    const GridState r = strang_solve(g, std::vector<Complex>(64, c), 1.0, steps, p4);
    std::vector<Complex> expected = free.values;
    for (Complex& v : expected) v *= std::exp(c);
    CHECK(max_diff(r.values, expected) < 1e-12);
  }
}

TEST_CASE("strang_solve: second-order convergence on the standard case") {
  const auto p4 = validate_params(4, kI);
  const GridState u0 = sample_state(state({{0.0, 1.0}}), 256, 2 * kPi);
  const std::vector<Complex> v = sample_potential(state({{1.0, 0.4}}), 256, 2 * kPi);
  const GridState ref = strang_solve(u0, v, 1.0, 4096, p4);
  double prev = 0.0;
  for (int steps : {64, 128, 256, 512}) {
    const double err = max_diff(strang_solve(u0, v, 1.0, steps, p4).values, ref.values);
    if (prev > 0.0) {
      CAPTURE(steps);
      CHECK(prev / err >= 3.2);
      CHECK(prev / err <= 4.8);
    }
    prev = err;
  }
}

TEST_CASE("property: unitary evolution for imaginary alpha and imaginary V") {
  const GridState u0 = sample_state(state({{0.0, 1.0}, {1.0, 0.5}, {-2.0, Complex{0, 0.3}}}), 128,
                                    2 * kPi);
  // V(x) = i (0.3 + 0.4 cos x) on the grid.
  const std::vector<Complex> v =
      sample_potential(state({{0.0, 0.3 * kI}, {1.0, 0.2 * kI}, {-1.0, 0.2 * kI}}), 128, 2 * kPi);
  for (const auto& params : {validate_params(4, kI), validate_params(3, -kI)}) {
    const GridState r = strang_solve(u0, v, 2.0, 100, params);
    CHECK(std::abs(l2_norm(r) - l2_norm(u0)) < 1e-10);
  }
}

TEST_CASE("property: dissipative free evolution never increases the norm") {
  std::mt19937_64 rng(13);
  GridState g{64, 2 * kPi, random_vector(64, rng)};
  const auto params = validate_params(4, Complex{-0.5, 0.3});
  double prev = l2_norm(g);
  for (int step = 0; step < 20; ++step) {
    g = strang_solve(g, std::vector<Complex>(64), 0.05, 1, params);
    const double now = l2_norm(g);
    CHECK(now <= prev);
    prev = now;
  }
}

TEST_CASE("property: grid refinement leaves band-limited results unchanged") {
  const auto p4 = validate_params(4, kI);
  const PlaneWaveState u0 = state({{0.0, 1.0}, {2.0, 0.5}});
  const PlaneWaveState V = state({{1.0, 0.3}, {-1.0, Complex{0, 0.2}}});
  // Products stay below the coarse Nyquist limit only at low order, so use
  // a short time and a large enough coarse grid.
  const GridState coarse = strang_solve(sample_state(u0, 64, 2 * kPi), sample_potential(V, 64, 2 * kPi),
                                        0.25, 32, p4);
  const GridState fine = strang_solve(sample_state(u0, 128, 2 * kPi),
                                      sample_potential(V, 128, 2 * kPi), 0.25, 32, p4);
  double m = 0.0;
  for (int j = 0; j < 64; ++j) m = std::max(m, std::abs(coarse.values[j] - fine.values[2 * j]));
  CHECK(m < 1e-10);
}
