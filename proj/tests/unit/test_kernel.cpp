#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "polyheat/error.hpp"
#include "polyheat/kernel.hpp"
#include "support/airy_oracle.hpp"

using namespace polyheat;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr Complex kI{0.0, 1.0};

quad::QuadSpec spec(double tol = 1e-12) {
  quad::QuadSpec s;
  s.abs_tol = 1e-15;
  s.rel_tol = tol;
  return s;
}

ErrorCode code_of(int p, Complex alpha) {
  try {
    validate_params(p, alpha);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::invalid_argument;
}

double gaussian(double t, double x) { return std::exp(-x * x / (2 * t)) / std::sqrt(2 * kPi * t); }

struct Case {
  int p;
  Complex alpha;
};

const std::vector<Case> kAdmissible = {
    {2, {-0.5, 0}}, {3, {0, 1}}, {3, {0, -1}}, {4, {0, 1}}, {4, {0, -1}},
    {4, {-1, 0}},   {4, {-1, 0.5}}, {5, {0, 1}}, {6, {0, 0.7}}};

}  // namespace

TEST_CASE("validate_params admissibility") {
  CHECK_NOTHROW(validate_params(4, -1.0));
  CHECK_NOTHROW(validate_params(3, kI));
  CHECK_NOTHROW(validate_params(2, Complex{-0.5, 0}));
  CHECK(code_of(3, -1.0) == ErrorCode::inadmissible_alpha);
  CHECK(code_of(4, Complex{0.1, 1}) == ErrorCode::inadmissible_alpha);
  CHECK(code_of(1, -1.0) == ErrorCode::order_too_low);
  CHECK(code_of(4, 0.0) == ErrorCode::degenerate);
  try {
    validate_params(3, -1.0);
  } catch (const Error& e) {
    CHECK(std::string(e.what()).rfind("inadmissible alpha", 0) == 0);
  }
}

TEST_CASE("kernel_decaying closed forms") {
  const auto heat = validate_params(2, Complex{-0.5, 0});
  const KernelValue g0 = kernel_decaying(heat, 1.0, 0.0, spec());
  CHECK(std::abs(g0.value - 1.0 / std::sqrt(2 * kPi)) < 1e-12);
  CHECK(g0.method == KernelMethod::decaying);
  CHECK(g0.err_estimate >= 0.0);

  const auto p4 = validate_params(4, -1.0);
  const double gamma = std::tgamma(1.25) / kPi;
  CHECK(std::abs(kernel_decaying(p4, 1.0, 0.0, spec()).value - gamma) < 1e-12);
  // Independent check of the reduction: brute quadrature of exp(-k^4).
  const auto brute = quad::integrate_interval(
      [](double k) { return Complex{std::exp(-std::pow(k, 4))}; }, 0.0, 8.0, spec(1e-14));
  CHECK(std::abs(brute.value / kPi - gamma) < 1e-13);

  const Complex a = kernel_decaying(p4, 1.0, 1.3, spec()).value;
  const Complex b = kernel_decaying(p4, 1.0, -1.3, spec()).value;
  CHECK(std::abs(a - b) < 1e-12);

  CHECK_THROWS_AS(kernel_decaying(validate_params(4, kI), 1.0, 0.0, spec()), Error);
}

TEST_CASE("kernel_rotated closed form, evenness and conjugation") {
  const auto p4 = validate_params(4, kI);
  const Complex expected = std::polar(std::tgamma(1.25) / kPi, kPi / 8);
  const KernelValue g0 = kernel_rotated(p4, 1.0, 0.0, spec());
  CHECK(std::abs(g0.value - expected) < 1e-12);
  CHECK(g0.method == KernelMethod::rotated);

  CHECK(std::abs(kernel_rotated(p4, 1.0, 2.0, spec()).value -
                 kernel_rotated(p4, 1.0, -2.0, spec()).value) < 1e-10);

  const auto p4m = validate_params(4, -kI);
  for (double x : {0.0, 0.5, 2.0, 7.5}) {
    CHECK(std::abs(kernel_rotated(p4m, 1.0, x, spec()).value -
                   std::conj(kernel_rotated(p4, 1.0, x, spec()).value)) < 1e-12);
  }
}

TEST_CASE("kernel_shifted against the Airy oracle") {
  const auto p3 = validate_params(3, kI);
  for (double x : {0.0, -5.0, 1.0, 4.0, -9.5}) {
    CAPTURE(x);
    const KernelValue v = kernel_shifted(p3, 1.0, x, spec());
    CHECK(v.method == KernelMethod::shifted);
    CHECK(std::abs(v.value - testing::airy_kernel(1.0, x)) < 1e-8);
  }
  CHECK(std::abs(kernel_shifted(p3, 1.0, 0.0, spec()).value - 0.2461627) < 1e-7);
}

TEST_CASE("kernel_shifted rejects a shift of the wrong sign") {
  const auto p3 = validate_params(3, kI);
  ShiftOptions wrong;
  wrong.eta = -0.5;
  try {
    kernel_shifted(p3, 1.0, 0.0, spec(), wrong);
    FAIL("wrong-sign shift was accepted");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::shift_too_small);
  }
  CHECK(default_shift(p3, 1.0, 0.0) > 0.0);
  CHECK(default_shift(validate_params(3, -kI), 1.0, 0.0) < 0.0);
}

TEST_CASE("kernel dispatcher") {
  const KernelValue g = kernel(validate_params(2, Complex{-0.5, 0}), 2.0, 1.0, spec());
  CHECK(std::abs(g.value - gaussian(2.0, 1.0)) < 1e-12);

  const KernelValue a = kernel(validate_params(3, kI), 1.0, 1.0, spec());
  CHECK(std::abs(a.value - testing::airy_kernel(1.0, 1.0)) < 1e-8);

  const auto p5 = validate_params(5, kI);
  const Complex coarse = kernel(p5, 1.0, 0.0, spec(1e-9)).value;
  const Complex fine = kernel(p5, 1.0, 0.0, spec(1e-10)).value;
  CHECK(std::abs(coarse) < 1.0);
  CHECK(std::abs(coarse - fine) < 1e-8);

  CHECK(kernel(validate_params(4, kI), 1.0, 0.3, spec()).method == KernelMethod::rotated);
  CHECK(kernel(validate_params(4, Complex{-1, 1}), 1.0, 0.3, spec()).method ==
        KernelMethod::decaying);
  CHECK_THROWS_AS(kernel(validate_params(4, kI), 0.0, 0.3, spec()), Error);
}

TEST_CASE("kernel_table keeps order and matches pointwise evaluation") {
  const auto p4 = validate_params(4, kI);
  CHECK(kernel_table(p4, 1.0, std::vector<double>{}, spec()).empty());

  const auto one = kernel_table(validate_params(2, Complex{-0.5, 0}), 1.0,
                                std::vector<double>{0.0}, spec());
  REQUIRE(one.size() == 1);
  CHECK(std::abs(one[0].value.value - 1.0 / std::sqrt(2 * kPi)) < 1e-12);

  const auto pair = kernel_table(p4, 1.0, std::vector<double>{-1.0, 1.0}, spec());
  CHECK(std::abs(pair[0].value.value - pair[1].value.value) < 1e-10);

  std::vector<double> xs;
  for (int i = 0; i < 37; ++i) xs.push_back(-9.0 + 0.5 * i);
  const auto serial = kernel_table(p4, 1.0, xs, spec(), {}, 1);
  const auto parallel = kernel_table(p4, 1.0, xs, spec(), {}, 4);
  REQUIRE(serial.size() == xs.size());
  REQUIRE(parallel.size() == xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    CHECK(serial[i].value.x == xs[i]);
    CHECK(parallel[i].value.x == xs[i]);
    CHECK(serial[i].value.value == parallel[i].value.value);
  }
}

TEST_CASE("property: evenness for even p") {
  for (const Case& c : kAdmissible) {
    if (c.p % 2) continue;
    const auto params = validate_params(c.p, c.alpha);
    for (int i = 1; i <= 20; ++i) {
      const double x = 0.45 * i;
      CAPTURE(c.p);
      CAPTURE(x);
      CHECK(std::abs(kernel(params, 1.0, x, spec()).value - kernel(params, 1.0, -x, spec()).value) <
            1e-10);
    }
  }
}

TEST_CASE("property: conjugation alpha -> conj(alpha)") {
  // Even p: g is even, so conjugating alpha conjugates g. Odd p: g is real
  // and conjugating alpha reflects x.
  for (const Case& c : kAdmissible) {
    const auto params = validate_params(c.p, c.alpha);
    const auto conj = validate_params(c.p, std::conj(c.alpha));
    for (double x : {-6.0, -1.0, 0.0, 0.5, 3.0}) {
      CAPTURE(c.p);
      CAPTURE(x);
      const Complex g = kernel(params, 1.0, x, spec()).value;
      if (c.p % 2 == 0) {
        CHECK(std::abs(kernel(conj, 1.0, x, spec()).value - std::conj(g)) < 1e-12);
      } else {
        CHECK(std::abs(kernel(conj, 1.0, -x, spec()).value - g) < 1e-12);
        CHECK(std::abs(g.imag()) < 1e-12);
      }
    }
  }
}

TEST_CASE("property: scaling law") {
  for (const Case& c : kAdmissible) {
    const auto params = validate_params(c.p, c.alpha);
    for (double t : {0.25, 1.0, 4.0}) {
      const double s = std::pow(t, -1.0 / c.p);
      for (double x : {-1.5, -0.7, 0.0, 1.1, 2.0}) {
        CAPTURE(c.p);
        CAPTURE(t);
        CAPTURE(x);
        const Complex lhs = kernel(params, t, x, spec()).value;
        const Complex rhs = s * kernel(params, 1.0, x * s, spec()).value;
        CHECK(std::abs(lhs - rhs) <= 1e-8 * std::abs(rhs));
      }
    }
  }
}

TEST_CASE("property: decay at |x| = 30") {
  for (int p : {3, 4, 5, 6}) {
    for (double c : {1.0, -1.0}) {
      const auto params = validate_params(p, Complex{0, c});
      const double g0 = std::abs(kernel(params, 1.0, 0.0, spec()).value);
      CAPTURE(p);
      CAPTURE(c);
      CHECK(std::abs(kernel(params, 1.0, 30.0, spec()).value) < g0);
      CHECK(std::abs(kernel(params, 1.0, -30.0, spec()).value) < g0);
    }
  }
}

TEST_CASE("property: rotated contour vs a Riemann sum of the real-line integral") {
  // (1/2pi) int_{-R}^{R} exp(ikx + ik^4) dk by the midpoint rule, averaged
  // over R in [R0, 2 R0] to cancel the endpoint oscillation.
  const auto p4 = validate_params(4, kI);
  for (double x : {0.0, 1.0}) {
    const double R0 = 6.0;
    const int n = 4000000;
    const double h = 2.0 * R0 / n;
    // Cumulative sums over |k| <= r.
    Complex inner{};
    for (int i = 0; i < n / 2; ++i) {
      const double k = (i + 0.5) * h;
      inner += h * 2.0 * std::cos(k * x) * std::exp(kI * std::pow(k, 4));
    }
    Complex avg{};
    Complex running = inner;
    const int m = n / 2;
    for (int i = 0; i < m; ++i) {
      const double k = R0 + (i + 0.5) * h;
      running += h * 2.0 * std::cos(k * x) * std::exp(kI * std::pow(k, 4));
      avg += running;
    }
    avg /= double(m);
    const Complex reference = avg / (2 * kPi);
    CAPTURE(x);
    CHECK(std::abs(kernel_rotated(p4, 1.0, x, spec()).value - reference) < 1e-4);
  }
}
