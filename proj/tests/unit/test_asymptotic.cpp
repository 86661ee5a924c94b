#include <cmath>

#include "doctest.h"
#include "polyheat/error.hpp"
#include "polyheat/kernel.hpp"
#include "support/airy_oracle.hpp"

using namespace polyheat;

namespace {

constexpr Complex kI{0.0, 1.0};

quad::QuadSpec spec() {
  quad::QuadSpec s;
  s.abs_tol = 1e-15;
  s.rel_tol = 1e-12;
  return s;
}

}  // namespace

TEST_CASE("amplitude exponent") {
  CHECK(asymptotic_decay_exponent(4) == doctest::Approx(-1.0 / 3.0));
  CHECK(asymptotic_decay_exponent(3) == doctest::Approx(-0.25));
  CHECK(asymptotic_decay_exponent(2) == 0.0);
}

TEST_CASE("even p: modulus ratio under doubling x") {
  const auto p4 = validate_params(4, kI);
  for (double x : {5.0, 10.0, 37.0, -12.0}) {
    const double r = std::abs(kernel_asymptotic(p4, 1.0, 2 * x, 1.0).kernel.value) /
                     std::abs(kernel_asymptotic(p4, 1.0, x, 1.0).kernel.value);
    CHECK(r == doctest::Approx(std::pow(2.0, -1.0 / 3.0)).epsilon(1e-12));
  }
  // c < 0 is the mirror image.
  const auto p4m = validate_params(4, -kI);
  const Complex a = kernel_asymptotic(p4, 1.0, 9.0, 1.0).kernel.value;
  const Complex b = kernel_asymptotic(p4m, 1.0, 9.0, 1.0).kernel.value;
  CHECK(std::abs(b - std::conj(a)) < 1e-15);
}

TEST_CASE("odd p: envelope exponent on the stationary side") {
  const auto p3m = validate_params(3, -kI);
  for (double x : {20.0, 80.0}) {
    const AsymptoticValue a = kernel_asymptotic(p3m, 1.0, x, 1.0);
    const AsymptoticValue b = kernel_asymptotic(p3m, 1.0, 2 * x, 1.0);
    CHECK(a.regime == AsymptoticRegime::stationary_phase);
    CHECK(b.envelope / a.envelope == doctest::Approx(std::pow(2.0, -0.25)).epsilon(1e-12));
  }
}

TEST_CASE("odd p: leading term matches Airy asymptotics") {
  const auto p3 = validate_params(3, kI);
  for (double x : {-60.0, -300.0}) {
    const AsymptoticValue a = kernel_asymptotic(p3, 1.0, x, 1.0);
    const double exact = testing::airy_kernel(1.0, x);
    // The next correction is O(|x|^{-3/2}) relative to the envelope.
    CHECK(std::abs(a.kernel.value.real() - exact) < 2.0 * std::pow(std::abs(x), -1.5) * a.envelope);
    CHECK(a.kernel.value.imag() == 0.0);
  }
}

TEST_CASE("odd p: no real stationary point gives the decay flag") {
  const auto p3 = validate_params(3, kI);
  const AsymptoticValue a = kernel_asymptotic(p3, 1.0, 20.0, 1.0);
  CHECK(a.regime == AsymptoticRegime::super_polynomial_decay);
  CHECK(a.kernel.value == Complex{});
  const AsymptoticValue b = kernel_asymptotic(validate_params(3, -kI), 1.0, -20.0, 1.0);
  CHECK(b.regime == AsymptoticRegime::super_polynomial_decay);
  // The true kernel really is negligible there.
  CHECK(std::abs(testing::airy_kernel(1.0, 20.0)) < 1e-10);
}

TEST_CASE("asymptotic regime errors") {
  const auto p4 = validate_params(4, kI);
  try {
    kernel_asymptotic(p4, 1.0, 2.0, 4.5);
    FAIL("accepted |x| below the threshold");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::outside_asymptotic_regime);
  }
  CHECK_THROWS_AS(kernel_asymptotic(validate_params(4, -1.0), 1.0, 10.0, 1.0), Error);
}

TEST_CASE("calibrated threshold for p = 4, alpha = i") {
  const auto p4 = validate_params(4, kI);
  const Calibration cal = calibrate_asymptotic_threshold(p4, 1.0, spec());
  CHECK(cal.threshold == doctest::Approx(4.5));
  CHECK_FALSE(cal.sweep.empty());
  for (const auto& [x, ratio] : cal.sweep) {
    if (std::abs(x) >= cal.threshold) CHECK(std::abs(ratio - 1.0) <= 0.05);
  }
  const double xs = cal.threshold;
  const Complex q = kernel_rotated(p4, 1.0, xs, spec()).value;
  const Complex a = kernel_asymptotic(p4, 1.0, xs, xs).kernel.value;
  CHECK(std::abs(std::abs(a) / std::abs(q) - 1.0) < 0.05);

  const double slope = fitted_decay_exponent(p4, 1.0, xs, 2 * xs, spec());
  CHECK(std::abs(slope - asymptotic_decay_exponent(4)) < 0.05);
}

TEST_CASE("dispatcher substitutes the asymptotic value beyond the threshold") {
  const auto p4 = validate_params(4, kI);
  KernelOptions opts;
  opts.asymptotic_threshold = 4.5;
  CHECK(kernel(p4, 1.0, 10.0, spec(), opts).method == KernelMethod::asymptotic);
  CHECK(kernel(p4, 1.0, 1.0, spec(), opts).method == KernelMethod::rotated);
  // Super-polynomial side falls back to quadrature.
  const auto p3 = validate_params(3, kI);
  CHECK(kernel(p3, 1.0, 10.0, spec(), opts).method == KernelMethod::shifted);
}
