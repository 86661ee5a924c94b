#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace polyheat::quad {

using Complex = std::complex<double>;
using Integrand = std::function<Complex(double)>;

/// Local phase rate |dphi/dx| of an oscillatory integrand, used to size
/// panels and tail chunks. Must be positive wherever it is queried.
using PhaseRate = std::function<double(double)>;

struct QuadSpec {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  int max_subdivisions = 1 << 16;
  std::optional<double> truncation_radius_override;

  /// Throws polyheat::Error(invalid_argument) on a non-positive tolerance or
  /// budget.
  void validate() const;

  QuadSpec refined(double factor) const {
    QuadSpec s = *this;
    s.abs_tol *= factor;
    s.rel_tol *= factor;
    return s;
  }
};

struct QuadResult {
  Complex value{};
  double err_estimate = 0.0;
  bool converged = true;
  int subdivisions = 0;
};

/// Globally adaptive 7/15-point Gauss-Kronrod integration of a complex
/// integrand on [a, b]. A positive `frequency_hint` caps the initial panel
/// width at 2*pi/frequency_hint. Exhausting the subdivision budget is not an
/// error: the best value comes back with converged == false.
QuadResult integrate_interval(const Integrand& f, double a, double b,
                              const QuadSpec& spec,
                              double frequency_hint = 0.0);

/// Same as integrate_interval but forces panel boundaries at the given
/// increasing points (first and last are the integration limits).
QuadResult integrate_breakpoints(const Integrand& f,
                                 std::span<const double> points,
                                 const QuadSpec& spec,
                                 double frequency_hint = 0.0);

struct TruncationRadius {
  double radius = 0.0;
  bool capped = false;
};

/// Smallest R (up to bisection accuracy) with
///   2 exp(-c t R^p) / (c t p R^(p-1)) <= tol,
/// the one-step integration-by-parts bound on the two tails of
/// exp(-c t |k|^p). Capped at max_radius.
TruncationRadius truncation_radius(int p, double c, double t, double tol,
                                   double max_radius = 1e6);

/// Integral of f over [a, +inf) (direction = +1) or (-inf, a]
/// (direction = -1). The half line is cut into chunks spanning half a local
/// period of `rate`; the partial sums are extrapolated with Wynn's epsilon
/// algorithm. Handles slowly decaying oscillatory tails as well as
/// exponentially decaying ones.
QuadResult integrate_tail(const Integrand& f, double a, int direction,
                          const PhaseRate& rate, const QuadSpec& spec,
                          int max_chunks = 4000);

/// Wynn epsilon extrapolation of a sequence of partial sums. Returns the
/// bottom entry of the even column whose last two entries agree best, with
/// their difference as the error estimate.
struct Extrapolation {
  Complex value{};
  double err_estimate = 0.0;
};
Extrapolation wynn_epsilon(std::span<const Complex> partial_sums);

/// m-point Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussRule gauss_legendre(int m);

/// (f * g)(x) = integral f(x - y) g(y) dy over y in [x - window, x + window].
///
/// Without `tail_rate`, both endpoint magnitudes |f(x-y) g(y)| must be below
/// spec.abs_tol, otherwise Error(window_too_small) is thrown. With
/// `tail_rate`, the two half lines beyond the window are added with
/// integrate_tail instead.
QuadResult convolve(const Integrand& f, const Integrand& g, double x,
                    double window, const QuadSpec& spec,
                    const PhaseRate* tail_rate = nullptr);

}  // namespace polyheat::quad
