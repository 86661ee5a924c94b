#pragma once

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "polyheat/quad.hpp"

namespace polyheat {

using Complex = std::complex<double>;

// Order p and coefficient alpha of du/dt = (-i)^p alpha d^p u/dx^p.
struct EvolutionParams {
  int p = 2;
  Complex alpha{-0.5, 0.0};

  bool imaginary() const { return alpha.real() == 0.0; }
  double c() const { return alpha.imag(); }
};

/// Throws Error with code order_too_low, degenerate or inadmissible_alpha.
EvolutionParams validate_params(int p, Complex alpha);

enum class KernelMethod { decaying, rotated, shifted, asymptotic };

const char* method_name(KernelMethod m);

struct KernelValue {
  double x = 0.0;
  double t = 0.0;
  Complex value{};
  KernelMethod method = KernelMethod::decaying;
  double err_estimate = 0.0;
  bool converged = true;
};

/// Direct transform over [-R, R], R from the exp(Re(alpha) t k^p) tail
/// bound. p even, Re(alpha) < 0.
KernelValue kernel_decaying(const EvolutionParams& params, double t, double x,
                            const quad::QuadSpec& spec);

/// p even, alpha = ic. Integrates along k = k0 + exp(i sgn(c) pi/2p) s,
/// the rotated ray of the c > 0 / c < 0 representations translated to the
/// real stationary point k0 of the phase. k0 = 0 at x = 0.
KernelValue kernel_rotated(const EvolutionParams& params, double t, double x,
                           const quad::QuadSpec& spec);

struct ShiftOptions {
  // Forces the contour height Im z. Sign is not checked.
  std::optional<double> eta;
};

/// p odd, alpha = ic. Integrates along z = u + i eta with sgn(eta) = sgn(c).
double default_shift(const EvolutionParams& params, double t, double x);
KernelValue kernel_shifted(const EvolutionParams& params, double t, double x,
                           const quad::QuadSpec& spec,
                           const ShiftOptions& options = {});

enum class AsymptoticRegime { stationary_phase, super_polynomial_decay };

struct AsymptoticValue {
  KernelValue kernel;
  // Modulus of the leading term. For odd p the two real stationary points
  // give 2 A cos(...); this is 2 A.
  double envelope = 0.0;
  AsymptoticRegime regime = AsymptoticRegime::stationary_phase;
};

/// Leading stationary-phase term. Needs alpha = ic and |x| >= threshold.
AsymptoticValue kernel_asymptotic(const EvolutionParams& params, double t,
                                  double x, double threshold);

/// Exponent of |x| in the stationary-phase amplitude: (2-p)/(2(p-1)).
double asymptotic_decay_exponent(int p);

struct KernelOptions {
  // Beyond this |x| the dispatcher returns the asymptotic value
  // (alpha = ic only).
  std::optional<double> asymptotic_threshold;
};

KernelValue kernel(const EvolutionParams& params, double t, double x,
                   const quad::QuadSpec& spec, const KernelOptions& options = {});

struct KernelTableEntry {
  KernelValue value;
  std::optional<std::string> error;
};

/// Evaluates every point, keeping input order. Failures are stored per
/// entry. threads <= 0 picks the hardware concurrency.
std::vector<KernelTableEntry> kernel_table(const EvolutionParams& params,
                                           double t, std::span<const double> xs,
                                           const quad::QuadSpec& spec,
                                           const KernelOptions& options = {},
                                           int threads = 1);

/// Real stationary wavenumber (|x| / (p |alpha| t))^(1/(p-1)); also the
/// local oscillation rate of g at large |x|.
double stationary_wavenumber(const EvolutionParams& params, double t, double x);

/// Integral of exp(-i omega x) g_t(x) dx by quadrature of the kernel
/// (exactly exp(alpha t omega^p)). omega = 0 gives the total mass.
quad::QuadResult kernel_fourier(const EvolutionParams& params, double t,
                                double omega, const quad::QuadSpec& spec);

/// (g_t * g_s)(x) by quadrature, with oscillatory tails accelerated.
quad::QuadResult kernel_convolution(const EvolutionParams& params, double t,
                                    double s, double x,
                                    const quad::QuadSpec& spec);

struct CalibrationOptions {
  double x_min = 0.5;
  double x_max = 40.0;
  double step = 0.25;
  double band = 0.05;
};

struct Calibration {
  double threshold = 0.0;
  // (x, |g_quad| / |g_asym|) for even p; (x, |g_quad - g_asym| / envelope)
  // for odd p.
  std::vector<std::pair<double, double>> sweep;
};

/// Smallest grid point x* on the stationary side after which the asymptotic
/// term stays within the band of quadrature. Throws unconverged if none.
Calibration calibrate_asymptotic_threshold(const EvolutionParams& params,
                                           double t,
                                           const quad::QuadSpec& spec,
                                           const CalibrationOptions& opts = {});

/// Least-squares slope of log|g| against log|x| over `points` log-spaced
/// points of [x1, x2] (same sign).
double fitted_decay_exponent(const EvolutionParams& params, double t, double x1,
                             double x2, const quad::QuadSpec& spec, int points = 41);

}  // namespace polyheat
