#include "polyheat/kernel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <thread>

#include "polyheat/error.hpp"

namespace polyheat {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr Complex kI{0.0, 1.0};

void check_time(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw Error(ErrorCode::invalid_argument, "time must be positive and finite");
  }
}

double sgn(double v) { return v < 0.0 ? -1.0 : 1.0; }

Complex ipow(Complex z, int p) {
  Complex r = 1.0;
  for (int i = 0; i < p; ++i) r *= z;
  return r;
}

KernelValue make_value(double x, double t, KernelMethod m,
                       const quad::QuadResult& r, double scale) {
  KernelValue v;
  v.x = x;
  v.t = t;
  v.value = r.value * scale;
  v.err_estimate = r.err_estimate * std::abs(scale);
  v.method = m;
  v.converged = r.converged;
  return v;
}

}  // namespace

EvolutionParams validate_params(int p, Complex alpha) {
  if (p < 2) {
    throw Error(ErrorCode::order_too_low,
                "order too low: p = " + std::to_string(p) + ", need p >= 2");
  }
  if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag())) {
    throw Error(ErrorCode::invalid_argument, "alpha must be finite");
  }
  if (alpha == Complex{}) {
    throw Error(ErrorCode::degenerate, "degenerate: alpha = 0");
  }
  if (p % 2 == 1 && alpha.real() != 0.0) {
    throw Error(ErrorCode::inadmissible_alpha,
                "inadmissible alpha: odd p requires Re(alpha) = 0");
  }
  if (p % 2 == 0 && alpha.real() > 0.0) {
    throw Error(ErrorCode::inadmissible_alpha,
                "inadmissible alpha: even p requires Re(alpha) <= 0");
  }
  return EvolutionParams{p, alpha};
}

const char* method_name(KernelMethod m) {
  switch (m) {
    case KernelMethod::decaying: return "decaying";
    case KernelMethod::rotated: return "rotated";
    case KernelMethod::shifted: return "shifted";
    case KernelMethod::asymptotic: return "asymptotic";
  }
  return "unknown";
}

double stationary_wavenumber(const EvolutionParams& params, double t, double x) {
  const int p = params.p;
  return std::pow(std::abs(x) / (p * std::abs(params.alpha) * t), 1.0 / (p - 1));
}

KernelValue kernel_decaying(const EvolutionParams& params, double t, double x,
                            const quad::QuadSpec& spec) {
  validate_params(params.p, params.alpha);
  check_time(t);
  spec.validate();
  if (params.p % 2 != 0 || !(params.alpha.real() < 0.0)) {
    throw Error(ErrorCode::invalid_argument,
                "kernel_decaying needs even p and Re(alpha) < 0");
  }
  const int p = params.p;
  const Complex at = params.alpha * t;
  const double c = -params.alpha.real();
  const double radius =
      spec.truncation_radius_override
          ? *spec.truncation_radius_override
          : quad::truncation_radius(p, c, t, 0.1 * spec.abs_tol * 2.0 * kPi).radius;
  // The symbol is even in k, so only the cosine part survives.
  const quad::Integrand f = [&](double k) {
    return std::cos(k * x) * std::exp(at * std::pow(k, p));
  };
  const double hint = std::abs(x) + std::abs(params.alpha.imag()) * t * p *
                                        std::pow(radius, p - 1) / 4.0;
  const quad::QuadResult r =
      quad::integrate_interval(f, 0.0, radius, spec.refined(kPi), hint);
  KernelValue v = make_value(x, t, KernelMethod::decaying, r, 1.0 / kPi);
  if (!spec.truncation_radius_override) v.err_estimate += 0.1 * spec.abs_tol;
  return v;
}

KernelValue kernel_rotated(const EvolutionParams& params, double t, double x,
                           const quad::QuadSpec& spec) {
  validate_params(params.p, params.alpha);
  check_time(t);
  spec.validate();
  if (params.p % 2 != 0 || !params.imaginary()) {
    throw Error(ErrorCode::invalid_argument,
                "kernel_rotated needs even p and Re(alpha) = 0");
  }
  const int p = params.p;
  const double c = params.c();
  const double ac = std::abs(c);
  const double theta = sgn(c) * kPi / (2.0 * p);
  const Complex dir = std::polar(1.0, theta);
  const double k0 = -sgn(x) * sgn(c) * stationary_wavenumber(params, t, x);
  const Complex ict = kI * c * t;
  const quad::Integrand f = [&](double s) {
    const Complex k = k0 + dir * s;
    return std::exp(kI * x * k + ict * ipow(k, p));
  };

  const double width =
      k0 == 0.0 ? std::numeric_limits<double>::infinity()
                : 1.0 / std::sqrt(ac * t * p * (p - 1) * std::pow(std::abs(k0), p - 2));
  double radius =
      spec.truncation_radius_override
          ? *spec.truncation_radius_override
          : quad::truncation_radius(p, ac, t, 1e-3 * spec.abs_tol).radius;
  const double thr =
      1e-3 * std::max(spec.abs_tol * 2.0 * kPi,
                      spec.rel_tol * std::min(width, radius));
  if (!spec.truncation_radius_override) {
    for (int it = 0; it < 200; ++it) {
      if (std::max(std::abs(f(radius)), std::abs(f(-radius))) <= thr) break;
      radius *= 1.25;
    }
  }
  std::vector<double> pts = {-radius};
  for (double m : {-16.0, -4.0, -1.0, 1.0, 4.0, 16.0}) {
    const double b = m * width;
    if (std::isfinite(b) && b > pts.back() && b < radius) pts.push_back(b);
  }
  pts.push_back(radius);
  const quad::QuadResult r =
      quad::integrate_breakpoints(f, pts, spec.refined(2.0 * kPi));
  KernelValue v = make_value(x, t, KernelMethod::rotated, r, 1.0 / (2.0 * kPi));
  v.value *= dir;
  return v;
}

double default_shift(const EvolutionParams& params, double t, double x) {
  const int p = params.p;
  const double c = params.c();
  double eta = std::min(std::pow(1.0 / (p * std::abs(c) * t), 1.0 / (p - 1)), 1.0);
  if (x * c > 0.0) {
    // No real stationary point: lift the contour to the complex saddle.
    const double height =
        stationary_wavenumber(params, t, x) * std::sin(kPi / (p - 1));
    eta = std::max(eta, height);
  } else if (x != 0.0) {
    // exp(-x z) grows like exp(|x| eta) on this side.
    eta = std::min(eta, 1.0 / std::abs(x));
  }
  return sgn(c) * eta;
}

KernelValue kernel_shifted(const EvolutionParams& params, double t, double x,
                           const quad::QuadSpec& spec,
                           const ShiftOptions& options) {
  validate_params(params.p, params.alpha);
  check_time(t);
  spec.validate();
  if (params.p % 2 != 1) {
    throw Error(ErrorCode::invalid_argument, "kernel_shifted needs odd p");
  }
  const int p = params.p;
  const Complex ict = kI * params.c() * t;
  double eta = options.eta ? *options.eta : default_shift(params, t, x);

  for (int attempt = 0; attempt < 8; ++attempt) {
    const quad::Integrand f = [&](double u) {
      const Complex z{u, eta};
      return std::exp(kI * x * z + ict * ipow(z, p));
    };
    const double peak = std::abs(f(0.0));
    const double thr = 1e-3 * std::max(spec.abs_tol * 2.0 * kPi, spec.rel_tol * peak);
    double radius = 1.0;
    bool found = false;
    bool diverging = false;
    while (radius < 1e6) {
      const double lo = std::abs(f(-radius));
      const double hi = std::abs(f(radius));
      const double lo_next = std::abs(f(-1.5 * radius));
      const double hi_next = std::abs(f(1.5 * radius));
      if (!std::isfinite(lo_next) || !std::isfinite(hi_next) ||
          (radius > 64.0 && (lo_next > lo || hi_next > hi))) {
        diverging = true;
        break;
      }
      if (lo <= thr && hi <= thr && lo_next <= lo && hi_next <= hi) {
        found = true;
        break;
      }
      radius *= 1.5;
    }
    if (!found) {
      if (options.eta || diverging) {
        throw Error(ErrorCode::shift_too_small,
                    "shift too small: integrand on Im z = " + std::to_string(eta) +
                        " does not decay below abs_tol");
      }
      eta *= 2.0;
      continue;
    }
    std::vector<double> pts = {-radius};
    for (double b : {-0.25 * radius, 0.0, 0.25 * radius}) pts.push_back(b);
    pts.push_back(radius);
    const quad::QuadResult r =
        quad::integrate_breakpoints(f, pts, spec.refined(2.0 * kPi), std::abs(x));
    return make_value(x, t, KernelMethod::shifted, r, 1.0 / (2.0 * kPi));
  }
  throw Error(ErrorCode::shift_too_small,
              "shift too small: no admissible contour height found");
}

double asymptotic_decay_exponent(int p) {
  return (2.0 - p) / (2.0 * (p - 1));
}

AsymptoticValue kernel_asymptotic(const EvolutionParams& params, double t,
                                  double x, double threshold) {
  validate_params(params.p, params.alpha);
  check_time(t);
  if (!params.imaginary()) {
    throw Error(ErrorCode::invalid_argument,
                "asymptotic formulas need Re(alpha) = 0");
  }
  if (!(std::abs(x) >= threshold) || x == 0.0) {
    throw Error(ErrorCode::outside_asymptotic_regime,
                "outside asymptotic regime: |x| = " + std::to_string(std::abs(x)) +
                    " below threshold " + std::to_string(threshold));
  }
  const int p = params.p;
  const double c = params.c();
  const double pct = p * std::abs(c) * t;
  const double ax = std::abs(x);
  const double lambda = std::pow(ax, double(p) / (p - 1));
  const double xi0 = std::pow(1.0 / pct, 1.0 / (p - 1));
  const double amp = std::pow(ax, asymptotic_decay_exponent(p)) /
                     std::sqrt(2.0 * kPi) / std::sqrt(p - 1.0) /
                     std::pow(pct, 1.0 / (2.0 * (p - 1)));
  const double phase = lambda * xi0 * (p - 1.0) / p;

  AsymptoticValue out;
  out.kernel.x = x;
  out.kernel.t = t;
  out.kernel.method = KernelMethod::asymptotic;
  if (p % 2 == 0) {
    out.kernel.value = amp * std::polar(1.0, sgn(c) * (kPi / 4.0 - phase));
    out.envelope = amp;
  } else if (x * c < 0.0) {
    out.kernel.value = 2.0 * amp * std::cos(phase - kPi / 4.0);
    out.envelope = 2.0 * amp;
  } else {
    out.regime = AsymptoticRegime::super_polynomial_decay;
  }
  return out;
}

KernelValue kernel(const EvolutionParams& params, double t, double x,
                   const quad::QuadSpec& spec, const KernelOptions& options) {
  validate_params(params.p, params.alpha);
  if (options.asymptotic_threshold && params.imaginary() && x != 0.0 &&
      std::abs(x) >= *options.asymptotic_threshold) {
    const AsymptoticValue a =
        kernel_asymptotic(params, t, x, *options.asymptotic_threshold);
    if (a.regime == AsymptoticRegime::stationary_phase) return a.kernel;
  }
  if (!params.imaginary()) return kernel_decaying(params, t, x, spec);
  if (params.p % 2 == 0) return kernel_rotated(params, t, x, spec);
  return kernel_shifted(params, t, x, spec);
}

std::vector<KernelTableEntry> kernel_table(const EvolutionParams& params,
                                           double t, std::span<const double> xs,
                                           const quad::QuadSpec& spec,
                                           const KernelOptions& options,
                                           int threads) {
  std::vector<KernelTableEntry> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    out[i].value.x = xs[i];
    out[i].value.t = t;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < xs.size(); i = next++) {
      try {
        if (!std::isfinite(xs[i])) {
          throw Error(ErrorCode::invalid_argument, "x must be finite");
        }
        out[i].value = kernel(params, t, xs[i], spec, options);
      } catch (const std::exception& e) {
        out[i].error = e.what();
      }
    }
  };
  unsigned n = threads > 0 ? unsigned(threads) : std::thread::hardware_concurrency();
  n = std::max(1u, std::min<unsigned>(n, unsigned(xs.size())));
  if (n <= 1) {
    worker();
    return out;
  }
  std::vector<std::jthread> pool;
  for (unsigned i = 0; i < n; ++i) pool.emplace_back(worker);
  return out;
}

namespace {

quad::QuadSpec inner_spec(const quad::QuadSpec& spec) {
  quad::QuadSpec s = spec;
  s.abs_tol = std::max(1e-15, spec.abs_tol * 1e-3);
  s.rel_tol = std::max(1e-14, spec.rel_tol * 1e-3);
  s.truncation_radius_override.reset();
  return s;
}

double kernel_scale(const EvolutionParams& params, double t) {
  return std::pow(std::abs(params.alpha) * t, 1.0 / params.p);
}

}  // namespace

quad::QuadResult kernel_fourier(const EvolutionParams& params, double t,
                                double omega, const quad::QuadSpec& spec) {
  validate_params(params.p, params.alpha);
  check_time(t);
  spec.validate();
  const quad::QuadSpec ks = inner_spec(spec);
  const quad::Integrand f = [&](double x) {
    return std::exp(-kI * omega * x) * kernel(params, t, x, ks).value;
  };
  const int p = params.p;
  // Past 2 x_s, with x_s the point where the kernel's local wavenumber equals
  // omega, the integrand has no stationary point left.
  const double x_s = p * std::abs(params.alpha) * t * std::pow(std::abs(omega), p - 1);
  const double edge = std::max({8.0 * kernel_scale(params, t), 2.0 * x_s, 4.0});
  const double floor_rate = 1.0 / kernel_scale(params, t);
  const quad::PhaseRate rate = [&](double x) {
    return std::max(stationary_wavenumber(params, t, x), floor_rate);
  };
  const std::array<double, 3> pts = {-edge, 0.0, edge};
  quad::QuadResult out = quad::integrate_breakpoints(
      f, pts, spec, stationary_wavenumber(params, t, edge) + std::abs(omega));
  for (int dir : {-1, 1}) {
    const quad::QuadResult tail = quad::integrate_tail(f, dir * edge, dir, rate, spec);
    out.value += tail.value;
    out.err_estimate += tail.err_estimate;
    out.converged = out.converged && tail.converged;
    out.subdivisions += tail.subdivisions;
  }
  return out;
}

quad::QuadResult kernel_convolution(const EvolutionParams& params, double t,
                                    double s, double x,
                                    const quad::QuadSpec& spec) {
  validate_params(params.p, params.alpha);
  check_time(t);
  check_time(s);
  const quad::QuadSpec ks = inner_spec(spec);
  const quad::Integrand gs = [&](double y) { return kernel(params, s, y, ks).value; };
  const quad::Integrand gt = [&](double y) { return kernel(params, t, y, ks).value; };
  const double scale = std::max(kernel_scale(params, t), kernel_scale(params, s));
  const double window = std::max(8.0 * scale, 2.0 * std::abs(x) + 4.0);
  const double floor_rate = 1.0 / scale;
  const quad::PhaseRate rate = [&](double y) {
    return std::max(stationary_wavenumber(params, t, y) +
                        stationary_wavenumber(params, s, y - x),
                    floor_rate);
  };
  return quad::convolve(gs, gt, x, window, spec, &rate);
}

Calibration calibrate_asymptotic_threshold(const EvolutionParams& params,
                                           double t,
                                           const quad::QuadSpec& spec,
                                           const CalibrationOptions& opts) {
  validate_params(params.p, params.alpha);
  if (!params.imaginary()) {
    throw Error(ErrorCode::invalid_argument, "calibration needs Re(alpha) = 0");
  }
  if (!(opts.step > 0.0) || !(opts.x_max > opts.x_min) || !(opts.x_min > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "bad calibration sweep");
  }
  // Odd p: the stationary side is sgn(x) = -sgn(c).
  const double side = params.p % 2 == 1 ? -sgn(params.c()) : 1.0;
  Calibration cal;
  for (double x = opts.x_min; x <= opts.x_max + 1e-12; x += opts.step) {
    const double xs = side * x;
    const Complex q = kernel(params, t, xs, spec).value;
    const AsymptoticValue a = kernel_asymptotic(params, t, xs, 0.0);
    const double m = params.p % 2 == 0 ? std::abs(q) / std::abs(a.kernel.value)
                                       : std::abs(q - a.kernel.value) / a.envelope;
    cal.sweep.emplace_back(x, m);
  }
  const double lo = params.p % 2 == 0 ? 1.0 - opts.band : -1.0;
  const double hi = params.p % 2 == 0 ? 1.0 + opts.band : opts.band;
  std::optional<double> threshold;
  for (auto it = cal.sweep.rbegin(); it != cal.sweep.rend(); ++it) {
    if (it->second < lo || it->second > hi) break;
    threshold = it->first;
  }
  if (!threshold || *threshold >= cal.sweep.back().first) {
    throw Error(ErrorCode::unconverged,
                "asymptotic term never settles within the band on the sweep");
  }
  cal.threshold = *threshold;
  return cal;
}

double fitted_decay_exponent(const EvolutionParams& params, double t, double x1,
                             double x2, const quad::QuadSpec& spec, int points) {
  if (points < 2 || !(x1 * x2 > 0.0) || x1 == x2) {
    throw Error(ErrorCode::invalid_argument, "decay fit needs two same-sign endpoints");
  }
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (int i = 0; i < points; ++i) {
    const double x = x1 * std::pow(x2 / x1, double(i) / (points - 1));
    const double lx = std::log(std::abs(x));
    const double ly = std::log(std::abs(kernel(params, t, x, spec).value));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (points * sxy - sx * sy) / (points * sxx - sx * sx);
}

}  // namespace polyheat
