#include "polyheat/quad.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <string>
#include <vector>

#include "polyheat/error.hpp"

namespace polyheat::quad {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kPi = std::numbers::pi;

// Kronrod abscissae on [0, 1]; odd indices are the 7-point Gauss nodes.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a;
  double b;
  Complex value;
  double err;
  bool operator<(const Panel& o) const { return err < o.err; }
};

Panel gauss_kronrod(const Integrand& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const Complex fc = f(center);
  Complex resk = fc * kWgk[7];
  Complex resg = fc * kWg[3];
  double resabs = std::abs(fc) * kWgk[7];
  std::array<Complex, 7> fv1{};
  std::array<Complex, 7> fv2{};
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    fv1[j] = f(center - dx);
    fv2[j] = f(center + dx);
    const Complex sum = fv1[j] + fv2[j];
    resk += kWgk[j] * sum;
    resabs += kWgk[j] * (std::abs(fv1[j]) + std::abs(fv2[j]));
    if (j % 2 == 1) resg += kWg[j / 2] * sum;
  }
  const Complex reskh = resk * 0.5;
  double resasc = kWgk[7] * std::abs(fc - reskh);
  for (int j = 0; j < 7; ++j) {
    resasc += kWgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));
  }
  const double scale = std::abs(half);
  resasc *= scale;
  resabs *= scale;
  double err = std::abs((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  if (resabs > std::numeric_limits<double>::min() / (50.0 * kEps)) {
    err = std::max(50.0 * kEps * resabs, err);
  }
  if (!std::isfinite(err) || !std::isfinite(resk.real()) ||
      !std::isfinite(resk.imag())) {
    throw Error(ErrorCode::invalid_argument,
                "non-finite integrand on [" + std::to_string(a) + ", " +
                    std::to_string(b) + "]");
  }
  return Panel{a, b, resk * half, err};
}

QuadResult adaptive(const Integrand& f, std::vector<double> cuts,
                    const QuadSpec& spec) {
  std::priority_queue<Panel> heap;
  Complex total{};
  double total_err = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    Panel p = gauss_kronrod(f, cuts[i], cuts[i + 1]);
    total += p.value;
    total_err += p.err;
    heap.push(p);
  }
  int splits = 0;
  bool stuck = false;
  while (total_err > std::max(spec.abs_tol, spec.rel_tol * std::abs(total))) {
    if (splits >= spec.max_subdivisions || heap.empty()) break;
    Panel worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b) ||
        (worst.b - worst.a) <
            64.0 * kEps * std::max(std::abs(worst.a), std::abs(worst.b))) {
      stuck = true;
      break;
    }
    heap.pop();
    Panel left = gauss_kronrod(f, worst.a, mid);
    Panel right = gauss_kronrod(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_err += left.err + right.err - worst.err;
    heap.push(left);
    heap.push(right);
    ++splits;
  }

  // Re-add from scratch to drop the running-sum drift.
  std::vector<Panel> panels;
  panels.reserve(heap.size());
  while (!heap.empty()) {
    panels.push_back(heap.top());
    heap.pop();
  }
  std::sort(panels.begin(), panels.end(),
            [](const Panel& l, const Panel& r) { return l.a < r.a; });
  QuadResult out;
  for (const Panel& p : panels) {
    out.value += p.value;
    out.err_estimate += p.err;
  }
  out.subdivisions = splits;
  out.converged =
      !stuck && out.err_estimate <=
                    std::max(spec.abs_tol, spec.rel_tol * std::abs(out.value));
  return out;
}

std::vector<double> initial_cuts(std::span<const double> points,
                                 double frequency_hint, int budget) {
  std::vector<double> cuts;
  cuts.push_back(points.front());
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    const double a = points[i];
    const double b = points[i + 1];
    int n = 1;
    if (frequency_hint > 0.0) {
      const double panels = std::ceil((b - a) * frequency_hint / (2.0 * kPi));
      n = static_cast<int>(std::clamp(panels, 1.0, double(std::max(1, budget))));
    }
    for (int k = 1; k < n; ++k) cuts.push_back(a + (b - a) * k / n);
    cuts.push_back(b);
  }
  return cuts;
}

}  // namespace

void QuadSpec::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || max_subdivisions < 1) {
    throw Error(ErrorCode::invalid_argument,
                "invalid quadrature spec: tolerances must be positive and "
                "max_subdivisions >= 1");
  }
  if (truncation_radius_override && !(*truncation_radius_override > 0.0)) {
    throw Error(ErrorCode::invalid_argument,
                "invalid quadrature spec: truncation radius override must be "
                "positive");
  }
}

QuadResult integrate_interval(const Integrand& f, double a, double b,
                              const QuadSpec& spec, double frequency_hint) {
  const std::array<double, 2> pts = {a, b};
  return integrate_breakpoints(f, pts, spec, frequency_hint);
}

QuadResult integrate_breakpoints(const Integrand& f,
                                 std::span<const double> points,
                                 const QuadSpec& spec, double frequency_hint) {
  spec.validate();
  if (points.size() < 2) {
    throw Error(ErrorCode::invalid_argument, "need at least two breakpoints");
  }
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (!(points[i] < points[i + 1]) || !std::isfinite(points[i + 1])) {
      throw Error(ErrorCode::invalid_argument,
                  "integration limits must be finite and increasing");
    }
  }
  if (!std::isfinite(points.front())) {
    throw Error(ErrorCode::invalid_argument, "integration limits must be finite");
  }
  return adaptive(f, initial_cuts(points, frequency_hint, spec.max_subdivisions / 2),
                  spec);
}

TruncationRadius truncation_radius(int p, double c, double t, double tol,
                                   double max_radius) {
  if (p < 1 || !(c > 0.0) || !(t > 0.0) || !(tol > 0.0)) {
    throw Error(ErrorCode::invalid_argument,
                "truncation_radius needs p >= 1 and positive c, t, tol");
  }
  const double ctp = c * t * p;
  const double log_tol = std::log(tol);
  auto log_bound = [&](double r) {
    return std::log(2.0) - c * t * std::pow(r, p) - std::log(ctp) -
           (p - 1) * std::log(r);
  };
  double hi = 1.0;
  double lo = 0.0;
  while (log_bound(hi) > log_tol) {
    lo = hi;
    hi *= 2.0;
    if (hi >= max_radius) {
      if (log_bound(max_radius) > log_tol) return {max_radius, true};
      hi = max_radius;
      break;
    }
  }
  // log_bound is decreasing; keep hi on the admissible side.
  for (int it = 0; it < 100 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= 0.0 || log_bound(mid) > log_tol) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return {hi, false};
}

Extrapolation wynn_epsilon(std::span<const Complex> s) {
  Extrapolation out;
  if (s.empty()) return out;
  out.value = s.back();
  out.err_estimate = s.size() >= 2 ? std::abs(s.back() - s[s.size() - 2])
                                   : std::numeric_limits<double>::infinity();
  std::vector<Complex> prev(s.size() + 1, Complex{});
  std::vector<Complex> cur(s.begin(), s.end());
  int column = 0;
  while (cur.size() > 1) {
    std::vector<Complex> next;
    next.reserve(cur.size() - 1);
    for (std::size_t j = 0; j + 1 < cur.size(); ++j) {
      const Complex d = cur[j + 1] - cur[j];
      const double scale = std::max(std::abs(cur[j + 1]), std::abs(cur[j]));
      if (std::abs(d) <= 4.0 * kEps * scale) return out;
      next.push_back(prev[j + 1] + 1.0 / d);
    }
    prev = std::move(cur);
    cur = std::move(next);
    ++column;
    if (column % 2 == 0 && cur.size() >= 2) {
      const double diff = std::abs(cur.back() - cur[cur.size() - 2]);
      if (std::isfinite(diff) && diff < out.err_estimate) {
        out.value = cur.back();
        out.err_estimate = diff;
      }
    }
  }
  return out;
}

QuadResult integrate_tail(const Integrand& f, double a, int direction,
                          const PhaseRate& rate, const QuadSpec& spec,
                          int max_chunks) {
  spec.validate();
  if (direction != 1 && direction != -1) {
    throw Error(ErrorCode::invalid_argument, "tail direction must be +1 or -1");
  }
  constexpr std::size_t kWindow = 24;
  const QuadSpec chunk_spec = spec.refined(1e-2);

  std::vector<Complex> partial;
  Complex sum{};
  double chunk_err = 0.0;
  double x = a;
  int quiet = 0;
  Extrapolation prev{};
  int agree = 0;
  QuadResult out;
  out.converged = false;

  for (int j = 0; j < max_chunks; ++j) {
    double h = kPi / rate(x);
    h = kPi / rate(x + direction * 0.5 * h);
    if (!(h > 0.0) || !std::isfinite(h)) {
      throw Error(ErrorCode::invalid_argument, "tail phase rate must be positive");
    }
    const double next = x + direction * h;
    const double lo = std::min(x, next);
    const double hi = std::max(x, next);
    const QuadResult chunk = integrate_interval(f, lo, hi, chunk_spec, rate(x));
    out.subdivisions += chunk.subdivisions;
    chunk_err += chunk.err_estimate;
    sum += chunk.value;
    partial.push_back(sum);
    x = next;

    const double target = std::max(spec.abs_tol, spec.rel_tol * std::abs(sum));
    quiet = std::abs(chunk.value) <= 1e-3 * target ? quiet + 1 : 0;
    if (quiet >= 3) {
      out.value = sum;
      out.err_estimate = chunk_err;
      out.converged = true;
      return out;
    }
    if (partial.size() < 6) continue;
    const std::size_t first = partial.size() > kWindow ? partial.size() - kWindow : 0;
    const Extrapolation ext = wynn_epsilon(
        std::span<const Complex>(partial).subspan(first));
    const double step = std::abs(ext.value - prev.value);
    agree = (step <= target && ext.err_estimate <= target) ? agree + 1 : 0;
    prev = ext;
    if (agree >= 2) {
      out.value = ext.value;
      out.err_estimate = std::max(step, ext.err_estimate) + chunk_err;
      out.converged = true;
      return out;
    }
  }
  out.value = prev.value;
  out.err_estimate = prev.err_estimate + chunk_err;
  return out;
}

GaussRule gauss_legendre(int m) {
  if (m < 1) throw Error(ErrorCode::invalid_argument, "Gauss rule needs m >= 1");
  GaussRule r;
  r.nodes.resize(m);
  r.weights.resize(m);
  for (int i = 0; i < (m + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (m + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= m; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (m == 1) p0 = 1.0;
      dp = m * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    r.nodes[i] = -x;
    r.nodes[m - 1 - i] = x;
    r.weights[i] = r.weights[m - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

QuadResult convolve(const Integrand& f, const Integrand& g, double x,
                    double window, const QuadSpec& spec,
                    const PhaseRate* tail_rate) {
  if (!(window > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "convolution window must be positive");
  }
  const Integrand product = [&](double y) { return f(x - y) * g(y); };
  const double lo = x - window;
  const double hi = x + window;
  if (tail_rate == nullptr) {
    const double edge = std::max(std::abs(product(lo)), std::abs(product(hi)));
    if (edge > spec.abs_tol) {
      throw Error(ErrorCode::window_too_small,
                  "window too small: integrand magnitude " + std::to_string(edge) +
                      " at the window edge exceeds abs_tol");
    }
  }
  std::vector<double> pts = {lo};
  for (double b : {std::min(0.0, x), std::max(0.0, x)}) {
    if (b > pts.back() && b < hi) pts.push_back(b);
  }
  pts.push_back(hi);
  QuadResult out = integrate_breakpoints(product, pts, spec);
  if (tail_rate != nullptr) {
    const QuadResult right = integrate_tail(product, hi, +1, *tail_rate, spec);
    const QuadResult left = integrate_tail(product, lo, -1, *tail_rate, spec);
    out.value += right.value + left.value;
    out.err_estimate += right.err_estimate + left.err_estimate;
    out.converged = out.converged && right.converged && left.converged;
    out.subdivisions += right.subdivisions + left.subdivisions;
  }
  return out;
}

}  // namespace polyheat::quad
