#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include "polyheat/dyson.hpp"
#include "polyheat/error.hpp"
#include "polyheat/quad.hpp"

namespace polyheat {

namespace {

// One atom tuple (y0, z_1..z_n): coefficient a0 v_1...v_n, cumulative
// frequencies Y_0..Y_n and rates lambda_k = alpha Y_k^p.
struct Path {
  Complex coeff;
  double freq = 0.0;
  std::vector<Complex> lambda;
};

std::vector<Path> enumerate_paths(const PlaneWaveState& u0, const PlaneWaveState& V,
                                  int n, const EvolutionParams& params,
                                  std::size_t cap) {
  const double count = double(u0.size()) * std::pow(double(V.size()), n);
  if (count > double(cap)) {
    throw Error(ErrorCode::state_explosion,
                "state explosion: " + std::to_string(static_cast<long long>(count)) +
                    " atom tuples at order " + std::to_string(n) +
                    " exceed the cap of " + std::to_string(cap));
  }
  std::vector<Path> out;
  Path cur;
  std::function<void(int, double)> rec = [&](int k, double y) {
    cur.lambda.push_back(params.alpha * std::pow(y, params.p));
    if (k == n) {
      cur.freq = y;
      out.push_back(cur);
    } else {
      const Complex saved = cur.coeff;
      for (const Wave& v : V.waves()) {
        cur.coeff = saved * v.a;
        rec(k + 1, y + v.y);
      }
      cur.coeff = saved;
    }
    cur.lambda.pop_back();
  };
  for (const Wave& u : u0.waves()) {
    cur.coeff = u.a;
    rec(0, u.y);
  }
  return out;
}

// exp(sum_{k=0}^{n} (s_{k+1} - s_k) lambda_k), s_0 = 0, s_{n+1} = t, for
// ascending s.
Complex path_exponential(const std::vector<Complex>& lambda, const double* s, int n,
                         double t) {
  Complex e{};
  double prev = 0.0;
  for (int k = 0; k < n; ++k) {
    e += (s[k] - prev) * lambda[k];
    prev = s[k];
  }
  e += (t - prev) * lambda[n];
  return std::exp(e);
}

double oscillation(const std::vector<Complex>& lambda) {
  double r = 0.0;
  for (std::size_t k = 1; k < lambda.size(); ++k) r += std::abs(lambda[k] - lambda[k - 1]);
  return r;
}

double max_rate(const std::vector<Complex>& lambda) {
  double r = 0.0;
  for (const Complex& l : lambda) r = std::max(r, std::abs(l));
  return r;
}

// Duffy map: s_n = t u_n, s_k = s_{k+1} u_k, Jacobian prod s_{k+1}.
Complex simplex_duffy(const std::vector<Complex>& lambda, double t, int m) {
  const int n = static_cast<int>(lambda.size()) - 1;
  const quad::GaussRule rule = quad::gauss_legendre(m);
  std::vector<double> u(m);
  std::vector<double> w(m);
  for (int a = 0; a < m; ++a) {
    u[a] = 0.5 * (rule.nodes[a] + 1.0);
    w[a] = 0.5 * rule.weights[a];
  }
  // Exponent accumulated from the top: (s_{k+1} - s_k) lambda_k.
  std::function<Complex(int, double, Complex)> rec = [&](int k, double upper,
                                                         Complex expo) -> Complex {
    if (k == 0) return std::exp(expo + upper * lambda[0]);
    Complex sum{};
    for (int a = 0; a < m; ++a) {
      const double s = upper * u[a];
      sum += w[a] * upper * rec(k - 1, s, expo + (upper - s) * lambda[k]);
    }
    return sum;
  };
  return rec(n, t, Complex{});
}

struct CellRule {
  int q;
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;  // on [-1, 1]
  std::vector<double> partial;  // partial[a*q+b] = int_{-1}^{x_a} l_b
};

const CellRule& cell_rule() {
  static const CellRule rule = [] {
    CellRule r;
    r.q = 16;
    const quad::GaussRule g = quad::gauss_legendre(r.q);
    r.nodes = g.nodes;
    r.weights = g.weights;
    r.partial.assign(r.q * r.q, 0.0);
    auto lagrange = [&](int b, double x) {
      double v = 1.0;
      for (int j = 0; j < r.q; ++j) {
        if (j != b) v *= (x - g.nodes[j]) / (g.nodes[b] - g.nodes[j]);
      }
      return v;
    };
    for (int a = 0; a < r.q; ++a) {
      const double half = 0.5 * (g.nodes[a] + 1.0);
      for (int b = 0; b < r.q; ++b) {
        double s = 0.0;
        for (int j = 0; j < r.q; ++j) {
          s += half * g.weights[j] * lagrange(b, -1.0 + half * (g.nodes[j] + 1.0));
        }
        r.partial[a * r.q + b] = s;
      }
    }
    return r;
  }();
  return rule;
}

// u_0(s) = exp(s lambda_0), u_k(s) = int_0^s exp((s - r) lambda_k) u_{k-1}(r) dr;
// the simplex integral is u_n(t). Cells keep |lambda| * width small so the
// in-cell Lagrange interpolation is exact to roundoff.
Complex simplex_iterated(const std::vector<Complex>& lambda, double t) {
  const CellRule& rule = cell_rule();
  const int q = rule.q;
  const int n = static_cast<int>(lambda.size()) - 1;
  const int cells = static_cast<int>(std::ceil(t * max_rate(lambda) / 1.5)) + 1;
  const double width = t / cells;
  const double half = 0.5 * width;
  std::vector<Complex> prev(static_cast<std::size_t>(cells) * q);
  for (int c = 0; c < cells; ++c) {
    for (int a = 0; a < q; ++a) {
      prev[c * q + a] = std::exp(lambda[0] * (c * width + half * (rule.nodes[a] + 1.0)));
    }
  }
  Complex end = std::exp(lambda[0] * t);
  std::vector<Complex> next(prev.size());
  std::vector<Complex> g(q);
  for (int k = 1; k <= n; ++k) {
    Complex carry{};
    for (int c = 0; c < cells; ++c) {
      for (int b = 0; b < q; ++b) {
        g[b] = std::exp(-lambda[k] * (half * (rule.nodes[b] + 1.0))) * prev[c * q + b];
      }
      Complex full{};
      for (int b = 0; b < q; ++b) full += rule.weights[b] * g[b];
      for (int a = 0; a < q; ++a) {
        Complex part{};
        for (int b = 0; b < q; ++b) part += rule.partial[a * q + b] * g[b];
        next[c * q + a] =
            std::exp(lambda[k] * (half * (rule.nodes[a] + 1.0))) * (carry + half * part);
      }
      carry = std::exp(lambda[k] * width) * (carry + half * full);
    }
    std::swap(prev, next);
    end = carry;
  }
  return end;
}

int auto_order(const std::vector<Complex>& lambda, double t) {
  return static_cast<int>(std::ceil(0.5 * oscillation(lambda) * t)) + 16;
}

int duffy_cap(int n) { return n == 1 ? 4096 : n == 2 ? 512 : 128; }

Complex simplex_integral(const std::vector<Complex>& lambda, double t, int order) {
  const int n = static_cast<int>(lambda.size()) - 1;
  if (n == 0) return std::exp(lambda[0] * t);
  if (t == 0.0) return 0.0;
  const int m = order > 0 ? order : auto_order(lambda, t);
  if (n <= 3 && m <= duffy_cap(n)) return simplex_duffy(lambda, t, m);
  return simplex_iterated(lambda, t);
}

Complex full_cube(const std::vector<Path>& paths, double t, double x, int n, int order) {
  if (n == 0) {
    Complex s{};
    for (const Path& p : paths) s += p.coeff * std::polar(1.0, x * p.freq) * std::exp(p.lambda[0] * t);
    return s;
  }
  const int q = 8;
  const int panels = std::max(4, (order + q - 1) / q);
  const quad::GaussRule rule = quad::gauss_legendre(q);
  const double width = t / panels;
  std::vector<double> nodes;
  std::vector<double> weights;
  for (int c = 0; c < panels; ++c) {
    for (int a = 0; a < q; ++a) {
      nodes.push_back(c * width + 0.5 * width * (rule.nodes[a] + 1.0));
      weights.push_back(0.5 * width * rule.weights[a]);
    }
  }
  std::vector<Complex> phase(paths.size());
  for (std::size_t i = 0; i < paths.size(); ++i) {
    phase[i] = paths[i].coeff * std::polar(1.0, x * paths[i].freq);
  }
  const std::size_t per_axis = nodes.size();
  std::vector<std::size_t> idx(n, 0);
  std::vector<double> s(n);
  Complex total{};
  while (true) {
    double w = 1.0;
    for (int k = 0; k < n; ++k) {
      s[k] = nodes[idx[k]];
      w *= weights[idx[k]];
    }
    std::sort(s.begin(), s.end());
    Complex v{};
    for (std::size_t i = 0; i < paths.size(); ++i) {
      v += phase[i] * path_exponential(paths[i].lambda, s.data(), n, t);
    }
    total += w * v;
    int k = 0;
    while (k < n && ++idx[k] == per_axis) idx[k++] = 0;
    if (k == n) break;
  }
  return total / std::tgamma(n + 1.0);
}

}  // namespace

PlaneWaveState feynman_kac_state(const PlaneWaveState& u0, const PlaneWaveState& V,
                                 double t, const DysonConfig& cfg,
                                 const EvolutionParams& params,
                                 std::vector<PlaneWaveState>* terms) {
  cfg.validate();
  validate_params(params.p, params.alpha);
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw Error(ErrorCode::invalid_argument, "t must be finite and >= 0");
  }
  std::vector<Wave> all;
  for (int n = 0; n <= cfg.n_max; ++n) {
    std::vector<Wave> level;
    for (const Path& p : enumerate_paths(u0, V, n, params, cfg.max_atoms)) {
      level.push_back({p.freq, p.coeff * simplex_integral(p.lambda, t, cfg.simplex_order)});
    }
    PlaneWaveState term(std::move(level), cfg.max_atoms);
    all.insert(all.end(), term.waves().begin(), term.waves().end());
    if (terms) terms->push_back(std::move(term));
  }
  return PlaneWaveState(std::move(all), cfg.max_atoms);
}

FeynmanKacResult feynman_kac_eval(const PlaneWaveState& u0, const PlaneWaveState& V,
                                  double t, double x, const DysonConfig& cfg,
                                  const EvolutionParams& params) {
  std::vector<PlaneWaveState> terms;
  feynman_kac_state(u0, V, t, cfg, params, &terms);
  FeynmanKacResult out;
  for (const PlaneWaveState& term : terms) {
    out.terms.push_back(state_eval(term, x));
    out.value += out.terms.back();
  }
  out.truncation_bound =
      dyson_truncation_bound(u0.fresnel_norm(), V.fresnel_norm(), t, cfg.n_max);
  return out;
}

Complex feynman_kac_term(const PlaneWaveState& u0, const PlaneWaveState& V, double t,
                         double x, int n, SimplexRule rule, int order,
                         const EvolutionParams& params) {
  validate_params(params.p, params.alpha);
  if (n < 0) throw Error(ErrorCode::invalid_argument, "term index must be >= 0");
  const std::vector<Path> paths = enumerate_paths(u0, V, n, params, kDefaultAtomCap);
  if (rule == SimplexRule::full_cube) return full_cube(paths, t, x, n, order);
  Complex sum{};
  for (const Path& p : paths) {
    Complex j;
    if (n == 0) {
      j = std::exp(p.lambda[0] * t);
    } else if (rule == SimplexRule::duffy) {
      j = simplex_duffy(p.lambda, t, order > 0 ? order : auto_order(p.lambda, t));
    } else {
      j = simplex_iterated(p.lambda, t);
    }
    sum += p.coeff * std::polar(1.0, x * p.freq) * j;
  }
  return sum;
}

}  // namespace polyheat
