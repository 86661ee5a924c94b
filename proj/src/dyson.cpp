#include "polyheat/dyson.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "polyheat/error.hpp"

namespace polyheat {

void DysonConfig::validate() const {
  if (n_max < 0) throw Error(ErrorCode::invalid_argument, "n_max must be >= 0");
  if (n_max > n_cap) {
    throw Error(ErrorCode::invalid_argument,
                "n_max " + std::to_string(n_max) + " exceeds the cap " +
                    std::to_string(n_cap));
  }
  if (time_mesh < 2) throw Error(ErrorCode::invalid_argument, "time_mesh must be >= 2");
  if (simplex_order < 0) throw Error(ErrorCode::invalid_argument, "simplex_order must be >= 0");
  if (max_atoms < 1) throw Error(ErrorCode::invalid_argument, "max_atoms must be >= 1");
  if (!(mesh_tol > 0.0)) throw Error(ErrorCode::invalid_argument, "mesh_tol must be positive");
}

double dyson_term_bound(double u0_norm, double v_norm, double t, int n) {
  const double a = t * v_norm;
  double term = u0_norm;
  for (int k = 1; k <= n; ++k) term *= a / k;
  return term;
}

double dyson_truncation_bound(double u0_norm, double v_norm, double t, int n_max) {
  const double a = t * v_norm;
  double term = dyson_term_bound(u0_norm, v_norm, t, n_max);
  double sum = 0.0;
  for (int k = n_max + 1; k < n_max + 1000; ++k) {
    term *= a / k;
    sum += term;
    if (term <= 1e-17 * sum || term == 0.0) break;
  }
  return sum;
}

namespace {

// Amplitudes of one series level at every mesh node, node-major.
struct Level {
  std::vector<double> freqs;
  std::vector<Complex> amp;
};

struct Pairing {
  std::vector<double> freqs;
  // For every (prev, v) pair, the merged index in freqs.
  std::vector<std::size_t> target;
};

Pairing pair_frequencies(const std::vector<double>& prev, const PlaneWaveState& V,
                         std::size_t cap) {
  const std::size_t nv = V.size();
  std::vector<std::pair<double, std::size_t>> cand;
  cand.reserve(prev.size() * nv);
  for (std::size_t f = 0; f < prev.size(); ++f) {
    for (std::size_t v = 0; v < nv; ++v) cand.push_back({prev[f] + V.waves()[v].y, f * nv + v});
  }
  std::stable_sort(cand.begin(), cand.end(),
                   [](const auto& l, const auto& r) { return l.first < r.first; });
  Pairing out;
  out.target.resize(cand.size());
  for (const auto& [y, id] : cand) {
    if (out.freqs.empty() ||
        std::abs(y - out.freqs.back()) > 1e-12 * std::max(1.0, std::abs(out.freqs.back()))) {
      out.freqs.push_back(y);
    }
    out.target[id] = out.freqs.size() - 1;
  }
  if (out.freqs.size() > cap) {
    throw Error(ErrorCode::state_explosion,
                "state explosion: " + std::to_string(out.freqs.size()) +
                    " atoms exceed the cap of " + std::to_string(cap));
  }
  return out;
}

// Final-time trapezoid amplitudes of S_0 .. S_n on an M-node mesh.
std::vector<Level> volterra(const PlaneWaveState& u0, const PlaneWaveState& V, double t,
                            int n, int M, std::size_t cap,
                            const EvolutionParams& params) {
  const double h = t / (M - 1);
  std::vector<Level> finals;
  Level cur;
  for (const Wave& w : u0.waves()) cur.freqs.push_back(w.y);
  std::size_t F = cur.freqs.size();
  cur.amp.resize(M * F);
  for (int i = 0; i < M; ++i) {
    for (std::size_t f = 0; f < F; ++f) {
      const Complex lam = params.alpha * std::pow(cur.freqs[f], params.p);
      cur.amp[i * F + f] = u0.waves()[f].a * std::exp(lam * (i * h));
    }
  }
  auto final_row = [&](const Level& l) {
    const std::size_t nf = l.freqs.size();
    Level r;
    r.freqs = l.freqs;
    r.amp.assign(l.amp.end() - nf, l.amp.end());
    return r;
  };
  finals.push_back(final_row(cur));

  const std::size_t nv = V.size();
  for (int level = 1; level <= n; ++level) {
    const Pairing pairing = pair_frequencies(cur.freqs, V, cap);
    const std::size_t G = pairing.freqs.size();
    std::vector<Complex> forcing(M * G);
    for (int i = 0; i < M; ++i) {
      for (std::size_t f = 0; f < F; ++f) {
        const Complex a = cur.amp[i * F + f];
        for (std::size_t v = 0; v < nv; ++v) {
          forcing[i * G + pairing.target[f * nv + v]] += V.waves()[v].a * a;
        }
      }
    }
    Level next;
    next.freqs = pairing.freqs;
    next.amp.assign(M * G, Complex{});
    for (std::size_t g = 0; g < G; ++g) {
      const Complex E = std::exp(params.alpha * std::pow(next.freqs[g], params.p) * h);
      Complex T{};
      for (int i = 0; i + 1 < M; ++i) {
        T = E * (T + 0.5 * h * forcing[i * G + g]) + 0.5 * h * forcing[(i + 1) * G + g];
        next.amp[(i + 1) * G + g] = T;
      }
    }
    cur = std::move(next);
    F = G;
    finals.push_back(final_row(cur));
  }
  return finals;
}

PlaneWaveState to_state(const std::vector<double>& freqs, const std::vector<Complex>& amp) {
  std::vector<Wave> w(freqs.size());
  for (std::size_t i = 0; i < freqs.size(); ++i) w[i] = {freqs[i], amp[i]};
  const std::size_t cap = w.size();
  return PlaneWaveState(std::move(w), cap);
}

std::vector<DysonTerm> richardson_terms(const PlaneWaveState& u0, const PlaneWaveState& V,
                                        double t, int n, const DysonConfig& cfg,
                                        const EvolutionParams& params) {
  validate_params(params.p, params.alpha);
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw Error(ErrorCode::invalid_argument, "t must be finite and >= 0");
  }
  const int M = cfg.time_mesh;
  const std::vector<Level> coarse = volterra(u0, V, t, n, M, cfg.max_atoms, params);
  const std::vector<Level> mid = volterra(u0, V, t, n, 2 * M - 1, cfg.max_atoms, params);
  const std::vector<Level> fine = volterra(u0, V, t, n, 4 * M - 3, cfg.max_atoms, params);
  const double u_norm = u0.fresnel_norm();
  const double v_norm = V.fresnel_norm();
  std::vector<DysonTerm> out;
  for (int k = 0; k <= n; ++k) {
    const Level& c = coarse[k];
    const Level& m = mid[k];
    const Level& f = fine[k];
    std::vector<Complex> extrap(c.freqs.size());
    double delta = 0.0;
    double residual = 0.0;
    for (std::size_t i = 0; i < extrap.size(); ++i) {
      if (k == 0) {
        extrap[i] = f.amp[i];
        continue;
      }
      const Complex r1 = (4.0 * m.amp[i] - c.amp[i]) / 3.0;
      const Complex r2 = (4.0 * f.amp[i] - m.amp[i]) / 3.0;
      extrap[i] = (16.0 * r2 - r1) / 15.0;
      delta += std::abs(m.amp[i] - c.amp[i]);
      residual += std::abs(r2 - r1);
    }
    DysonTerm term;
    term.n = k;
    term.state = to_state(c.freqs, extrap);
    term.bound = dyson_term_bound(u_norm, v_norm, t, k);
    // Roundoff slack: the bound is attained when every phase vanishes.
    term.bound_ok = term.state.fresnel_norm() <= term.bound * (1.0 + 1e-9) + 1e-15;
    term.mesh_delta = delta;
    term.mesh_too_coarse = residual > cfg.mesh_tol;
    out.push_back(std::move(term));
  }
  return out;
}

}  // namespace

DysonTerm dyson_term(const PlaneWaveState& u0, const PlaneWaveState& V, double t, int n,
                     const DysonConfig& cfg, const EvolutionParams& params) {
  cfg.validate();
  if (n < 0 || n > cfg.n_cap) {
    throw Error(ErrorCode::invalid_argument, "term index out of range");
  }
  return std::move(richardson_terms(u0, V, t, n, cfg, params).back());
}

DysonResult dyson_solve(const PlaneWaveState& u0, const PlaneWaveState& V, double t,
                        const DysonConfig& cfg, const EvolutionParams& params) {
  cfg.validate();
  DysonResult out;
  out.terms = richardson_terms(u0, V, t, cfg.n_max, cfg, params);
  std::vector<Wave> all;
  for (const DysonTerm& term : out.terms) {
    all.insert(all.end(), term.state.waves().begin(), term.state.waves().end());
    out.mesh_too_coarse = out.mesh_too_coarse || term.mesh_too_coarse;
  }
  out.state = PlaneWaveState(std::move(all), cfg.max_atoms);
  out.truncation_bound =
      dyson_truncation_bound(u0.fresnel_norm(), V.fresnel_norm(), t, cfg.n_max);
  return out;
}

}  // namespace polyheat
