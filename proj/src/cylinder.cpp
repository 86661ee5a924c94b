#include "polyheat/cylinder.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>

#include "polyheat/error.hpp"

namespace polyheat {

namespace {

bool same_point(const std::vector<double>& a, const std::vector<double>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i] - b[i]) > 1e-12 * std::max(1.0, std::abs(a[i]))) return false;
  }
  return true;
}

void check_dim(const AtomicMeasure& nu, const TimePartition& part) {
  if (nu.dim() != part.size()) {
    throw Error(ErrorCode::dimension_mismatch,
                "dimension mismatch: measure has dim " + std::to_string(nu.dim()) +
                    ", partition has " + std::to_string(part.size()) + " nodes");
  }
}

// Time steps t_{k+1} - t_k with t_{n+1} = horizon.
std::vector<double> increments(const TimePartition& part) {
  const auto& t = part.nodes();
  std::vector<double> tau(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) {
    tau[k] = (k + 1 < t.size() ? t[k + 1] : part.horizon()) - t[k];
  }
  return tau;
}

}  // namespace

AtomicMeasure::AtomicMeasure(int dim, std::vector<Atom> atoms) : dim_(dim) {
  if (dim < 1) throw Error(ErrorCode::invalid_argument, "measure dimension must be >= 1");
  for (Atom& a : atoms) {
    if (static_cast<int>(a.point.size()) != dim) {
      throw Error(ErrorCode::dimension_mismatch,
                  "dimension mismatch: atom point has wrong length");
    }
    for (double v : a.point) {
      if (!std::isfinite(v)) throw Error(ErrorCode::invalid_argument, "atom point not finite");
    }
    auto it = std::find_if(atoms_.begin(), atoms_.end(),
                           [&](const Atom& b) { return same_point(b.point, a.point); });
    if (it != atoms_.end()) {
      it->weight += a.weight;
    } else {
      atoms_.push_back(std::move(a));
    }
  }
}

double AtomicMeasure::total_variation() const {
  double s = 0.0;
  for (const Atom& a : atoms_) s += std::abs(a.weight);
  return s;
}

TimePartition::TimePartition(double horizon, std::vector<double> nodes)
    : horizon_(horizon), nodes_(std::move(nodes)) {
  if (!(horizon_ > 0.0) || !std::isfinite(horizon_)) {
    throw Error(ErrorCode::invalid_argument, "partition horizon must be positive");
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const double lo = i == 0 ? 0.0 : nodes_[i - 1];
    if (!(nodes_[i] >= lo) || (i > 0 && !(nodes_[i] > lo)) || !(nodes_[i] < horizon_)) {
      throw Error(ErrorCode::invalid_argument,
                  "partition nodes must satisfy 0 <= t_1 < ... < t_n < t");
    }
  }
}

Complex fresnel_cylinder_closed(const AtomicMeasure& nu, const TimePartition& part,
                                const EvolutionParams& params) {
  check_dim(nu, part);
  const std::vector<double> tau = increments(part);
  Complex total{};
  for (const Atom& a : nu.atoms()) {
    Complex exponent{};
    double y = 0.0;
    for (std::size_t k = 0; k < tau.size(); ++k) {
      y += a.point[k];
      exponent += std::pow(y, params.p) * tau[k];
    }
    total += a.weight * std::exp(params.alpha * exponent);
  }
  return total;
}

quad::QuadResult fresnel_cylinder_quadrature(const AtomicMeasure& nu,
                                             const TimePartition& part,
                                             const EvolutionParams& params,
                                             const quad::QuadSpec& spec) {
  check_dim(nu, part);
  if (part.size() > 3) {
    throw Error(ErrorCode::dimension_unsupported,
                "dimension unsupported: quadrature path handles n <= 3");
  }
  validate_params(params.p, params.alpha);
  const std::vector<double> tau = increments(part);
  std::map<std::pair<double, double>, quad::QuadResult> cache;
  auto factor = [&](double t, double y) {
    auto [it, fresh] = cache.try_emplace({t, y});
    if (fresh) it->second = kernel_fourier(params, t, y, spec);
    return it->second;
  };

  quad::QuadResult out;
  for (const Atom& a : nu.atoms()) {
    Complex prod = a.weight;
    double rel_err = 0.0;
    bool converged = true;
    double y = 0.0;
    for (std::size_t k = 0; k < tau.size(); ++k) {
      y += a.point[k];
      const quad::QuadResult f = factor(tau[k], y);
      prod *= f.value;
      rel_err += f.err_estimate / std::max(std::abs(f.value), 1e-300);
      converged = converged && f.converged;
    }
    out.value += prod;
    out.err_estimate += std::abs(prod) * rel_err;
    out.converged = out.converged && converged;
  }
  return out;
}

quad::QuadResult cylinder_set_measure(const TimePartition& part,
                                      const std::vector<Interval>& boxes,
                                      double x0, const EvolutionParams& params,
                                      const quad::QuadSpec& spec) {
  validate_params(params.p, params.alpha);
  const int n = part.size();
  if (static_cast<int>(boxes.size()) != n) {
    throw Error(ErrorCode::dimension_mismatch,
                "dimension mismatch: need one interval per partition node");
  }
  if (n == 0) return quad::QuadResult{Complex{1.0, 0.0}, 0.0, true, 0};
  if (n > 3) {
    throw Error(ErrorCode::dimension_unsupported,
                "dimension unsupported: nested box quadrature handles n <= 3");
  }
  if (!(part.nodes().front() > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "cylinder set measure needs t_1 > 0");
  }
  for (const Interval& b : boxes) {
    if (!(b.lo < b.hi) || !std::isfinite(b.lo) || !std::isfinite(b.hi)) {
      throw Error(ErrorCode::invalid_argument, "boxes must be finite with lo < hi");
    }
  }
  std::vector<double> steps(n);
  for (int k = 0; k < n; ++k) {
    steps[k] = part.nodes()[k] - (k == 0 ? 0.0 : part.nodes()[k - 1]);
  }
  quad::QuadSpec ks = spec.refined(1e-2);
  ks.truncation_radius_override.reset();
  // Each nesting level tightens the inner tolerance so errors do not pile up.
  bool converged = true;
  std::function<Complex(int, double, const quad::QuadSpec&)> density;
  density = [&](int k, double xk, const quad::QuadSpec& s) -> Complex {
    if (k == 0) return kernel(params, steps[0], xk - x0, ks).value;
    const quad::Integrand f = [&](double xp) {
      return density(k - 1, xp, s.refined(1e-2)) *
             kernel(params, steps[k], xk - xp, ks).value;
    };
    const quad::QuadResult r = quad::integrate_interval(f, boxes[k - 1].lo, boxes[k - 1].hi, s);
    converged = converged && r.converged;
    return r.value;
  };
  const quad::QuadSpec inner = spec.refined(1e-1);
  const quad::Integrand outer = [&](double xn) { return density(n - 1, xn, inner); };
  quad::QuadResult r = quad::integrate_interval(outer, boxes[n - 1].lo, boxes[n - 1].hi, spec);
  r.converged = r.converged && converged;
  return r;
}

double total_variation_estimate(const TimePartition& part, double grid_step,
                                double extent, double x0,
                                const EvolutionParams& params,
                                const quad::QuadSpec& spec) {
  validate_params(params.p, params.alpha);
  const int n = part.size();
  if (!(grid_step > 0.0) || !(extent > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "grid_step and extent must be positive");
  }
  if (n == 0) return 1.0;
  if (!(part.nodes().front() > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "variation estimate needs t_1 > 0");
  }
  const int cells = std::max(1, static_cast<int>(std::lround(2.0 * extent / grid_step)));
  const double h = 2.0 * extent / cells;
  const double left = x0 - extent;
  if (std::pow(double(cells), n) > 2e6) {
    throw Error(ErrorCode::dimension_unsupported,
                "dimension unsupported: box lattice too large");
  }

  std::vector<double> steps(n);
  double min_step = part.nodes().front();
  for (int k = 0; k < n; ++k) {
    steps[k] = part.nodes()[k] - (k == 0 ? 0.0 : part.nodes()[k - 1]);
    min_step = std::min(min_step, steps[k]);
  }
  const double scale = std::pow(std::abs(params.alpha) * min_step, 1.0 / params.p);
  const int m = std::clamp(static_cast<int>(std::ceil(4.0 * h / scale)) + 8, 8, 32);
  const quad::GaussRule rule = quad::gauss_legendre(m);
  std::vector<double> off(m);
  std::vector<double> wt(m);
  for (int a = 0; a < m; ++a) {
    off[a] = 0.5 * h * (rule.nodes[a] + 1.0);
    wt[a] = 0.5 * h * rule.weights[a];
  }
  quad::QuadSpec ks = spec;
  ks.truncation_radius_override.reset();
  auto node = [&](int cell, int a) { return left + cell * h + off[a]; };

  // state[prefix][a]: chain density at node a of the last prefix cell.
  std::vector<Complex> state(static_cast<std::size_t>(cells) * m);
  for (int i = 0; i < cells; ++i) {
    for (int a = 0; a < m; ++a) {
      state[i * m + a] = kernel(params, steps[0], node(i, a) - x0, ks).value;
    }
  }
  std::size_t prefixes = cells;
  for (int k = 1; k < n; ++k) {
    // Kernel values g(x_new - x_old) depend on the cell offset and node pair.
    const int span = 2 * cells - 1;
    std::vector<Complex> table(static_cast<std::size_t>(span) * m * m);
    for (int d = 0; d < span; ++d) {
      for (int a = 0; a < m; ++a) {
        for (int b = 0; b < m; ++b) {
          const double diff = (d - (cells - 1)) * h + off[a] - off[b];
          table[(static_cast<std::size_t>(d) * m + a) * m + b] =
              kernel(params, steps[k], diff, ks).value;
        }
      }
    }
    std::vector<Complex> next(prefixes * cells * m);
    for (std::size_t q = 0; q < prefixes; ++q) {
      const int last = static_cast<int>(q % cells);
      for (int j = 0; j < cells; ++j) {
        const int d = j - last + cells - 1;
        for (int a = 0; a < m; ++a) {
          Complex acc{};
          const Complex* row = &table[(static_cast<std::size_t>(d) * m + a) * m];
          for (int b = 0; b < m; ++b) acc += wt[b] * state[q * m + b] * row[b];
          next[(q * cells + j) * m + a] = acc;
        }
      }
    }
    state = std::move(next);
    prefixes *= cells;
  }
  double total = 0.0;
  for (std::size_t q = 0; q < prefixes; ++q) {
    Complex mass{};
    for (int a = 0; a < m; ++a) mass += wt[a] * state[q * m + a];
    total += std::abs(mass);
  }
  return total;
}

}  // namespace polyheat
