#pragma once

#include <complex>
#include <vector>

#include "polyheat/kernel.hpp"
#include "polyheat/quad.hpp"

namespace polyheat {

struct Atom {
  std::vector<double> point;
  Complex weight{};
};

// Finite sum of weighted point masses on R^n. Points closer than
// 1e-12 max(1, |y|) in every coordinate are merged.
class AtomicMeasure {
 public:
  AtomicMeasure() = default;
  AtomicMeasure(int dim, std::vector<Atom> atoms);

  int dim() const { return dim_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  double total_variation() const;

 private:
  int dim_ = 1;
  std::vector<Atom> atoms_;
};

// Horizon t and nodes 0 <= t_1 < ... < t_n < t.
class TimePartition {
 public:
  TimePartition(double horizon, std::vector<double> nodes);

  double horizon() const { return horizon_; }
  const std::vector<double>& nodes() const { return nodes_; }
  int size() const { return static_cast<int>(nodes_.size()); }

 private:
  double horizon_;
  std::vector<double> nodes_;
};

/// sum_atoms w exp(alpha sum_k (y_1 + ... + y_k)^p (t_{k+1} - t_k)),
/// t_{n+1} = horizon.
Complex fresnel_cylinder_closed(const AtomicMeasure& nu,
                                const TimePartition& part,
                                const EvolutionParams& params);

/// The same functional as an integral of F(x) = sum w exp(i y.x) against the
/// kernel chain prod_k g_{t_{k+1}-t_k}(x_{k+1} - x_k), x_{n+1} = 0. In the
/// increments xi_k = x_{k+1} - x_k the chain factorizes and each factor is a
/// one-dimensional kernel quadrature. n <= 3.
quad::QuadResult fresnel_cylinder_quadrature(const AtomicMeasure& nu,
                                             const TimePartition& part,
                                             const EvolutionParams& params,
                                             const quad::QuadSpec& spec);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Kernel-chain mass of the box b_1 x ... x b_n for a path started at x0 at
/// time 0 and observed at the partition nodes (t_1 > 0). Nested adaptive
/// quadrature, n <= 3.
quad::QuadResult cylinder_set_measure(const TimePartition& part,
                                      const std::vector<Interval>& boxes,
                                      double x0, const EvolutionParams& params,
                                      const quad::QuadSpec& spec);

/// Sum of |cylinder_set_measure| over the lattice of cells of width
/// grid_step covering [x0 - extent, x0 + extent] in every coordinate.
/// Cells are integrated with tensor Gauss-Legendre nodes.
double total_variation_estimate(const TimePartition& part, double grid_step,
                                double extent, double x0,
                                const EvolutionParams& params,
                                const quad::QuadSpec& spec);

}  // namespace polyheat
