#pragma once

#include <array>
#include <span>
#include <vector>

namespace varflow {

/// Barycentric point on a reference simplex. Weights sum to one, so the
/// integral over a face is area * sum(w_i f(x_i)).
struct QuadPoint {
  std::array<double, 3> bary;
  double w;
};

/// Rules for segments (simplex_dim 1) and triangles (simplex_dim 2).
/// order 1: centroid / midpoint, exact for linear integrands.
/// order 2: 3-point interior rule / 2-point Gauss, exact for quadratics.
/// order 3: 6-point degree-4 rule / 2-point Gauss, exact for cubics.
std::span<const QuadPoint> simplex_rule(int simplex_dim, int order);

/// simplex_rule applied on each piece of a uniform refinement of the
/// reference simplex, depth times (4^depth triangles, 2^depth segments).
std::vector<QuadPoint> composite_rule(int simplex_dim, int order, int depth);

/// Accumulator with Neumaier compensation; order of additions fixes the result.
class Summer {
 public:
  void add(double x) noexcept;
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace varflow
