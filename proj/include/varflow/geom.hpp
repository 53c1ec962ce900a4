#pragma once

#include "varflow/types.hpp"

#include <random>
#include <span>

namespace varflow {

/// A k-dimensional linear subspace of R^{n+1}, stored as its orthogonal
/// projection matrix. Immutable after construction.
class Plane {
 public:
  /// Orthogonal projector onto span(basis). Throws InvalidArgument
  /// ("degenerate basis") when the vectors are linearly dependent.
  static Plane from_basis(std::span<const Vec> basis);

  /// span(e_0, ..., e_{k-1}) in R^{ambient}.
  static Plane coordinate(int ambient, int k);

  /// Wraps a matrix already known to be a rank-k orthogonal projector.
  static Plane from_projection(const Mat& proj, int k);

  int dim() const noexcept { return dim_; }
  int ambient() const noexcept { return static_cast<int>(proj_.rows()); }
  const Mat& proj() const noexcept { return proj_; }
  Mat perp() const { return Mat::Identity(ambient(), ambient()) - proj_; }

  Vec project(const Vec& v) const { return proj_ * v; }
  Vec project_perp(const Vec& v) const { return v - proj_ * v; }

  /// Unit vector spanning the orthogonal complement; only for hyperplanes.
  /// The sign is chosen so the largest-magnitude component is positive.
  Vec normal() const;
  /// Orthonormal basis of the plane as columns.
  Mat basis() const;

 private:
  Plane(int k, Mat proj) : dim_(k), proj_(std::move(proj)) {}

  int dim_;
  Mat proj_;
};

Plane make_plane(std::span<const Vec> basis);

/// Quantities relating two planes of equal dimension.
struct GrassmannGap {
  double perp_dot;    // S^perp . T  (Hilbert-Schmidt)
  double hs_norm_sq;  // (S - T) . (S - T)
  double op_norm;     // ||S - T||
};

GrassmannGap grassmann_gap(const Plane& S, const Plane& T);

/// Hilbert-Schmidt inner product trace(A^t B).
double hs_dot(const Mat& a, const Mat& b);

/// Largest singular value by power iteration on A^t A (tol 1e-12, 200 its).
double operator_norm(const Mat& a);

/// div^S g = sum_ij S_ij dg_i/dx_j for the Jacobian (dg_i/dx_j).
double tangential_divergence(const Mat& g_jacobian, const Mat& s_proj);
double tangential_divergence(const Mat& g_jacobian, const Plane& s);

/// Nearest rank-k orthogonal projector to a symmetric matrix
/// (span of the top-k eigenvectors).
Mat nearest_projection(const Mat& sym, int k);

/// Uniformly distributed random k-plane (orthonormalized Gaussian vectors).
Plane random_plane(int ambient, int k, std::mt19937_64& rng);

/// Open cylinder { y : |T(y - x)| < r } orthogonal to the plane T.
struct Cylinder {
  Plane axis_plane;
  Vec center;
  double radius;

  Cylinder(Plane t, Vec c, double r);
  bool contains(const Vec& y) const;
};

struct Ball {
  Vec center;
  double radius;
  bool closed;

  Ball(Vec c, double r, bool is_closed);
  bool contains(const Vec& y) const;
};

/// omega_k: Lebesgue measure of the unit ball in R^k (k = 1, 2, 3).
double unit_ball_volume(int k);

}  // namespace varflow
