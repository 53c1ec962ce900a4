#pragma once

#include "varflow/quadrature.hpp"
#include "varflow/types.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

namespace varflow {

/// An n-simplex: n+1 vertex indices (unused slots are -1) and a multiplicity.
struct Face {
  std::array<int, 3> v{-1, -1, -1};
  int multiplicity = 1;
};

/// Integer-multiplicity polyhedral varifold of dimension n = ambient - 1.
/// Triangles in R^3 or segments in R^2. Geometry is fixed at construction.
class DiscreteVarifold {
 public:
  DiscreteVarifold() : DiscreteVarifold(3, {}, {}, {}) {}

  /// Throws InvalidArgument on out-of-range indices, multiplicity < 1 or
  /// a face of zero volume. An empty boundary vector means no boundary.
  DiscreteVarifold(int ambient, std::vector<Vec> vertices, std::vector<Face> faces,
                   std::vector<std::uint8_t> boundary);

  int ambient() const noexcept { return ambient_; }
  int dim() const noexcept { return ambient_ - 1; }
  int face_size() const noexcept { return ambient_; }

  std::size_t num_vertices() const noexcept { return vertices_.size(); }
  std::size_t num_faces() const noexcept { return faces_.size(); }
  bool empty() const noexcept { return faces_.empty(); }

  const std::vector<Vec>& vertices() const noexcept { return vertices_; }
  const std::vector<Face>& faces() const noexcept { return faces_; }
  const std::vector<std::uint8_t>& boundary() const noexcept { return boundary_; }
  const Vec& vertex(std::size_t i) const { return vertices_[i]; }
  bool is_boundary(std::size_t i) const { return boundary_[i] != 0; }

  /// Unweighted n-volume of face f.
  double face_area(std::size_t f) const { return areas_[f]; }
  /// Orthogonal projector onto the affine hull of face f.
  Mat face_tangent(std::size_t f) const;
  Vec face_point(std::size_t f, const std::array<double, 3>& bary) const;
  Vec face_centroid(std::size_t f) const;

  /// Total weight sum(multiplicity * area).
  double mass() const;

 private:
  int ambient_;
  std::vector<Vec> vertices_;
  std::vector<Face> faces_;
  std::vector<std::uint8_t> boundary_;
  std::vector<double> areas_;
};

/// n-volume of the simplex spanned by pts (n+1 points in R^{ambient}).
double simplex_volume(std::span<const Vec> pts);

/// d(volume)/d(pts[i]).
Vec simplex_volume_gradient(std::span<const Vec> pts, int i);

/// sum over faces of mult * area * sum_q w_q f(x_q, face, bary_q).
template <class F>
double integrate_rule(const DiscreteVarifold& v, std::span<const QuadPoint> rule, F&& f) {
  Summer total;
  if (v.empty()) return 0.0;
  for (std::size_t fi = 0; fi < v.num_faces(); ++fi) {
    double inner = 0.0;
    for (const auto& q : rule) inner += q.w * f(v.face_point(fi, q.bary), fi, q.bary);
    total.add(v.faces()[fi].multiplicity * v.face_area(fi) * inner);
  }
  return total.value();
}

template <class F>
double integrate(const DiscreteVarifold& v, int quad_order, F&& f) {
  return integrate_rule(v, simplex_rule(v.dim(), quad_order), std::forward<F>(f));
}

/// Smallest refinement depth (at most max_depth) bringing the median edge
/// length below feature.
int refinement_depth(const DiscreteVarifold& v, double feature, int max_depth = 6);

/// Compactly supported C^1 vector field with its Jacobian (dg_i/dx_j).
struct TestField {
  std::function<Vec(const Vec&)> value;
  std::function<Mat(const Vec&)> jacobian;
  double support_radius = 0.0;
};

/// Nonnegative C^1 test function of (x, t).
struct ScalarTest {
  std::function<double(const Vec&, double)> value;
  std::function<Vec(const Vec&, double)> gradient;
  std::function<double(const Vec&, double)> time_derivative;
};

/// a * (1 - |x-c|^2/r^2)^3 inside the ball, zero outside.
TestField bump_field(const Vec& center, double radius, const Vec& amplitude);

/// Time-independent bump (1 - |x-c|^2/r^2)^3 scaled by `height`.
ScalarTest bump_scalar(const Vec& center, double radius, double height);

/// phi^2 for a given phi, with matching derivatives.
ScalarTest squared(const ScalarTest& phi);

double weight_measure(const DiscreteVarifold& v, const std::function<double(const Vec&)>& phi,
                      int quad_order = 3);

/// ||V||(U_r(center)) / (omega_n r^n), ball membership at quadrature points.
double density_ratio(const DiscreteVarifold& v, const Vec& center, double r, int quad_order = 3);

double first_variation(const DiscreteVarifold& v, const TestField& g, int quad_order = 3);

struct MeanCurvature {
  std::vector<Vec> h;
  std::vector<double> mass;  // lumped vertex weights
};

/// Lumped area gradient h_v = -grad_v(area) / m_v; zero on boundary vertices.
/// Throws InvalidArgument("isolated vertex") for vertices without faces.
MeanCurvature mean_curvature(const DiscreteVarifold& v);

/// h interpolated linearly on face f.
Vec interpolate(const DiscreteVarifold& v, const std::vector<Vec>& field, std::size_t f,
                const std::array<double, 3>& bary);

/// Per-vertex tangent planes: mass-weighted face projectors snapped to rank n.
std::vector<Mat> vertex_tangents(const DiscreteVarifold& v);

/// max_v |S_v h_v| / (|h_v| + 1e-8) over interior vertices.
double perpendicularity_defect(const DiscreteVarifold& v, const MeanCurvature& hf);

/// int (-phi |h|^2 + h . grad phi) d||V|| at time t.
double weighted_first_variation(const DiscreteVarifold& v, const ScalarTest& phi, double t,
                                const MeanCurvature& hf, int quad_order = 3);

/// Push-forward under y -> y / lambda.
DiscreteVarifold parabolic_rescale(const DiscreteVarifold& v, double lambda);

/// Same connectivity, new vertex positions.
DiscreteVarifold with_vertices(const DiscreteVarifold& v, std::vector<Vec> vertices);

void write_dvar(std::ostream& os, const DiscreteVarifold& v);
/// Lines starting with '#' are comments. Throws ParseError with a line number.
DiscreteVarifold read_dvar(std::istream& is);
void save_dvar(const std::string& path, const DiscreteVarifold& v, const std::string& header = {});
DiscreteVarifold load_dvar(const std::string& path);

}  // namespace varflow
