#include "varflow/geom.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>

namespace varflow {

Plane Plane::from_basis(std::span<const Vec> basis) {
  if (basis.empty()) throw InvalidArgument("degenerate basis");
  const auto ambient = basis.front().size();
  const auto k = static_cast<Eigen::Index>(basis.size());
  if (k > ambient) throw InvalidArgument("degenerate basis");

  Eigen::MatrixXd b(ambient, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    if (basis[j].size() != ambient) throw InvalidArgument("basis vectors differ in dimension");
    b.col(j) = basis[j];
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(b);
  qr.setThreshold(1e-12);
  if (qr.rank() < k) throw InvalidArgument("degenerate basis");

  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(ambient, k);
  Mat p = q * q.transpose();
  p = 0.5 * (p + p.transpose()).eval();
  return Plane(static_cast<int>(k), p);
}

Plane Plane::coordinate(int ambient, int k) {
  if (k < 1 || k > ambient || ambient > kMaxAmbient) {
    throw InvalidArgument("coordinate plane dimension out of range");
  }
  Mat p = Mat::Zero(ambient, ambient);
  for (int i = 0; i < k; ++i) p(i, i) = 1.0;
  return Plane(k, p);
}

Plane Plane::from_projection(const Mat& proj, int k) { return Plane(k, proj); }

Vec Plane::normal() const {
  if (dim_ != ambient() - 1) throw InvalidArgument("normal() requires a hyperplane");
  const Mat q = perp();
  Eigen::Index col = 0;
  q.diagonal().maxCoeff(&col);
  Vec n = q.col(col);
  n.normalize();
  Eigen::Index big = 0;
  n.cwiseAbs().maxCoeff(&big);
  if (n[big] < 0) n = -n;
  return n;
}

Mat Plane::basis() const {
  Eigen::SelfAdjointEigenSolver<Mat> es(proj_);
  return es.eigenvectors().rightCols(dim_);
}

Plane make_plane(std::span<const Vec> basis) { return Plane::from_basis(basis); }

double hs_dot(const Mat& a, const Mat& b) { return (a.array() * b.array()).sum(); }

double operator_norm(const Mat& a) {
  const Mat ata = a.transpose() * a;
  const auto n = ata.cols();
  if (ata.norm() == 0.0) return 0.0;

  // Start from the heaviest column of A^t A plus a dense vector so the start
  // is not orthogonal to the dominant eigenspace.
  Eigen::Index best = 0;
  ata.colwise().norm().maxCoeff(&best);
  Vec v = ata.col(best) + Vec::Constant(n, 1e-3);
  v.normalize();

  double lambda = 0.0;
  for (int it = 0; it < 200; ++it) {
    Vec w = ata * v;
    const double next = v.dot(w);
    const double wn = w.norm();
    if (wn == 0.0) return 0.0;
    v = w / wn;
    if (std::abs(next - lambda) <= 1e-12 * std::max(1.0, std::abs(next))) {
      lambda = next;
      break;
    }
    lambda = next;
  }
  lambda = v.dot(ata * v);
  return std::sqrt(std::max(0.0, lambda));
}

GrassmannGap grassmann_gap(const Plane& s, const Plane& t) {
  if (s.dim() != t.dim() || s.ambient() != t.ambient()) {
    throw InvalidArgument("grassmann_gap: planes differ in dimension");
  }
  const Mat diff = s.proj() - t.proj();
  return GrassmannGap{
      .perp_dot = hs_dot(s.perp(), t.proj()),
      .hs_norm_sq = hs_dot(diff, diff),
      .op_norm = operator_norm(diff),
  };
}

double tangential_divergence(const Mat& g_jacobian, const Mat& s_proj) {
  return hs_dot(s_proj, g_jacobian);
}

double tangential_divergence(const Mat& g_jacobian, const Plane& s) {
  return tangential_divergence(g_jacobian, s.proj());
}

Mat nearest_projection(const Mat& sym, int k) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (sym + sym.transpose()));
  const auto n = sym.rows();
  Mat p = Mat::Zero(n, n);
  // Eigenvalues are sorted ascending; take the last k.
  for (Eigen::Index i = n - k; i < n; ++i) {
    const Vec e = es.eigenvectors().col(i);
    p += e * e.transpose();
  }
  return p;
}

Plane random_plane(int ambient, int k, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Vec> basis;
  for (;;) {
    basis.clear();
    for (int j = 0; j < k; ++j) {
      Vec v(ambient);
      for (int i = 0; i < ambient; ++i) v[i] = gauss(rng);
      basis.push_back(v);
    }
    try {
      return Plane::from_basis(basis);
    } catch (const InvalidArgument&) {
      // measure-zero event; draw again
    }
  }
}

Cylinder::Cylinder(Plane t, Vec c, double r) : axis_plane(std::move(t)), center(std::move(c)), radius(r) {
  if (!(radius > 0)) throw InvalidArgument("cylinder radius must be positive");
}

bool Cylinder::contains(const Vec& y) const {
  return axis_plane.project(y - center).norm() < radius;
}

Ball::Ball(Vec c, double r, bool is_closed) : center(std::move(c)), radius(r), closed(is_closed) {
  if (!(radius > 0)) throw InvalidArgument("ball radius must be positive");
}

bool Ball::contains(const Vec& y) const {
  const double d = (y - center).norm();
  return closed ? d <= radius : d < radius;
}

double unit_ball_volume(int k) {
  switch (k) {
    case 1: return 2.0;
    case 2: return std::numbers::pi;
    case 3: return 4.0 * std::numbers::pi / 3.0;
    default: throw InvalidArgument("unit_ball_volume: k must be 1, 2 or 3");
  }
}

}  // namespace varflow
