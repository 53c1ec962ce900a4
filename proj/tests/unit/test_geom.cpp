#include "varflow/geom.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace varflow;

TEST_CASE("coordinate plane projects onto the first k axes") {
  const Plane t = Plane::coordinate(3, 2);
  CHECK(t.dim() == 2);
  CHECK(t.ambient() == 3);
  const Vec x = make_vec({1.0, 2.0, 3.0});
  CHECK(t.project(x).isApprox(make_vec({1.0, 2.0, 0.0})));
  CHECK(t.project_perp(x).isApprox(make_vec({0.0, 0.0, 3.0})));
  CHECK(t.normal().isApprox(make_vec({0.0, 0.0, 1.0})));
}

TEST_CASE("from_basis matches the coordinate projector and rejects dependent vectors") {
  const std::vector<Vec> basis = {make_vec({1.0, 1.0, 0.0}), make_vec({1.0, -1.0, 0.0})};
  const Plane p = Plane::from_basis(basis);
  CHECK((p.proj() - Plane::coordinate(3, 2).proj()).cwiseAbs().maxCoeff() < 1e-14);
  const std::vector<Vec> bad = {make_vec({1.0, 2.0, 0.0}), make_vec({2.0, 4.0, 0.0})};
  CHECK_THROWS_AS(Plane::from_basis(bad), InvalidArgument);
}

TEST_CASE("basis columns are orthonormal and span the plane") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 50; ++i) {
    const Plane p = random_plane(3, 1 + i % 2, rng);
    const Mat b = p.basis();
    CHECK(b.cols() == p.dim());
    CHECK((b.transpose() * b - Mat::Identity(p.dim(), p.dim())).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((b * b.transpose() - p.proj()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("random planes are rank-k orthogonal projectors") {
  std::mt19937_64 rng(11);
  for (int amb = 2; amb <= 4; ++amb) {
    for (int k = 1; k < amb; ++k) {
      const Plane p = random_plane(amb, k, rng);
      const Mat& s = p.proj();
      CHECK(std::abs(s.trace() - k) < 1e-12);
      CHECK((s * s - s).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((s - s.transpose()).cwiseAbs().maxCoeff() < 1e-15);
    }
  }
}

TEST_CASE("Grassmann gap of two lines at angle theta") {
  // Lines in R^2 at angle theta: |S - T| = sin theta, (S-T).(S-T) = 2 sin^2 theta.
  for (double theta : {0.1, 0.7, 1.3}) {
    const std::vector<Vec> a = {make_vec({1.0, 0.0})};
    const std::vector<Vec> b = {make_vec({std::cos(theta), std::sin(theta)})};
    const GrassmannGap g = grassmann_gap(Plane::from_basis(a), Plane::from_basis(b));
    const double s = std::sin(theta);
    CHECK(g.op_norm == doctest::Approx(s).epsilon(1e-10));
    CHECK(g.hs_norm_sq == doctest::Approx(2 * s * s).epsilon(1e-12));
    CHECK(g.perp_dot == doctest::Approx(s * s).epsilon(1e-12));
  }
}

TEST_CASE("operator norm agrees with the largest singular value") {
  Mat a(3, 3);
  a << 3, 0, 0, 0, -5, 0, 0, 0, 1;
  CHECK(operator_norm(a) == doctest::Approx(5.0));
  Mat r(2, 2);
  r << 1, 1, 0, 1;
  CHECK(operator_norm(r) == doctest::Approx((1 + std::sqrt(5.0)) / 2));
}

TEST_CASE("tangential divergence of a linear field is the trace against S") {
  Mat j(3, 3);
  j << 1, 2, 3, 4, 5, 6, 7, 8, 9;
  const Plane t = Plane::coordinate(3, 2);
  CHECK(tangential_divergence(j, t) == doctest::Approx(6.0));
}

TEST_CASE("nearest projection recovers a perturbed projector") {
  std::mt19937_64 rng(3);
  const Plane p = random_plane(3, 2, rng);
  Mat noisy = p.proj();
  noisy(0, 1) += 1e-3;
  noisy(1, 0) += 1e-3;
  const Mat q = nearest_projection(noisy, 2);
  CHECK((q * q - q).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((q - p.proj()).norm() < 1e-2);
}

TEST_CASE("cylinder and ball membership") {
  const Cylinder c(Plane::coordinate(3, 2), Vec::Zero(3), 1.0);
  CHECK(c.contains(make_vec({0.5, 0.5, 100.0})));
  CHECK_FALSE(c.contains(make_vec({1.0, 0.0, 0.0})));
  const Ball open(Vec::Zero(3), 1.0, false), closed(Vec::Zero(3), 1.0, true);
  CHECK_FALSE(open.contains(make_vec({1.0, 0.0, 0.0})));
  CHECK(closed.contains(make_vec({1.0, 0.0, 0.0})));
}

TEST_CASE("unit ball volumes") {
  CHECK(unit_ball_volume(1) == doctest::Approx(2.0));
  CHECK(unit_ball_volume(2) == doctest::Approx(std::numbers::pi));
  CHECK(unit_ball_volume(3) == doctest::Approx(4.0 * std::numbers::pi / 3.0));
}
