#include "varflow/mesh_gen.hpp"
#include "varflow/varifold.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace varflow;

namespace {

double regular_polygon_area(int n, double r) { return 0.5 * n * r * r * std::sin(2.0 * std::numbers::pi / n); }

}  // namespace

TEST_CASE("mesh generators have the advertised sizes and masses") {
  const DiscreteVarifold sq = square_grid(8);
  CHECK(sq.num_faces() == 128u);
  CHECK(sq.mass() == doctest::Approx(1.0).epsilon(1e-14));

  for (int level = 1; level <= 4; ++level) {
    const DiscreteVarifold d = hex_disk(level, 1.0);
    CHECK(d.num_faces() == 6u * (1u << (2 * level)));
    CHECK(d.mass() == doctest::Approx(regular_polygon_area(6 << level, 1.0)).epsilon(1e-12));
  }

  const DiscreteVarifold s = icosphere(4, 1.0);
  CHECK(s.num_faces() == 20u * 256u);
  CHECK(s.mass() < 4.0 * std::numbers::pi);
  CHECK(s.mass() > 0.99 * 4.0 * std::numbers::pi);

  const DiscreteVarifold c = circle_polygon(64, 2.0);
  CHECK(c.dim() == 1);
  CHECK(c.mass() == doctest::Approx(2.0 * 64 * 2.0 * std::sin(std::numbers::pi / 64)).epsilon(1e-13));

  const DiscreteVarifold u = disjoint_union(sq, s);
  CHECK(u.num_vertices() == sq.num_vertices() + s.num_vertices());
  CHECK(u.mass() == doctest::Approx(sq.mass() + s.mass()));
}

TEST_CASE("hex disk boundary is the outer ring") {
  const DiscreteVarifold d = hex_disk(3, 0.5);
  std::size_t count = 0;
  for (std::size_t i = 0; i < d.num_vertices(); ++i) {
    if (d.is_boundary(i)) {
      ++count;
      CHECK(d.vertex(i).norm() == doctest::Approx(0.5));
    }
  }
  CHECK(count == 48u);
}

TEST_CASE("flat disk has zero interior mean curvature") {
  const DiscreteVarifold d = hex_disk(3, 1.0);
  const MeanCurvature hf = mean_curvature(d);
  double worst = 0.0;
  for (const auto& h : hf.h) worst = std::max(worst, h.norm());
  CHECK(worst < 1e-12);
}

TEST_CASE("sphere mean curvature points inward with magnitude 2/r") {
  const double r = 0.7;
  const DiscreteVarifold s = icosphere(4, r);
  const MeanCurvature hf = mean_curvature(s);
  std::vector<int> valence(s.num_vertices(), 0);
  for (const auto& f : s.faces()) {
    for (int a : f.v) ++valence[a];
  }
  // The lumped operator is only pointwise consistent at valence-6 vertices.
  double weighted = 0.0, total = 0.0;
  for (std::size_t i = 0; i < s.num_vertices(); ++i) {
    const Vec expected = -2.0 * s.vertex(i) / (r * r);
    if (valence[i] == 6) CHECK((hf.h[i] - expected).norm() < 0.03 * expected.norm());
    weighted += hf.mass[i] * hf.h[i].dot(-s.vertex(i) / r);
    total += hf.mass[i];
  }
  CHECK(weighted / total == doctest::Approx(2.0 / r).epsilon(0.01));
  CHECK(perpendicularity_defect(s, hf) < 0.05);
}

TEST_CASE("circle and tube curvature") {
  const DiscreteVarifold c = circle_polygon(200, 2.0);
  const MeanCurvature hc = mean_curvature(c);
  for (const auto& h : hc.h) CHECK(h.norm() == doctest::Approx(0.5).epsilon(1e-3));
  const DiscreteVarifold t = cylinder_tube(0.5, 2.0, 64, 40);
  const MeanCurvature ht = mean_curvature(t);
  for (std::size_t i = 0; i < t.num_vertices(); ++i) {
    if (t.is_boundary(i)) {
      CHECK(ht.h[i].norm() == 0.0);
    } else {
      CHECK(ht.h[i].norm() == doctest::Approx(2.0).epsilon(0.02));
    }
  }
}

TEST_CASE("first variation of a flat disk vanishes for fields supported inside") {
  const DiscreteVarifold d = hex_disk(4, 1.0);
  const TestField g = bump_field(make_vec({0.1, -0.2, 0.0}), 0.5, make_vec({1.0, 0.5, 0.3}));
  CHECK(std::abs(first_variation(d, g)) < 1e-3);
}

TEST_CASE("first variation equals minus the integral of h against the field on a sphere") {
  const DiscreteVarifold s = icosphere(4, 1.0);
  const TestField g = bump_field(make_vec({0.3, 0.0, 0.2}), 1.5, make_vec({0.0, 0.0, 1.0}));
  const MeanCurvature hf = mean_curvature(s);
  double rhs = 0.0;
  for (std::size_t i = 0; i < s.num_vertices(); ++i) rhs -= hf.mass[i] * hf.h[i].dot(g.value(s.vertex(i)));
  CHECK(first_variation(s, g) == doctest::Approx(rhs).epsilon(0.02));
}

TEST_CASE("density ratio and weight measure") {
  const DiscreteVarifold d = hex_disk(5, 1.0);
  CHECK(density_ratio(d, Vec::Zero(3), 0.5) == doctest::Approx(1.0).epsilon(0.01));
  CHECK(weight_measure(d, [](const Vec&) { return 1.0; }) == doctest::Approx(d.mass()));
}

TEST_CASE("parabolic rescale scales mass by lambda^-n") {
  const DiscreteVarifold s = icosphere(2, 1.0);
  for (double lambda : {0.5, 3.0}) {
    CHECK(parabolic_rescale(s, lambda).mass() == doctest::Approx(s.mass() / (lambda * lambda)).epsilon(1e-13));
  }
}

TEST_CASE("squared test function") {
  const ScalarTest b = bump_scalar(Vec::Zero(3), 1.0, 2.0);
  const ScalarTest b2 = squared(b);
  const Vec x = make_vec({0.3, 0.1, -0.2});
  CHECK(b2.value(x, 0.0) == doctest::Approx(b.value(x, 0.0) * b.value(x, 0.0)));
  CHECK((b2.gradient(x, 0.0) - 2.0 * b.value(x, 0.0) * b.gradient(x, 0.0)).norm() < 1e-12);
  // Finite-difference check of the bump gradient.
  const double h = 1e-6;
  for (int k = 0; k < 3; ++k) {
    Vec e = Vec::Zero(3);
    e[k] = h;
    const double fd = (b.value(x + e, 0.0) - b.value(x - e, 0.0)) / (2 * h);
    CHECK(b.gradient(x, 0.0)[k] == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("DVAR round trip is exact") {
  const DiscreteVarifold s = icosphere(2, 0.3, make_vec({0.1, 0.2, 0.3}));
  std::stringstream ss;
  write_dvar(ss, s);
  const DiscreteVarifold back = read_dvar(ss);
  REQUIRE(back.num_vertices() == s.num_vertices());
  for (std::size_t i = 0; i < s.num_vertices(); ++i) CHECK(back.vertex(i) == s.vertex(i));
  CHECK(back.mass() == s.mass());
}

TEST_CASE("DVAR parse errors carry line numbers") {
  auto line_of = [](const std::string& text) -> std::size_t {
    std::istringstream is(text);
    try {
      read_dvar(is);
    } catch (const ParseError& e) {
      return e.line();
    }
    return 0;
  };
  CHECK(line_of("DVAR 1 3\nv 0 0 0\nv 1 0\n") == 3u);
  CHECK(line_of("# comment\nDVAR 2 3\n") == 2u);
  CHECK(line_of("DVAR 1 3\nv 0 0 0\nv 1 0 0\nv 0 1 0\nf 0 1 7 1\n") == 5u);
  CHECK(line_of("DVAR 1 3\nv 0 0 0\nv 1 0 0\nv 2 0 0\nf 0 1 2 1\n") == 5u);
  CHECK(line_of("DVAR 1 3\nx 1\n") == 2u);
  CHECK(line_of("") == 1u);
}

TEST_CASE("degenerate faces are refused") {
  const DiscreteVarifold sq = square_grid(1);
  std::vector<Vec> pts = sq.vertices();
  for (auto& p : pts) p[1] = 0.0;
  CHECK_THROWS_AS(with_vertices(sq, pts), InvalidArgument);
}
