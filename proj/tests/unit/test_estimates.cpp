#include "varflow/estimates.hpp"
#include "varflow/mesh_gen.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace varflow;

namespace {

const Plane kT = Plane::coordinate(3, 2);

ExpandingHolesConfig unit_config() {
  return ExpandingHolesConfig(kT, 0.0, 1.0, 1.0, std::numbers::sqrt2, std::numbers::sqrt2, 2.0, make_profile(0.1, 2));
}

DiscreteVarifold lifted_disk(int level, double radius, double height) {
  const DiscreteVarifold d = hex_disk(level, radius);
  std::vector<Vec> pts = d.vertices();
  for (auto& p : pts) p[2] = height;
  return with_vertices(d, pts);
}

FlowTrajectory still(const DiscreteVarifold& v, double t_end, int n) {
  FlowTrajectory traj;
  for (int i = 0; i <= n; ++i) traj.snapshots.push_back({t_end * i / n, v});
  traj.ledger.push_back({0.0, v.mass(), 0.0, 0.0, 0.0});
  return traj;
}

}  // namespace

TEST_CASE("expanding holes configuration") {
  const ExpandingHolesConfig c = unit_config();
  CHECK(c.sigma() == doctest::Approx(1.0));
  CHECK(c.radius(0.0) == doctest::Approx(1.0));
  CHECK(c.radius(1.0) == doctest::Approx(std::numbers::sqrt2));
  CHECK(c.radius(0.5) == doctest::Approx(std::sqrt(1.5)));
  CHECK_THROWS_AS(ExpandingHolesConfig(kT, 1.0, 0.5, 1.0, 2.0, 1.0, 2.0, make_profile(0.1, 2)), InvalidArgument);
  CHECK_THROWS_AS(ExpandingHolesConfig(kT, 0.0, 1.0, 2.0, 1.0, 1.0, 2.0, make_profile(0.1, 2)), InvalidArgument);
  CHECK_THROWS_AS(ExpandingHolesConfig(kT, 0.0, 1.0, 1.0, 2.0, 2.0, 2.0, make_profile(0.1, 2)), InvalidArgument);
}

TEST_CASE("L2 excess of a plane at height c is c^2 times the disk area") {
  const double c = 0.1, r = 0.5;
  const DiscreteVarifold d = lifted_disk(4, 1.0, c);
  CHECK(mu_squared(d, kT, r, 3, std::numeric_limits<double>::infinity(), 5) ==
        doctest::Approx(c * c * std::numbers::pi * r * r).epsilon(2e-3));
  CHECK(mu_squared(d, kT, r, 3, 0.05) == 0.0);
  CHECK(mu_squared(hex_disk(4, 1.0), kT, r) == 0.0);
  CHECK_THROWS_AS(mu_squared(d, kT, 0.0), InvalidArgument);
}

TEST_CASE("refined quadrature converges for the excess") {
  const DiscreteVarifold d = lifted_disk(3, 1.0, 0.2);
  const double exact = 0.04 * std::numbers::pi * 0.49;
  const double coarse = std::abs(mu_squared(d, kT, 0.7, 3, 1.0, 0) - exact);
  const double fine = std::abs(mu_squared(d, kT, 0.7, 3, 1.0, 5) - exact);
  CHECK(fine < coarse);
  CHECK(fine < 1e-3 * exact);
}

TEST_CASE("excess is scale covariant") {
  const DiscreteVarifold s = icosphere(2, 0.3, make_vec({0.05, 0.0, 0.1}));
  for (double lambda : {0.5, 2.0, 3.0}) {
    const DiscreteVarifold w = parabolic_rescale(s, lambda);
    const double a = mu_squared(s, kT, 0.25);
    const double b = mu_squared(w, kT, 0.25 / lambda) * std::pow(lambda, 4);
    CHECK(b == doctest::Approx(a).epsilon(1e-12));
  }
}

TEST_CASE("dissipation check on a plane in T is an equality") {
  const ExpandingHolesConfig c = unit_config();
  const DissipationRecord r = dissipation_check(hex_disk(3, 1.9), c, 0.5);
  CHECK(r.lhs == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(r.rhs == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(r.mu_sq == 0.0);
  CHECK(r.pass);
}

TEST_CASE("support in the forbidden annulus is refused") {
  const ExpandingHolesConfig c = unit_config();
  const DiscreteVarifold blob = icosphere(1, 0.05, make_vec({0.5, 0.0, 1.7}));
  CHECK_THROWS_AS(dissipation_check(blob, c, 0.0), InvalidArgument);
}

TEST_CASE("expanding holes run on a stationary plane stack") {
  const DiscreteVarifold d = disjoint_union(hex_disk(3, 1.9), lifted_disk(3, 1.9, 0.0));
  const ExpandingHolesConfig c = unit_config();
  const ExcessReport rep = expanding_holes_run(still(d, 1.0, 4), c);
  CHECK(rep.dissipation_pass);
  CHECK(rep.mu_bar_sq == 0.0);
  CHECK(rep.empirical_M == 0.0);
  CHECK(std::abs(rep.gain) < 1e-6);
  CHECK(rep.times.size() == 5u);
  std::ostringstream os;
  write_excess_report_json(os, rep, c);
  CHECK(os.str().find("\"empirical_M\"") != std::string::npos);
}

TEST_CASE("L2 height bound on constant planes") {
  const FlowTrajectory flat = still(hex_disk(3, 1.0), 0.01, 2);
  const HeightBoundRecord r0 = l2_height_bound_check(flat, kT, 0.1, 2.0);
  CHECK(r0.lhs == 0.0);
  CHECK(r0.pass);
  const double c = 0.02;
  const FlowTrajectory up = still(lifted_disk(6, 1.0, c), 0.01, 2);
  const HeightBoundRecord r1 = l2_height_bound_check(up, kT, 0.1, 2.0);
  // The ball U_R meets the plane in a disk of radius sqrt(R^2 - c^2).
  CHECK(r1.lhs == doctest::Approx(c * c * std::numbers::pi * (0.01 - c * c) / 1e-4).epsilon(0.05));
  CHECK(r1.pass);
  CHECK_THROWS_AS(l2_height_bound_check(up, kT, 0.1, 1.5), InvalidArgument);
}

TEST_CASE("Gaussian density supremum of a flat disk is about one") {
  const FlowTrajectory flat = still(hex_disk(5, 1.0), 0.01, 2);
  CHECK(gaussian_density_sup(flat, 0.1, 0.05) == doctest::Approx(1.0).epsilon(0.02));
}
