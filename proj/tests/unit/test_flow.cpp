#include "varflow/flow.hpp"
#include "varflow/mesh_gen.hpp"
#include "varflow/remesh.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace varflow;

TEST_CASE("explicit step enforces the stability bound") {
  const DiscreteVarifold s = icosphere(2, 1.0);
  const double e = min_edge_length(s);
  CHECK_NOTHROW(step(s, 0.05 * e * e));
  CHECK_THROWS_AS(step(s, 0.2 * e * e), InvalidArgument);
}

TEST_CASE("a flat disk is stationary") {
  const DiscreteVarifold d = hex_disk(3, 1.0);
  FlowOptions fo;
  fo.cadence = 0.005;
  const FlowTrajectory traj = evolve(d, 0.01, fo);
  const DiscreteVarifold& last = traj.snapshots.back().v;
  CHECK(last.mass() == doctest::Approx(d.mass()).epsilon(1e-12));
  for (const auto& p : last.vertices()) CHECK(std::abs(p[2]) < 1e-14);
  CHECK(traj.ledger_excess < 1e-12);
}

TEST_CASE("shrinking circle follows r^2 = 1 - 2t") {
  const DiscreteVarifold c = circle_polygon(128, 1.0);
  FlowOptions fo;
  fo.cadence = 0.05;
  const FlowTrajectory traj = evolve(c, 0.3, fo);
  for (const auto& s : traj.snapshots) {
    double r = 0.0;
    for (const auto& p : s.v.vertices()) r += p.norm();
    r /= static_cast<double>(s.v.num_vertices());
    CHECK(r * r == doctest::Approx(1.0 - 2.0 * s.t).epsilon(0.01));
  }
}

TEST_CASE("shrinking sphere at a coarse level") {
  const DiscreteVarifold s = icosphere(3, 1.0);
  FlowOptions fo;
  fo.cadence = 0.05;
  const FlowTrajectory traj = evolve(s, 0.15, fo);
  CHECK(traj.valid);
  CHECK(traj.snapshots.size() == 4u);
  const auto& last = traj.snapshots.back();
  double r = 0.0;
  for (const auto& p : last.v.vertices()) r += p.norm();
  r /= static_cast<double>(last.v.num_vertices());
  CHECK(r * r == doctest::Approx(1.0 - 4.0 * 0.15).epsilon(0.03));
  // Mass is nonincreasing and the dissipation matches the mass loss.
  for (std::size_t i = 1; i < traj.ledger.size(); ++i) CHECK(traj.ledger[i].mass <= traj.ledger[i - 1].mass + 1e-12);
  double dissipated = 0.0;
  for (double d : traj.dissipation()) dissipated += d;
  CHECK(dissipated == doctest::Approx(s.mass() - last.v.mass()).epsilon(0.05));
}

TEST_CASE("snapshot lookup and time bounds") {
  const DiscreteVarifold s = icosphere(1, 1.0);
  FlowOptions fo;
  fo.cadence = 0.01;
  const FlowTrajectory traj = evolve(s, 0.03, fo, 1.0);
  CHECK(traj.t_begin() == 1.0);
  CHECK(traj.t_end() == doctest::Approx(1.03));
  CHECK(traj.at(1.02).t == doctest::Approx(1.02));
  CHECK_THROWS_AS(traj.at(1.5), InvalidArgument);
}

TEST_CASE("step budget exhaustion is reported") {
  const DiscreteVarifold s = icosphere(2, 1.0);
  FlowOptions fo;
  fo.max_steps = 3;
  CHECK_THROWS_AS(evolve(s, 0.1, fo), ResolutionExhausted);
}

TEST_CASE("ledger csv has a header and one row per step") {
  const DiscreteVarifold s = icosphere(1, 1.0);
  FlowOptions fo;
  fo.cadence = 0.01;
  const FlowTrajectory traj = evolve(s, 0.01, fo);
  std::ostringstream os;
  write_ledger_csv(os, traj);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "t,mass,dissipation,min_edge,remesh_delta");
  std::size_t rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == traj.ledger.size());
}

TEST_CASE("parabolic rescaling of a trajectory") {
  const DiscreteVarifold s = icosphere(2, 1.0);
  FlowOptions fo;
  fo.cadence = 0.02;
  const FlowTrajectory traj = evolve(s, 0.04, fo);
  const double lambda = 0.5;
  const FlowTrajectory w = rescale_trajectory(traj, lambda);
  CHECK(w.t_end() == doctest::Approx(traj.t_end() / (lambda * lambda)));
  CHECK(w.snapshots.back().v.mass() == doctest::Approx(traj.snapshots.back().v.mass() / (lambda * lambda)));
  CHECK(w.ledger.back().mass == doctest::Approx(traj.ledger.back().mass / (lambda * lambda)));
  CHECK(w.options.cadence == doctest::Approx(fo.cadence / (lambda * lambda)));
}

TEST_CASE("Brakke tester on the stationary plane has zero slack") {
  const DiscreteVarifold d = hex_disk(3, 1.0);
  FlowOptions fo;
  fo.cadence = 0.01;
  const FlowTrajectory traj = evolve(d, 0.02, fo);
  const ScalarTest phi = bump_scalar(make_vec({0.1, 0.0, 0.0}), 0.5, 1.0);
  const BrakkeResult r = brakke_inequality_test(traj, phi, 0.0, 0.02);
  CHECK(std::abs(r.lhs) < 1e-12);
  CHECK(std::abs(r.rhs) < 1e-12);
  CHECK_THROWS_AS(brakke_inequality_test(traj, phi, 0.02, 0.0), InvalidArgument);
}

TEST_CASE("sphere barrier radius and extinction") {
  SphereBarrier b{make_vec({0.0, 0.0, 2.0}), 1.0, 2, 0.5};
  CHECK(b.extinction_time() == doctest::Approx(0.5 + 0.25));
  CHECK(b.radius(0.5) == doctest::Approx(1.0));
  CHECK(b.radius(0.6) == doctest::Approx(std::sqrt(1.0 - 4.0 * 0.1)));
  CHECK(b.contains(make_vec({0.0, 0.0, 2.5}), 0.5));
  CHECK_FALSE(b.contains(make_vec({0.0, 0.0, 2.9}), 0.6));
}

TEST_CASE("barrier from scale certifies coverage") {
  const Plane t = Plane::coordinate(3, 2);
  const BarrierSetup up = sphere_barrier_from_scale(0.1, 2, t, 1);
  CHECK(up.containment);
  CHECK(up.coverage);
  CHECK(up.barrier.center[2] > 0.0);
  const BarrierSetup down = sphere_barrier_from_scale(0.1, 2, t, -1);
  CHECK(down.barrier.center[2] < 0.0);
  CHECK(barrier_delta1(2) > 0.0);
}

TEST_CASE("barrier monitor") {
  const DiscreteVarifold d = hex_disk(3, 1.0);
  FlowOptions fo;
  fo.cadence = 0.01;
  const FlowTrajectory traj = evolve(d, 0.02, fo);
  const SphereBarrier away{make_vec({0.0, 0.0, 0.5}), 0.2, 2, 0.0};
  CHECK_FALSE(barrier_monitor(traj, away).has_value());
  const SphereBarrier touching{make_vec({0.0, 0.0, 0.1}), 0.2, 2, 0.0};
  CHECK_THROWS_AS(barrier_monitor(traj, touching), InvalidArgument);
}
