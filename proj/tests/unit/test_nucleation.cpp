#include "varflow/nucleation.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace varflow;

TEST_CASE("squash map values in the inner cylinder") {
  const double d = 0.2;
  CHECK(*squash_normal(d, 0.5, 0.05) == 0.0);
  CHECK(*squash_normal(d, 0.5, -0.1) == 0.0);
  CHECK(*squash_normal(d, 0.5, 0.15) == doctest::Approx(0.1));
  CHECK(*squash_normal(d, 0.5, -0.15) == doctest::Approx(-0.1));
  CHECK_FALSE(squash_normal(d, 0.5, 0.2).has_value());
  CHECK_FALSE(squash_normal(d, 0.5, 0.3).has_value());
}

TEST_CASE("squash map values in the annulus") {
  const double d = 0.2;
  CHECK_FALSE(squash_normal(d, 1.1, 0.05).has_value());
  CHECK(*squash_normal(d, 1.1, 0.12) == doctest::Approx(0.1));
  CHECK(*squash_normal(d, 1.1, 0.18) == doctest::Approx(0.16));
  CHECK(*squash_normal(d, 1.1, -0.12) == doctest::Approx(-0.1));
  CHECK(*squash_normal(d, 1.1, -0.18) == doctest::Approx(-0.16));
  CHECK_FALSE(squash_normal(d, 1.25, 0.1).has_value());
}

TEST_CASE("squash map is continuous across its case boundaries") {
  const double d = 0.2;
  auto g = [&](double rho, double z) { return squash_normal(d, rho, z).value_or(z); };
  const double h = 1e-9;
  for (double rho : {0.3, 1.0, 1.05, 1.1, 1.15, 1.2}) {
    for (int i = -100; i <= 100; ++i) {
      const double z = 0.3 * i / 100.0;
      CHECK(std::abs(g(rho, z + h) - g(rho, z)) <= 2.0 * h + 1e-12);
      CHECK(std::abs(g(rho + h, z) - g(rho, z)) <= 2.0 * h + 1e-12);
    }
  }
}

TEST_CASE("squash map is not idempotent") {
  // z = 0.15 lands at 0.1 and then at 0.
  const SquashMap m{};
  const Plane t = Plane::coordinate(3, 2);
  const Vec x = make_vec({0.0, 0.0, 0.15});
  const Vec once = squash_point(m, t, x);
  const Vec twice = squash_point(m, t, once);
  CHECK(once[2] == doctest::Approx(0.1));
  CHECK(twice[2] == 0.0);
}

TEST_CASE("growth envelope") {
  const GrowthEnvelope e(0.51, 0.1);
  const double s = 0.05;
  CHECK(envelope_value(e, s) == doctest::Approx(s / std::pow(std::log(1.0 / s), 0.51)));
  CHECK_THROWS_AS(GrowthEnvelope(0.5, 0.1), InvalidArgument);
  CHECK_NOTHROW(GrowthEnvelope(0.5, 0.1, true));
}

TEST_CASE("fixtures: density ratio near Q and envelope behaviour") {
  const Plane t = Plane::coordinate(3, 2);
  for (int q : {2, 3}) {
    const DiscreteVarifold v = make_fixture(FixtureKind::flat_stack, q, 4);
    CHECK(density_ratio(v, Vec::Zero(3), 0.2) == doctest::Approx(q).epsilon(0.02));
  }
  const DiscreteVarifold b = make_fixture(FixtureKind::branched_disk, 2, 4);
  CHECK(envelope_check(b, GrowthEnvelope(0.51, 0.3), t, 0.3).pass);
  CHECK(parse_fixture_kind("perturbed_stack") == FixtureKind::perturbed_stack);
  CHECK(to_string(FixtureKind::branched_disk) == "branched_disk");
  CHECK_THROWS_AS(parse_fixture_kind("torus"), InvalidArgument);
}

TEST_CASE("nucleation drops about (Q-1) pi eps^2 of mass") {
  const Plane t = Plane::coordinate(3, 2);
  const double eps = 0.05;
  const DiscreteVarifold before = make_fixture(FixtureKind::flat_stack, 2, 5);
  const DiscreteVarifold after = nucleate(before, t, eps, SquashMap{});
  const NucleationReport rep = verify_nucleation(before, after, t, eps, GrowthEnvelope{}, 2);
  CHECK(rep.all_checked_pass());
  const double drop = before.mass() - after.mass();
  CHECK(drop == doctest::Approx(std::numbers::pi * eps * eps).epsilon(0.1));
}

TEST_CASE("nucleation refuses a scale that is too large") {
  const Plane t = Plane::coordinate(3, 2);
  // Sheets 0.05 apart sit at height 0.25 eps for eps = 0.1.
  FixtureParams wide;
  wide.spacing = 0.05;
  const DiscreteVarifold before = make_fixture(FixtureKind::flat_stack, 2, 4, wide);
  CHECK(nucleation_height_ratio(before, t, 0.1) > 0.05);
  CHECK_THROWS_AS(nucleate(before, t, 0.1, SquashMap{}), PreconditionFailed);
}
