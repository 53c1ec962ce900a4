#include "varflow/iteration.hpp"
#include "varflow/mesh_gen.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <sstream>

using namespace varflow;

// Reference values from an independent 40-digit evaluation of the formula.
TEST_CASE("a_q^2 matches high-precision reference values") {
  struct Ref {
    long q;
    double alpha;
    double value;
  };
  const Ref refs[] = {{3, 0.51, 3.9115252382487948818},
                      {10, 0.51, 34.83770204699447878},
                      {100, 0.75, 90.989870176185734068},
                      {1000, 1.0, 29.036223228127924099},
                      {12345, 0.6, 1.459668710302893501}};
  for (const auto& r : refs) {
    CHECK(static_cast<double>(a_q_squared(r.q, r.alpha, 2)) == doctest::Approx(r.value).epsilon(1e-13));
  }
  CHECK(static_cast<double>(a_q_squared_real(1000.0L, 1.0, 2)) == doctest::Approx(29.036223228127924099).epsilon(1e-13));
  CHECK_THROWS_AS(a_q_squared(2, 0.6, 2), InvalidArgument);
}

TEST_CASE("partial and tail sums against reference values") {
  CHECK(static_cast<double>(partial_sum(3, 1000, 1.0, 2)) == doctest::Approx(53167.060600472238321).epsilon(1e-13));
  // Direct sum to 2e5 plus the integral from 200000.5, evaluated independently.
  CHECK(static_cast<double>(tail_sum(3, 1.0, 2)) == doctest::Approx(128452.54616039322016).epsilon(1e-8));
  CHECK(static_cast<double>(tail_sum(50, 1.0, 2)) == doctest::Approx(125846.26153102279958).epsilon(1e-8));
  CHECK(static_cast<double>(tail_sum(3, 0.75, 2)) == doctest::Approx(132074.32199591670102).epsilon(1e-6));
  const TailSum t = tail_sum_detail(10, 1.0, 2);
  CHECK(t.last_direct == 200000);
  CHECK(t.value == doctest::Approx(static_cast<double>(t.direct + t.remainder)));
  CHECK_THROWS_AS(tail_sum(3, 0.5, 2), InvalidArgument);
}

TEST_CASE("tail sum drops by exactly one term per index") {
  for (double alpha : {0.51, 0.75, 1.0}) {
    for (long k : {3L, 77L, 4000L}) {
      const long double d = tail_sum(k, alpha, 2) - tail_sum(k + 1, alpha, 2);
      CHECK(static_cast<double>(d) == doctest::Approx(static_cast<double>(a_q_squared(k, alpha, 2))).epsilon(1e-6));
    }
  }
}

TEST_CASE("tail sum decreases in K and increases as alpha decreases") {
  long double prev = tail_sum(3, 0.6, 2);
  for (long k : {10L, 1000L, 300000L, 10000000L}) {
    const long double s = tail_sum(k, 0.6, 2);
    CHECK(s < prev);
    prev = s;
  }
  CHECK(tail_sum(100, 0.6, 2) > tail_sum(100, 0.75, 2));
}

TEST_CASE("asymptotic ratio approaches (2/ln2)^{2 alpha}") {
  // First term alone: a_q^2 q^{2a} / ln^{n+2} q -> (2/ln 2)^{2a}.
  const double alpha = 0.75;
  const double limit = std::pow(2.0 / std::log(2.0), 2 * alpha);
  double prev_gap = 1e9;
  for (long q : {100L, 10000L, 1000000L}) {
    const double l = std::log(static_cast<double>(q));
    const double first = std::pow(l, 4) / std::pow(0.5 * (q - 1) * std::log(2.0) - std::log(l), 2 * alpha);
    const double gap = std::abs(first * std::pow(static_cast<double>(q), 2 * alpha) / std::pow(l, 4) / limit - 1.0);
    CHECK(gap < prev_gap);
    prev_gap = gap;
  }
  CHECK(prev_gap < 0.01);
}

TEST_CASE("log base switch divides every logarithm by ln 2") {
  const long q = 500;
  const double alpha = 0.8;
  const double l2 = std::log2(static_cast<double>(q));
  const double inner = std::log2(std::pow(2.0, 0.5 * (q - 1)) / l2);
  const double expected = std::pow(l2, 4) / std::pow(inner, 2 * alpha) + std::pow(l2, 4) * std::exp(-(l2 - 1) * (l2 - 1) / 8);
  CHECK(static_cast<double>(a_q_squared(q, alpha, 2, LogBase::two)) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(parse_log_base("two") == LogBase::two);
  CHECK(to_string(LogBase::natural) == "natural");
  CHECK_THROWS_AS(parse_log_base("ten"), InvalidArgument);
}

TEST_CASE("r1 is the largest admissible radius") {
  for (double alpha : {0.51, 0.75, 1.0}) {
    const long double lr = compute_log_r1(2, 0.1, alpha);
    const long double d1 = barrier_delta1(2);
    auto lhs = [&](long double x) { return d1 / std::pow(-x - std::log(d1), static_cast<long double>(alpha)); };
    CHECK(lhs(lr) < 1.0L);
    CHECK(std::exp(lr) * (std::sqrt(2.0L) + 2 * d1) < 0.1L);
    const bool at_cap = std::exp(lr + 1e-6L) * (std::sqrt(2.0L) + 2 * d1) >= 0.1L;
    CHECK((at_cap || lhs(lr + 1e-6L) >= 1.0L));
  }
}

TEST_CASE("conditions on the first index") {
  // 2^{(1-q)/2} ln q < r0 and 2^{-(q+1)/2} < r1.
  CHECK_FALSE(condition_r0(3, 0.1));
  long q = 3;
  while (!condition_r0(q, 0.1)) ++q;
  CHECK(std::pow(2.0, 0.5 * (1 - q)) * std::log(static_cast<double>(q)) < 0.1);
  CHECK(std::pow(2.0, 0.5 * (2 - q)) * std::log(static_cast<double>(q - 1)) >= 0.1);
  CHECK(condition_r1(20, std::log(0.001L)));
  CHECK_FALSE(condition_r1(18, std::log(0.001L)));
}

TEST_CASE("choose_K returns the largest of the three requirements") {
  const long double lr = compute_log_r1(2, 0.1, 1.0);
  const KChoice c = choose_K(1.0, 2, 1.0, 1e-3, 0.1, lr);
  CHECK(c.feasible);
  CHECK(c.k == std::max({c.k_r0, c.k_r1, c.k_tail}));
  CHECK(tail_sum(c.k_tail, 1.0, 2) <= 1e3L);
  CHECK(tail_sum(c.k_tail - 1, 1.0, 2) > 1e3L);
  CHECK(condition_r1(c.k_r1, lr));
  CHECK_FALSE(condition_r1(c.k_r1 - 1, lr));
  const KChoice tight = choose_K(0.51, 2, 1.0, 1.0, 0.1, compute_log_r1(2, 0.1, 0.51));
  CHECK_FALSE(tight.feasible);
}

TEST_CASE("schedule arithmetic") {
  const IterationSchedule s = make_schedule(200, 50, 0.51, 2, 0.1);
  CHECK(s.L.size() == 150u);
  CHECK(s.a_sq.size() == 150u);
  CHECK(s.eps_J == doctest::Approx(std::pow(2.0, -100.0)));
  CHECK(s.L.front() == doctest::Approx(std::log(199.0)));
  CHECK(s.L.back() == doctest::Approx(std::log(50.0)));
  CHECK(static_cast<double>(s.a_sq.front()) == doctest::Approx(static_cast<double>(a_q_squared(50, 0.51, 2))));
  std::ostringstream os;
  write_schedule_json(os, s);
  const auto j = nlohmann::json::parse(os.str());
  CHECK(j["J"] == 200);
  CHECK(j["K"] == 50);
  CHECK(j.contains("tail_sum"));
  CHECK_THROWS_AS(make_schedule(50, 50, 0.51, 2, 0.1), InvalidArgument);
}

TEST_CASE("density floor on stacked sheets") {
  const Plane t = Plane::coordinate(3, 2);
  const CutoffProfile chi = make_profile(0.1, 2);
  const DensityFloor two = density_floor_check(make_fixture(FixtureKind::flat_stack, 2, 4), chi, t, 0.2, 2);
  CHECK(two.threshold == doctest::Approx(1.5));
  CHECK(two.pass);
  const DensityFloor one = density_floor_check(hex_disk(4, 0.4), chi, t, 0.2, 2);
  CHECK_FALSE(one.pass);
}

TEST_CASE("orchestrate refuses an oversized scale before any flow") {
  ExperimentConfig cfg;
  cfg.level = 3;
  cfg.eps = 0.3;
  CHECK_THROWS_AS(orchestrate(cfg), PreconditionFailed);
  ExperimentConfig crit;
  crit.alpha = 0.5;
  CHECK_THROWS_AS(orchestrate(crit), PreconditionFailed);
}
