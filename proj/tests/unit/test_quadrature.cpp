#include "varflow/quadrature.hpp"
#include "varflow/types.hpp"

#include <doctest.h>

#include <cmath>

using namespace varflow;

namespace {

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

// Mean of l0^a l1^b l2^c over the reference triangle: 2 a! b! c! / (a+b+c+2)!.
double triangle_moment(int a, int b, int c) { return 2.0 * factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + 2); }

double apply(std::span<const QuadPoint> rule, int a, int b, int c) {
  double s = 0.0;
  for (const auto& q : rule) s += q.w * std::pow(q.bary[0], a) * std::pow(q.bary[1], b) * std::pow(q.bary[2], c);
  return s;
}

double kink(std::span<const QuadPoint> rule) {
  double s = 0.0;
  for (const auto& q : rule) s += q.w * std::abs(q.bary[0] - 0.3);
  return s;
}

}  // namespace

TEST_CASE("triangle rules integrate monomials up to their degree") {
  const int degree[4] = {0, 1, 2, 4};
  for (int order = 1; order <= 3; ++order) {
    const auto rule = simplex_rule(2, order);
    for (int a = 0; a <= degree[order]; ++a) {
      for (int b = 0; a + b <= degree[order]; ++b) {
        for (int c = 0; a + b + c <= degree[order]; ++c) {
          CHECK(apply(rule, a, b, c) == doctest::Approx(triangle_moment(a, b, c)).epsilon(1e-13));
        }
      }
    }
  }
}

TEST_CASE("segment rules") {
  for (int order = 1; order <= 3; ++order) {
    const auto rule = simplex_rule(1, order);
    double w = 0.0, m1 = 0.0, m3 = 0.0;
    for (const auto& q : rule) {
      w += q.w;
      m1 += q.w * q.bary[0];
      m3 += q.w * std::pow(q.bary[0], 3);
    }
    CHECK(w == doctest::Approx(1.0));
    CHECK(m1 == doctest::Approx(0.5));
    if (order >= 2) CHECK(m3 == doctest::Approx(0.25));
  }
}

TEST_CASE("composite rules keep exactness and total weight") {
  for (int depth = 0; depth <= 3; ++depth) {
    const auto rule = composite_rule(2, 3, depth);
    CHECK(rule.size() == 6u * (1u << (2 * depth)));
    CHECK(apply(rule, 0, 0, 0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(apply(rule, 2, 1, 1) == doctest::Approx(triangle_moment(2, 1, 1)).epsilon(1e-12));
    const auto seg = composite_rule(1, 2, depth);
    CHECK(seg.size() == 2u * (1u << depth));
  }
}

TEST_CASE("composite rule converges on a kinked integrand") {
  // l0 has density 2(1 - u) on the reference triangle; E|l0 - 0.3| = 0.19533...
  const double exact = 0.1953333333333333;
  const double coarse = std::abs(kink(composite_rule(2, 3, 0)) - exact);
  const double fine = std::abs(kink(composite_rule(2, 3, 4)) - exact);
  CHECK(fine < coarse);
  CHECK(fine < 1e-4);
}

TEST_CASE("invalid orders are refused") {
  CHECK_THROWS_AS(simplex_rule(2, 0), InvalidArgument);
  CHECK_THROWS_AS(simplex_rule(2, 4), InvalidArgument);
  CHECK_THROWS_AS(simplex_rule(3, 1), InvalidArgument);
  CHECK_THROWS_AS(composite_rule(2, 2, 9), InvalidArgument);
}

TEST_CASE("Summer compensates cancellation") {
  Summer s;
  s.add(1e16);
  s.add(1.0);
  s.add(-1e16);
  CHECK(s.value() == 1.0);
}
