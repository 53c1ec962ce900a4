// Runs every acceptance criterion once and prints one line per criterion.
// Exit status is 0 only if all of them pass.

#include "varflow/suites.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <string>
#include <vector>

namespace {

struct Criterion {
  int id;
  const char* suite;
  const char* title;
  double budget_seconds;
};

const std::vector<Criterion> kCriteria = {
    {1, "grassmann", "Grassmannian inequalities, 1e4 pairs, 1e-10", 5},
    {2, "heat", "heat-kernel identity, 1e3 samples, k in {1,2}, 1e-8", 5},
    {3, "squash", "squash map Lipschitz, idempotence, normal coordinate", 10},
    {4, "nucleation", "nucleation on the Q=2 flat stack, eps 0.05, level 5", 30},
    {5, "sphere", "shrinking sphere r^2 = 1 - 4t within 2%, ledger within 5%", 120},
    {6, "brakke", "Brakke tester: stationary plane and sphere", 120},
    {7, "expanding-holes", "expanding holes: dissipation and M across levels 4, 5", 600},
    {8, "series", "series tail, asymptotics and alpha = 1/2 divergence", 60},
    {9, "experiment", "reference experiment: mass drop, weighted masses, determinism", 1200},
    {10, "covariance", "parabolic scale covariance to 1e-10", 10},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  int failed = 0;
  for (const auto& c : kCriteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), c.id) == only.end()) continue;
    varflow::SuiteResult r;
    std::string error;
    try {
      r = varflow::run_suite(c.suite);
    } catch (const std::exception& e) {
      r.pass = false;
      error = e.what();
    }
    const bool in_time = r.seconds <= c.budget_seconds;
    const bool ok = r.pass && in_time && error.empty();
    if (!ok) ++failed;
    std::printf("criterion %2d %s: %s (%.2fs of %.0fs)\n", c.id, ok ? "PASS" : "FAIL", c.title, r.seconds,
                c.budget_seconds);
    for (const auto& line : r.lines) {
      if (!ok || line.rfind("info", 0) == 0) std::printf("    %s\n", line.c_str());
    }
    if (!error.empty()) std::printf("    error: %s\n", error.c_str());
    if (!in_time) std::printf("    over the time budget\n");
    std::fflush(stdout);
  }
  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
