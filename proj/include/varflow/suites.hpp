#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace varflow {

struct SuiteResult {
  std::string name;
  bool pass = true;
  std::vector<std::string> lines;  // one finding per line
  double seconds = 0.0;
};

SuiteResult suite_grassmann(int pairs = 10000, std::uint64_t seed = 1);
SuiteResult suite_profile();
SuiteResult suite_heat(int samples = 1000, std::uint64_t seed = 2);
SuiteResult suite_squash(int pairs = 100000, std::uint64_t seed = 3);
SuiteResult suite_nucleation(int level = 5, double eps = 0.05);
SuiteResult suite_sphere(int level = 4);
SuiteResult suite_brakke(int tests = 20, std::uint64_t seed = 4);
SuiteResult suite_expanding_holes(int coarse = 4, int fine = 5, double eps = 0.05);
SuiteResult suite_series();
SuiteResult suite_experiment(int level = 5);
SuiteResult suite_covariance();

/// Names accepted by run_suite, in acceptance order.
std::vector<std::string> suite_names();
/// Suites run by `verify` when no --suite is given.
std::vector<std::string> default_suites();
SuiteResult run_suite(const std::string& name, std::uint64_t seed = 0);

}  // namespace varflow
