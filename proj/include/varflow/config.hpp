#pragma once

#include "varflow/iteration.hpp"

#include <iosfwd>
#include <optional>
#include <string>

namespace varflow {

/// Flat `key = value` run configuration. Lines starting with '#' are ignored.
struct Config {
  double alpha = 0.51;
  int Q = 2;
  std::optional<double> r0;  // unset: 0.1, or 0.3 for the experiment
  double zeta = 0.1;
  double delta = 0.2;
  double eps = 0.05;
  int mesh_level = 5;
  double dt_factor = 0.1;
  int quad_order = 3;
  std::uint64_t seed = 0;
  LogBase log_base = LogBase::natural;
  bool allow_critical = false;
  FixtureKind kind = FixtureKind::branched_disk;
  int j = 2;

  double r0_or(double fallback) const { return r0.value_or(fallback); }

  /// Throws InvalidArgument on a violated invariant.
  void validate() const;
  /// One `key = value` line per field in a fixed order.
  std::string echo() const;
};

/// Throws ParseError with the offending line.
Config parse_config(std::istream& is, Config base = {});
Config load_config(const std::string& path, Config base = {});

/// Applies one key/value pair; throws InvalidArgument for unknown keys.
void set_config_value(Config& c, const std::string& key, const std::string& value);

ExperimentConfig to_experiment_config(const Config& c);

}  // namespace varflow
