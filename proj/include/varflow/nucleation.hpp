#pragma once

#include "varflow/geom.hpp"
#include "varflow/varifold.hpp"

#include <optional>
#include <string>

namespace varflow {

/// g(s) = s / ln^alpha(1/s), the admissible height profile near the
/// singular point.
struct GrowthEnvelope {
  double alpha = 0.51;
  double r0 = 0.1;
  bool allow_critical = false;

  GrowthEnvelope() = default;
  GrowthEnvelope(double alpha_, double r0_, bool allow_critical_ = false);
};

double envelope_value(const GrowthEnvelope& e, double s);

struct EnvelopeCheck {
  bool pass;
  double worst_excess;  // max(|x_{n+1}| - g(|x'|)) over checked vertices, or 0
  std::size_t checked;
};

/// Every vertex with |x'| < r0 and |x_{n+1}| < r0 must satisfy
/// |x_{n+1}| <= g(|x'|). T must be a hyperplane.
EnvelopeCheck envelope_check(const DiscreteVarifold& v, const GrowthEnvelope& e, const Plane& t, double r0);

struct SquashMap {
  double delta = 0.2;
};

/// New normal coordinate for the point (|x'| = rho, x_{n+1} = z), or
/// nullopt where the map is the identity.
std::optional<double> squash_normal(double delta, double rho, double z);

/// The squash map in unit scale. Returns x itself (bitwise) where the map
/// is the identity.
Vec squash_point(const SquashMap& m, const Plane& t, const Vec& x);

struct NucleationOptions {
  /// Relative (to eps) tolerance for welding coincident vertices.
  double weld_tol = 1e-9;
  /// Skip the height-bound precondition (only for diagnostics).
  bool skip_precondition = false;
};

/// Largest |x_{n+1}| / eps over vertices in U_{2 eps}; the precondition
/// requires it to be at most 1/20.
double nucleation_height_ratio(const DiscreteVarifold& v, const Plane& t, double eps);

/// x -> eps * g(x / eps) on vertices of U_{2 eps}, followed by welding of
/// coincident vertices, removal of collapsed faces and merging of
/// overlapping sheets into a single multiplicity-one sheet.
/// Throws PreconditionFailed when eps is too large for the input.
DiscreteVarifold nucleate(const DiscreteVarifold& v, const Plane& t, double eps, const SquashMap& m,
                          const NucleationOptions& opt = {});

struct NucleationReport {
  bool locality = false;       // outside U_{2 eps} unchanged
  bool height = false;         // inside U_{2 eps} under the envelope
  bool mass_bound = false;     // mass in U_{2 eps} <= (4 eps)^n omega_n (Q+1)
  bool hole = false;           // mass in C(eps) cap U_{2 eps} <= omega_n eps^n (2% allowance)
  double worst_height_excess = 0.0;
  double mass_ball_before = 0.0;
  double mass_ball_after = 0.0;
  double mass_bound_rhs = 0.0;
  double mass_hole_before = 0.0;
  double mass_hole_after = 0.0;
  double mass_hole_rhs = 0.0;
  std::string partition = "not checked";
  std::string containment = "containment assumed by construction";

  bool all_checked_pass() const { return locality && height && mass_bound && hole; }
};

NucleationReport verify_nucleation(const DiscreteVarifold& before, const DiscreteVarifold& after, const Plane& t,
                             double eps, const GrowthEnvelope& e, int q, int quad_order = 3);

enum class FixtureKind { flat_stack, branched_disk, perturbed_stack };

FixtureKind parse_fixture_kind(const std::string& s);
std::string to_string(FixtureKind k);

struct FixtureParams {
  double radius = 0.4;
  double spacing = 0.001;   // sheet separation for the stacks
  double amplitude = 0.04;  // c for branched sheets, saddle height for perturbed stacks
  double beta = 1.0 / 3.0;
};

/// Q sheets over the hex disk of the given level, all graphs over the
/// x1x2-plane, outer rim flagged as boundary.
DiscreteVarifold make_fixture(FixtureKind kind, int q, int level, const FixtureParams& p = {});

}  // namespace varflow
