#pragma once

#include "varflow/flow.hpp"
#include "varflow/kernels.hpp"

#include <iosfwd>
#include <limits>
#include <vector>

namespace varflow {

struct ExpandingHolesConfig {
  Plane t;
  double t1, t2;
  double r1, r2;
  double rhat1, rhat2;
  CutoffProfile profile;
  int quad_order = 3;

  /// Throws InvalidArgument unless 0 <= t1 < t2, 0 < R1 < R2 and 0 < Rhat1 < Rhat2.
  ExpandingHolesConfig(Plane t, double t1, double t2, double r1, double r2, double rhat1, double rhat2,
                       CutoffProfile profile, int quad_order = 3);

  double sigma() const { return (r2 * r2 - r1 * r1) / (t2 - t1); }
  double radius(double time) const;
  /// phi_t^2 with phi_t = chi(|Tx| / R(t)).
  ScalarTest phi_squared() const;
};

/// int over C(R) (and |T^perp x| <= height_cap) of |T^perp x|^2 d||V||,
/// with the quadrature rule refined depth times on every face.
double mu_squared(const DiscreteVarifold& v, const Plane& t, double r, int quad_order = 3,
                  double height_cap = std::numeric_limits<double>::infinity(), int depth = 0);

/// int |h|^2 w d||V|| with h interpolated from the vertex field.
double alpha_squared(const DiscreteVarifold& v, const MeanCurvature& hf, const std::function<double(const Vec&)>& w,
                     int quad_order = 3);

struct DissipationRecord {
  double t;
  double lhs;
  double rhs;
  double alpha_sq;
  double mu_sq;
  double tol;
  bool pass;
};

/// Throws InvalidArgument("support strays into forbidden annulus") if the
/// support meets C(R2) cap {Rhat1 < |T^perp x| < Rhat2}.
DissipationRecord dissipation_check(const DiscreteVarifold& v, const ExpandingHolesConfig& cfg, double t);

struct ExcessReport {
  std::vector<double> times;
  std::vector<double> mu_sq;
  std::vector<double> alpha_sq;
  std::vector<DissipationRecord> dissipation;
  double mass_ratio_start = 0.0;
  double mass_ratio_end = 0.0;
  double mu_bar_sq = 0.0;
  double gain = 0.0;
  double bound_rhs = 0.0;  // start + M mu_bar^2 log(R2/R1) with the empirical M
  double empirical_M = 0.0;
  bool dissipation_pass = true;
};

/// Snapshots in [t1, t2]; t1 and t2 must be snapshot times.
ExcessReport expanding_holes_run(const FlowTrajectory& traj, const ExpandingHolesConfig& cfg);

void write_excess_report_json(std::ostream& os, const ExcessReport& r, const ExpandingHolesConfig& cfg);

struct HeightBoundRecord {
  double lhs;
  double rhs;
  double initial_term;
  double tail_factor;  // L^{k+2} exp(-(L-1)^2/8) sup ||V_t||(U_LR) / (LR)^k
  double c_min;        // smallest constant making lhs <= rhs
  bool pass;
};

HeightBoundRecord l2_height_bound_check(const FlowTrajectory& traj, const Plane& t, double r, double l,
                                        double c = 1.0, int quad_order = 3);

/// sup of ||V_s||(U_R) / (omega_n R^n) over snapshots with s - t0 <= R0^2
/// and 16 log-spaced R in [eps, R0].
double gaussian_density_sup(const FlowTrajectory& traj, double r0, double eps, int quad_order = 3);

}  // namespace varflow
