#pragma once

#include "varflow/geom.hpp"
#include "varflow/remesh.hpp"
#include "varflow/varifold.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace varflow {

/// Explicit step x <- x + dt h on interior vertices.
/// Throws InvalidArgument("stability violated") if dt > c_stab * min_edge^2.
DiscreteVarifold step(const DiscreteVarifold& v, double dt, double c_stab = 0.1);

struct FlowOptions {
  double dt_factor = 0.1;  // dt = dt_factor * min_edge^2
  double c_stab = 0.1;
  double cadence = 0.05;   // snapshot spacing in time
  int remesh_every = 25;   // 0 disables
  double remesh_trigger = 0.25;  // remesh early when min_edge < trigger * median
  RemeshOptions remesh;
  double tol_ledger = 0.05;
  long max_steps = 5'000'000;
  double min_edge_floor = 1e-6;  // relative to the initial median edge
  int quad_order = 3;
};

struct Snapshot {
  double t;
  DiscreteVarifold v;
};

struct LedgerRow {
  double t;
  double mass;
  double dissipation;  // dt * sum m_v |h_v|^2 for the step ending at t
  double min_edge;
  double remesh_delta;
};

struct FlowTrajectory {
  std::vector<Snapshot> snapshots;
  std::vector<LedgerRow> ledger;
  FlowOptions options;
  bool valid = true;
  double ledger_excess = 0.0;  // max_s (mass_s + D_s) / mass_0 - 1
  double mass_increase = 0.0;  // worst single-step increase relative to mass

  double t_begin() const { return snapshots.front().t; }
  double t_end() const { return snapshots.back().t; }
  std::vector<double> dissipation() const;
  const Snapshot& at(double t) const;
};

/// Runs from t0 to t0 + duration with snapshots at t0 + i * cadence and at
/// the end. Throws ResolutionExhausted when the mesh degenerates.
FlowTrajectory evolve(const DiscreteVarifold& v0, double duration, const FlowOptions& opt = {}, double t0 = 0.0);

void write_ledger_csv(std::ostream& os, const FlowTrajectory& traj);

struct BrakkeResult {
  double lhs;  // ||V_t2||(phi_t2) - ||V_t1||(phi_t1)
  double rhs;  // int_t1^t2 [delta(V,phi)(h) + ||V||(d_t phi)] dt, trapezoid
  double slack;
};

/// t1 and t2 must coincide with snapshot times.
BrakkeResult brakke_inequality_test(const FlowTrajectory& traj, const ScalarTest& phi, double t1, double t2,
                                    int quad_order = 3);

/// Closed ball of radius sqrt(R_b^2 - 2 n (t - t0)).
struct SphereBarrier {
  Vec center;
  double initial_radius;
  int n;
  double t0 = 0.0;

  double radius(double t) const;
  double extinction_time() const;
  bool contains(const Vec& x, double t) const;
};

struct BarrierSetup {
  SphereBarrier barrier;
  double delta1;
  double min_height;    // min of x_{n+1} over the initial ball
  bool containment;     // min_height > R
  bool coverage;        // A(4R^2) covers C(sqrt2 R) cap {sqrt2 R <= x_{n+1} <= 2R}
  double coverage_margin;  // min over samples of radius - distance, relative to R
};

double barrier_delta1(int n);

/// sign = +1 puts the ball above T, -1 below.
BarrierSetup sphere_barrier_from_scale(double r, int n, const Plane& t, int sign = 1, int samples = 4000);

/// Earliest snapshot time with a vertex or face centroid in A(t).
/// Throws InvalidArgument("barrier invalid") if V_0 already meets the ball.
std::optional<double> barrier_monitor(const FlowTrajectory& traj, const SphereBarrier& b);

/// (x, t) -> (x / lambda, t / lambda^2) on every snapshot and ledger row.
FlowTrajectory rescale_trajectory(const FlowTrajectory& traj, double lambda);

}  // namespace varflow
