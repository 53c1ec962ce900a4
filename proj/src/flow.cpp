#include "varflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>

namespace varflow {
namespace {

double min_edge_or_throw(const DiscreteVarifold& v) {
  const double e = min_edge_length(v);
  if (!(e > 0.0)) throw ResolutionExhausted("mesh has no edges");
  return e;
}

double lumped_dissipation(const MeanCurvature& hf) {
  Summer s;
  for (std::size_t i = 0; i < hf.h.size(); ++i) s.add(hf.mass[i] * hf.h[i].squaredNorm());
  return s.value();
}

DiscreteVarifold advance(const DiscreteVarifold& v, const MeanCurvature& hf, double dt) {
  std::vector<Vec> pts = v.vertices();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!v.is_boundary(i)) pts[i] += dt * hf.h[i];
  }
  return with_vertices(v, std::move(pts));
}

bool finite_mesh(const DiscreteVarifold& v) {
  for (const auto& p : v.vertices()) {
    if (!p.allFinite()) return false;
  }
  return true;
}

}  // namespace

DiscreteVarifold step(const DiscreteVarifold& v, double dt, double c_stab) {
  if (!(dt >= 0.0)) throw InvalidArgument("step: dt must be nonnegative");
  if (v.empty()) return v;
  const double e = min_edge_length(v);
  if (dt > c_stab * e * e) throw InvalidArgument("stability violated");
  return advance(v, mean_curvature(v), dt);
}

std::vector<double> FlowTrajectory::dissipation() const {
  std::vector<double> out;
  out.reserve(ledger.size());
  for (const auto& r : ledger) out.push_back(r.dissipation);
  return out;
}

const Snapshot& FlowTrajectory::at(double t) const {
  const double scale = std::max(1.0, std::abs(t_end()));
  for (const auto& s : snapshots) {
    if (std::abs(s.t - t) <= 1e-9 * scale) return s;
  }
  throw InvalidArgument("t outside span");
}

FlowTrajectory evolve(const DiscreteVarifold& v0, double duration, const FlowOptions& opt, double t0) {
  if (!(duration > 0.0)) throw InvalidArgument("evolve: t_end must be positive");
  if (!(opt.cadence > 0.0)) throw InvalidArgument("evolve: cadence must be positive");
  if (!(opt.dt_factor > 0.0) || opt.dt_factor > opt.c_stab) throw InvalidArgument("evolve: dt_factor must lie in (0, c_stab]");

  FlowTrajectory traj;
  traj.options = opt;
  const double mass0 = v0.mass();
  const double floor_len = opt.min_edge_floor * (v0.empty() ? 0.0 : median_edge_length(v0));
  traj.snapshots.push_back({t0, v0});
  traj.ledger.push_back({t0, mass0, 0.0, v0.empty() ? 0.0 : min_edge_length(v0), 0.0});

  const long n_snap = std::max(1L, static_cast<long>(std::ceil(duration / opt.cadence - 1e-9)));
  DiscreteVarifold cur = v0;
  double t = t0;
  double dissipated = 0.0;
  long steps = 0;
  for (long k = 1; k <= n_snap; ++k) {
    const double target = k == n_snap ? t0 + duration : t0 + static_cast<double>(k) * opt.cadence;
    while (t < target) {
      if (cur.empty()) {
        t = target;
        break;
      }
      if (++steps > opt.max_steps) throw ResolutionExhausted("resolution exhausted: step budget");
      double remesh_delta = 0.0;
      double e = min_edge_or_throw(cur);
      const bool periodic = opt.remesh_every > 0 && steps % opt.remesh_every == 0;
      const bool urgent = opt.remesh_every > 0 && e < opt.remesh_trigger * median_edge_length(cur);
      if (periodic || urgent) {
        RemeshStats st;
        cur = remesh(cur, opt.remesh, &st);
        remesh_delta = st.mass_delta;
        e = min_edge_or_throw(cur);
      }
      if (e < floor_len) throw ResolutionExhausted("resolution exhausted: edge length collapsed");
      double dt = opt.dt_factor * e * e;
      if (t + dt >= target || target - (t + dt) < 1e-3 * dt) dt = target - t;
      MeanCurvature hf;
      try {
        hf = mean_curvature(cur);
      } catch (const InvalidArgument& ex) {
        throw ResolutionExhausted(std::string("resolution exhausted: ") + ex.what());
      }
      const double before = cur.mass();
      try {
        cur = advance(cur, hf, dt);
      } catch (const InvalidArgument&) {
        throw ResolutionExhausted("resolution exhausted: degenerate face");
      }
      if (!finite_mesh(cur)) throw ResolutionExhausted("resolution exhausted: non-finite vertex");
      t = dt == target - t ? target : t + dt;
      const double d = dt * lumped_dissipation(hf);
      dissipated += d;
      const double mass = cur.mass();
      if (before > 0) traj.mass_increase = std::max(traj.mass_increase, (mass - before) / before);
      traj.ledger.push_back({t, mass, d, min_edge_length(cur), remesh_delta});
      if (mass0 > 0) traj.ledger_excess = std::max(traj.ledger_excess, (mass + dissipated) / mass0 - 1.0);
    }
    traj.snapshots.push_back({t, cur});
  }
  traj.valid = traj.ledger_excess <= opt.tol_ledger;
  return traj;
}

void write_ledger_csv(std::ostream& os, const FlowTrajectory& traj) {
  const auto old = os.precision(17);
  os << "t,mass,dissipation,min_edge,remesh_delta\n";
  for (const auto& r : traj.ledger) {
    os << r.t << ',' << r.mass << ',' << r.dissipation << ',' << r.min_edge << ',' << r.remesh_delta << '\n';
  }
  os.precision(old);
}

BrakkeResult brakke_inequality_test(const FlowTrajectory& traj, const ScalarTest& phi, double t1, double t2,
                                    int quad_order) {
  if (!(t1 < t2)) throw InvalidArgument("brakke test needs t1 < t2");
  const Snapshot& first = traj.at(t1);
  const Snapshot& last = traj.at(t2);
  auto mass_phi = [&](const Snapshot& s) {
    return integrate(s.v, quad_order, [&](const Vec& x, std::size_t, const auto&) { return phi.value(x, s.t); });
  };
  std::vector<double> ts, gs;
  for (const auto& s : traj.snapshots) {
    if (s.t < first.t || s.t > last.t) continue;
    double g = 0.0;
    if (!s.v.empty()) {
      const MeanCurvature hf = mean_curvature(s.v);
      g = weighted_first_variation(s.v, phi, s.t, hf, quad_order) +
          integrate(s.v, quad_order,
                    [&](const Vec& x, std::size_t, const auto&) { return phi.time_derivative(x, s.t); });
    }
    ts.push_back(s.t);
    gs.push_back(g);
  }
  Summer rhs;
  for (std::size_t i = 1; i < ts.size(); ++i) rhs.add(0.5 * (ts[i] - ts[i - 1]) * (gs[i] + gs[i - 1]));
  BrakkeResult r;
  r.lhs = mass_phi(last) - mass_phi(first);
  r.rhs = rhs.value();
  r.slack = r.rhs - r.lhs;
  return r;
}

double SphereBarrier::radius(double t) const {
  const double r2 = initial_radius * initial_radius - 2.0 * n * (t - t0);
  return r2 > 0 ? std::sqrt(r2) : 0.0;
}

double SphereBarrier::extinction_time() const { return t0 + initial_radius * initial_radius / (2.0 * n); }

bool SphereBarrier::contains(const Vec& x, double t) const {
  if (t >= extinction_time()) return false;
  return (x - center).norm() <= radius(t);
}

double barrier_delta1(int n) { return (8.0 * n + 2.0) / (std::numbers::sqrt2 - 1.0); }

BarrierSetup sphere_barrier_from_scale(double r, int n, const Plane& t, int sign, int samples) {
  if (!(r > 0)) throw InvalidArgument("barrier scale must be positive");
  if (t.dim() != n || t.ambient() != n + 1) throw InvalidArgument("barrier needs a hyperplane of dimension n");
  const double d1 = barrier_delta1(n);
  const double height = r * (std::numbers::sqrt2 + std::sqrt(d1 * d1 - 8.0 * n - 2.0));
  const Vec nu = static_cast<double>(sign >= 0 ? 1 : -1) * t.normal();
  BarrierSetup out{SphereBarrier{height * nu, r * d1, n, 0.0}, d1, height - r * d1, false, false, 0.0};
  out.containment = out.min_height > r;

  // Sample the cylinder piece and check it sits inside A(4R^2).
  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss;
  const double tt = 4.0 * r * r;
  const double rad = out.barrier.radius(tt);
  const Mat basis = t.basis();
  double margin = std::numeric_limits<double>::infinity();
  auto probe = [&](const Vec& y) {
    margin = std::min(margin, (rad - (y - out.barrier.center).norm()) / r);
  };
  for (int i = 0; i < samples; ++i) {
    Vec dir(n);
    for (int k = 0; k < n; ++k) dir[k] = gauss(rng);
    dir.normalize();
    const double rr = std::numbers::sqrt2 * r * std::pow(unif(rng), 1.0 / n);
    const double z = r * (std::numbers::sqrt2 + (2.0 - std::numbers::sqrt2) * unif(rng));
    probe(basis * (rr * dir) + z * nu);
  }
  // The extreme corner |x'| = sqrt2 R, x_{n+1} = sqrt2 R.
  Vec e(n);
  e.setZero();
  e[0] = 1.0;
  probe(basis * (std::numbers::sqrt2 * r * e) + std::numbers::sqrt2 * r * nu);
  out.coverage_margin = margin;
  out.coverage = margin >= -1e-12;
  return out;
}

std::optional<double> barrier_monitor(const FlowTrajectory& traj, const SphereBarrier& b) {
  auto hits = [&](const DiscreteVarifold& v, double t) {
    for (const auto& p : v.vertices()) {
      if (b.contains(p, t)) return true;
    }
    for (std::size_t f = 0; f < v.num_faces(); ++f) {
      if (b.contains(v.face_centroid(f), t)) return true;
    }
    return false;
  };
  const Snapshot& s0 = traj.snapshots.front();
  if (hits(s0.v, s0.t)) throw InvalidArgument("barrier invalid");
  for (const auto& s : traj.snapshots) {
    if (s.t >= b.extinction_time()) break;
    if (hits(s.v, s.t)) return s.t;
  }
  return std::nullopt;
}

FlowTrajectory rescale_trajectory(const FlowTrajectory& traj, double lambda) {
  if (!(lambda > 0)) throw InvalidArgument("rescale: lambda must be positive");
  FlowTrajectory out;
  out.options = traj.options;
  out.options.cadence /= lambda * lambda;
  out.valid = traj.valid;
  out.ledger_excess = traj.ledger_excess;
  out.mass_increase = traj.mass_increase;
  const double ln = std::pow(lambda, traj.snapshots.empty() ? 0 : traj.snapshots.front().v.dim());
  for (const auto& s : traj.snapshots) out.snapshots.push_back({s.t / (lambda * lambda), parabolic_rescale(s.v, lambda)});
  for (auto r : traj.ledger) {
    r.t /= lambda * lambda;
    r.mass /= ln;
    r.dissipation /= ln;
    r.min_edge /= lambda;
    r.remesh_delta /= ln;
    out.ledger.push_back(r);
  }
  return out;
}

}  // namespace varflow
