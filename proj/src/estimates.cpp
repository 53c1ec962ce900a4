#include "varflow/estimates.hpp"

#include <json.hpp>

#include <cmath>
#include <ostream>

namespace varflow {
namespace {

void check_support(const DiscreteVarifold& v, const ExpandingHolesConfig& cfg) {
  auto stray = [&](const Vec& x) {
    if (cfg.t.project(x).norm() >= cfg.r2) return false;
    const double z = cfg.t.project_perp(x).norm();
    return z > cfg.rhat1 && z < cfg.rhat2;
  };
  for (const auto& p : v.vertices()) {
    if (stray(p)) throw InvalidArgument("support strays into forbidden annulus");
  }
  if (v.empty()) return;
  const auto rule = simplex_rule(v.dim(), cfg.quad_order);
  for (std::size_t f = 0; f < v.num_faces(); ++f) {
    for (const auto& q : rule) {
      if (stray(v.face_point(f, q.bary))) throw InvalidArgument("support strays into forbidden annulus");
    }
  }
}

double restricted_mass(const DiscreteVarifold& v, const ExpandingHolesConfig& cfg, double t, double cap) {
  const ScalarTest phi2 = cfg.phi_squared();
  const auto rule =
      composite_rule(v.dim(), cfg.quad_order, refinement_depth(v, 0.25 * cfg.profile.zeta() * cfg.radius(t)));
  return integrate_rule(v, rule, [&](const Vec& x, std::size_t, const auto&) {
    return cfg.t.project_perp(x).norm() <= cap ? phi2.value(x, t) : 0.0;
  });
}

}  // namespace

ExpandingHolesConfig::ExpandingHolesConfig(Plane t_, double t1_, double t2_, double r1_, double r2_,
                                           double rhat1_, double rhat2_, CutoffProfile profile_, int quad_order_)
    : t(std::move(t_)), t1(t1_), t2(t2_), r1(r1_), r2(r2_), rhat1(rhat1_), rhat2(rhat2_),
      profile(std::move(profile_)), quad_order(quad_order_) {
  if (!(t1 >= 0 && t1 < t2)) throw InvalidArgument("need 0 <= t1 < t2");
  if (!(r1 > 0 && r1 < r2)) throw InvalidArgument("need 0 < R1 < R2");
  if (!(rhat1 > 0 && rhat1 < rhat2)) throw InvalidArgument("need 0 < Rhat1 < Rhat2");
}

double ExpandingHolesConfig::radius(double time) const {
  const double r_sq = r1 * r1 + sigma() * (time - t1);
  if (!(r_sq > 0)) throw InvalidArgument("cylinder radius became nonpositive");
  return std::sqrt(r_sq);
}

ScalarTest ExpandingHolesConfig::phi_squared() const {
  return squared(expanding_cylinder_test(profile, t, r1 * r1, sigma(), t1));
}

double mu_squared(const DiscreteVarifold& v, const Plane& t, double r, int quad_order, double height_cap, int depth) {
  if (!(r > 0)) throw InvalidArgument("mu_squared: R must be positive");
  return integrate_rule(v, composite_rule(v.dim(), quad_order, depth), [&](const Vec& x, std::size_t, const auto&) {
    if (t.project(x).norm() >= r) return 0.0;
    const double z = t.project_perp(x).norm();
    return z <= height_cap ? z * z : 0.0;
  });
}

double alpha_squared(const DiscreteVarifold& v, const MeanCurvature& hf, const std::function<double(const Vec&)>& w,
                     int quad_order) {
  return integrate(v, quad_order, [&](const Vec& x, std::size_t f, const auto& bary) {
    const double wx = w(x);
    return wx == 0.0 ? 0.0 : interpolate(v, hf.h, f, bary).squaredNorm() * wx;
  });
}

DissipationRecord dissipation_check(const DiscreteVarifold& v, const ExpandingHolesConfig& cfg, double t) {
  check_support(v, cfg);
  const double r = cfg.radius(t);
  DissipationRecord rec{t, 0.0, 0.0, 0.0, 0.0, 0.0, true};
  rec.mu_sq = mu_squared(v, cfg.t, r, cfg.quad_order, cfg.rhat1, refinement_depth(v, r / 32));
  if (!v.empty()) {
    const MeanCurvature hf = mean_curvature(v);
    const ScalarTest phi2 = cfg.phi_squared();
    auto inside = [&](const Vec& x) { return cfg.t.project_perp(x).norm() <= cfg.rhat1; };
    rec.alpha_sq = alpha_squared(
        v, hf, [&](const Vec& x) { return inside(x) ? phi2.value(x, t) : 0.0; }, cfg.quad_order);
    rec.lhs = integrate(v, cfg.quad_order, [&](const Vec& x, std::size_t f, const auto& bary) {
      if (!inside(x)) return 0.0;
      const Vec h = interpolate(v, hf.h, f, bary);
      return -phi2.value(x, t) * h.squaredNorm() + h.dot(phi2.gradient(x, t));
    });
  }
  const double rho = cfg.profile.rho();
  rec.rhs = -0.5 * rec.alpha_sq + 320.0 * rho * rho * rec.mu_sq / std::pow(r, 4);
  rec.tol = 0.1 * (std::abs(rec.lhs) + std::abs(rec.rhs)) + 1e-8;
  rec.pass = rec.lhs <= rec.rhs + rec.tol;
  return rec;
}

ExcessReport expanding_holes_run(const FlowTrajectory& traj, const ExpandingHolesConfig& cfg) {
  const Snapshot& first = traj.at(cfg.t1);
  const Snapshot& last = traj.at(cfg.t2);
  const int k = cfg.t.dim();
  ExcessReport rep;
  for (const auto& s : traj.snapshots) {
    if (s.t < first.t || s.t > last.t) continue;
    const double t = std::clamp(s.t, cfg.t1, cfg.t2);
    const DissipationRecord rec = dissipation_check(s.v, cfg, t);
    rep.times.push_back(s.t);
    rep.mu_sq.push_back(rec.mu_sq);
    rep.alpha_sq.push_back(rec.alpha_sq);
    rep.dissipation.push_back(rec);
    rep.dissipation_pass = rep.dissipation_pass && rec.pass;
    rep.mu_bar_sq = std::max(rep.mu_bar_sq, rec.mu_sq / std::pow(cfg.radius(t), k + 2));
  }
  rep.mass_ratio_start = std::pow(cfg.r1, -k) * restricted_mass(first.v, cfg, cfg.t1, cfg.rhat1);
  rep.mass_ratio_end = std::pow(cfg.r2, -k) * restricted_mass(last.v, cfg, cfg.t2, cfg.rhat2);
  rep.gain = rep.mass_ratio_end - rep.mass_ratio_start;
  const double lg = std::log(cfg.r2 / cfg.r1);
  rep.empirical_M = rep.mu_bar_sq > 0 ? rep.gain / (rep.mu_bar_sq * lg) : 0.0;
  rep.bound_rhs = rep.mass_ratio_start + rep.empirical_M * rep.mu_bar_sq * lg;
  return rep;
}

void write_excess_report_json(std::ostream& os, const ExcessReport& r, const ExpandingHolesConfig& cfg) {
  nlohmann::ordered_json j;
  j["config"] = {{"t1", cfg.t1},       {"t2", cfg.t2},         {"R1", cfg.r1},
                 {"R2", cfg.r2},       {"Rhat1", cfg.rhat1},   {"Rhat2", cfg.rhat2},
                 {"sigma", cfg.sigma()}, {"zeta", cfg.profile.zeta()}, {"rho", cfg.profile.rho()},
                 {"quad_order", cfg.quad_order}};
  j["times"] = r.times;
  j["mu_sq"] = r.mu_sq;
  j["alpha_sq"] = r.alpha_sq;
  auto& d = j["dissipation"] = nlohmann::ordered_json::array();
  for (const auto& rec : r.dissipation) {
    d.push_back({{"t", rec.t}, {"lhs", rec.lhs}, {"rhs", rec.rhs}, {"tol", rec.tol}, {"pass", rec.pass}});
  }
  j["mass_ratio_start"] = r.mass_ratio_start;
  j["mass_ratio_end"] = r.mass_ratio_end;
  j["mu_bar_sq"] = r.mu_bar_sq;
  j["gain"] = r.gain;
  j["bound_rhs"] = r.bound_rhs;
  j["empirical_M"] = r.empirical_M;
  j["dissipation_pass"] = r.dissipation_pass;
  os << j.dump(2) << '\n';
}

HeightBoundRecord l2_height_bound_check(const FlowTrajectory& traj, const Plane& t, double r, double l, double c,
                                        int quad_order) {
  if (!(r > 0)) throw InvalidArgument("height bound: R must be positive");
  if (!(l >= 2)) throw InvalidArgument("height bound: L must be at least 2");
  const double t0 = traj.t_begin();
  if (traj.t_end() < t0 + r * r * (1.0 - 1e-9)) throw InvalidArgument("trajectory too short");
  const int k = t.dim();
  const double lr = l * r;
  auto excess = [&](const DiscreteVarifold& v, double rad) {
    return integrate(v, quad_order, [&](const Vec& x, std::size_t, const auto&) {
      return x.norm() < rad ? t.project_perp(x).squaredNorm() : 0.0;
    });
  };
  auto ball_mass = [&](const DiscreteVarifold& v) {
    return integrate(v, quad_order, [&](const Vec& x, std::size_t, const auto&) { return x.norm() < lr ? 1.0 : 0.0; });
  };
  HeightBoundRecord rec{0.0, 0.0, 0.0, 0.0, 0.0, true};
  double sup_mass = 0.0;
  for (const auto& s : traj.snapshots) {
    if (s.t > t0 + r * r * (1.0 + 1e-9)) break;
    rec.lhs = std::max(rec.lhs, std::pow(r, -(k + 2)) * excess(s.v, r));
    sup_mass = std::max(sup_mass, ball_mass(s.v));
  }
  rec.initial_term = std::exp(0.25) * std::pow(r, -(k + 2)) * excess(traj.snapshots.front().v, lr);
  rec.tail_factor = std::pow(l, k + 2) * std::exp(-(l - 1) * (l - 1) / 8.0) * sup_mass / std::pow(lr, k);
  rec.rhs = rec.initial_term + c * rec.tail_factor;
  const double deficit = rec.lhs - rec.initial_term;
  rec.c_min = deficit <= 0 ? 0.0 : (rec.tail_factor > 0 ? deficit / rec.tail_factor : std::numeric_limits<double>::infinity());
  rec.pass = rec.lhs <= rec.rhs * (1.0 + 1e-12) + 1e-300;
  return rec;
}

double gaussian_density_sup(const FlowTrajectory& traj, double r0, double eps, int quad_order) {
  if (!(eps > 0 && eps <= r0)) throw InvalidArgument("density sup needs 0 < eps <= R0");
  constexpr int kGrid = 16;
  const double t0 = traj.t_begin();
  double sup = 0.0;
  for (const auto& s : traj.snapshots) {
    if (s.t > t0 + r0 * r0 * (1.0 + 1e-9)) break;
    const Vec origin = Vec::Zero(s.v.ambient());
    for (int i = 0; i < kGrid; ++i) {
      const double r = eps * std::pow(r0 / eps, static_cast<double>(i) / (kGrid - 1));
      sup = std::max(sup, density_ratio(s.v, origin, r, quad_order));
    }
  }
  return sup;
}

}  // namespace varflow
