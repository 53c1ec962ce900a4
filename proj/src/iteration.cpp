#include "varflow/iteration.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <json.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

namespace varflow {
namespace {

constexpr long kDirectFloor = 200000;
constexpr long kMaxK = 1000000000;

long double log_base_factor(LogBase b) { return b == LogBase::natural ? 1.0L : std::log(2.0L); }

long double log_add(long double a, long double b) {
  const long double m = std::max(a, b);
  if (m == -std::numeric_limits<long double>::infinity()) return m;
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

// ln a_q^2 as a function of u = ln q.
long double log_a_q(long double u, double alpha, int n, LogBase base) {
  const long double lb = log_base_factor(base);
  const long double ln2 = std::log(2.0L);
  const long double big_l = u / lb;
  if (!(big_l > 1.0L)) throw InvalidArgument("formula domain");
  const long double ln_l = std::log(big_l);
  // q - 1 = e^u (1 - e^{-u})
  const long double ln_qm1 = u + std::log1p(-std::exp(-u));
  const long double ratio = 2.0L * ln_l / (std::exp(ln_qm1) * ln2);
  if (!(ratio < 1.0L)) throw InvalidArgument("formula domain");
  const long double ln_d = std::log(ln2 / (2.0L * lb)) + ln_qm1 + std::log1p(-ratio);
  const long double head = (n + 2) * ln_l;
  const long double first = head - 2.0L * alpha * ln_d;
  const long double second = head - (big_l - 1.0L) * (big_l - 1.0L) / 8.0L;
  return log_add(first, second);
}

}  // namespace

LogBase parse_log_base(const std::string& s) {
  if (s == "natural" || s == "e") return LogBase::natural;
  if (s == "two" || s == "2") return LogBase::two;
  throw InvalidArgument("unknown log base '" + s + "'");
}

std::string to_string(LogBase b) { return b == LogBase::natural ? "natural" : "two"; }

long double a_q_squared_real(long double q, double alpha, int n, LogBase base) {
  if (!(q >= 3.0L)) throw InvalidArgument("formula domain");
  return std::exp(log_a_q(std::log(q), alpha, n, base));
}

long double a_q_squared(long q, double alpha, int n, LogBase base) {
  if (q < 3) throw InvalidArgument("formula domain");
  return a_q_squared_real(static_cast<long double>(q), alpha, n, base);
}

long double partial_sum(long k, long last, double alpha, int n, LogBase base) {
  if (k < 3) throw InvalidArgument("formula domain");
  long double s = 0.0L, c = 0.0L;
  for (long q = k; q <= last; ++q) {
    const long double x = a_q_squared(q, alpha, n, base);
    const long double t = s + x;
    c += std::abs(s) >= std::abs(x) ? (s - t) + x : (x - t) + s;
    s = t;
  }
  return s + c;
}

TailSum tail_sum_detail(long k, double alpha, int n, double rel_tol, LogBase base) {
  if (!(alpha > 0.5)) throw InvalidArgument("series may diverge");
  if (k < 3) throw InvalidArgument("formula domain");
  TailSum out{};
  out.last_direct = std::max(k, kDirectFloor);
  out.direct = partial_sum(k, out.last_direct, alpha, n, base);
  // sum_{q > Q} f(q) ~ int_{Q+1/2}^inf f(q) dq, integrated in u = ln q.
  const long double u0 = std::log(static_cast<long double>(out.last_direct) + 0.5L);
  auto g = [&](long double s) {
    const long double u = u0 + s;
    return std::exp(u + log_a_q(u, alpha, n, base));
  };
  boost::math::quadrature::exp_sinh<long double> integrator;
  long double err = 0.0L;
  out.remainder = integrator.integrate(g, 0.0L, std::numeric_limits<long double>::infinity(),
                                       static_cast<long double>(rel_tol), &err);
  out.value = out.direct + out.remainder;
  return out;
}

long double tail_sum(long k, double alpha, int n, double rel_tol, LogBase base) {
  return tail_sum_detail(k, alpha, n, rel_tol, base).value;
}

long double compute_log_r1(int n, double r0, double alpha) {
  if (!(r0 > 0 && alpha > 0)) throw InvalidArgument("r1 needs r0 > 0 and alpha > 0");
  const long double d1 = barrier_delta1(n);
  const long double ln_d1 = std::log(d1);
  const long double cap = std::log(static_cast<long double>(r0)) - std::log(std::numbers::sqrt2_v<long double> + 2.0L * d1);
  auto ok = [&](long double x) {
    if (!(x < cap)) return false;
    const long double inner = -x - ln_d1;
    return inner > 0 && d1 / std::pow(inner, static_cast<long double>(alpha)) < 1.0L;
  };
  long double lo = -1.0L, hi = cap;
  while (!ok(lo)) lo *= 2.0L;
  for (int i = 0; i < 200; ++i) {
    const long double mid = 0.5L * (lo + hi);
    (ok(mid) ? lo : hi) = mid;
  }
  return lo;
}

bool condition_r0(long q, double r0, LogBase base) {
  if (q < 3) return false;
  const long double lq = std::log(static_cast<long double>(q)) / log_base_factor(base);
  return (1.0L - q) / 2.0L * std::log(2.0L) + std::log(lq) < std::log(static_cast<long double>(r0));
}

bool condition_r1(long q, long double log_r1) { return (-q - 1.0L) / 2.0L * std::log(2.0L) < log_r1; }

KChoice choose_K(double alpha, int n, double budget, double constant, double r0, long double log_r1, LogBase base) {
  if (!(budget > 0 && constant > 0)) throw InvalidArgument("choose_K needs positive budget and constant");
  KChoice c{false, 0, 3, 3, 3};
  while (!condition_r0(c.k_r0, r0, base) && c.k_r0 <= kMaxK) ++c.k_r0;
  c.k_r1 = std::max<long>(3, static_cast<long>(std::floor(-1.0L - 2.0L * log_r1 / std::log(2.0L))));
  while (!condition_r1(c.k_r1, log_r1)) ++c.k_r1;
  while (c.k_r1 > 3 && condition_r1(c.k_r1 - 1, log_r1)) --c.k_r1;

  const long double target = static_cast<long double>(budget) / constant;
  if (tail_sum(3, alpha, n, 1e-8, base) <= target) {
    c.k_tail = 3;
  } else if (tail_sum(kMaxK, alpha, n, 1e-8, base) > target) {
    c.k_tail = kMaxK + 1;
  } else {
    long lo = 3, hi = kMaxK;  // tail(lo) > target >= tail(hi)
    while (hi - lo > 1) {
      const long mid = lo + (hi - lo) / 2;
      (tail_sum(mid, alpha, n, 1e-8, base) > target ? lo : hi) = mid;
    }
    c.k_tail = hi;
  }
  c.k = std::max({c.k_r0, c.k_r1, c.k_tail});
  c.feasible = c.k <= kMaxK;
  return c;
}

IterationSchedule make_schedule(long J, long K, double alpha, int n, double r0, LogBase base) {
  if (K < 3) throw InvalidArgument("formula domain");
  if (J < K + 1) throw InvalidArgument("schedule needs J >= K + 1");
  IterationSchedule s;
  s.J = J;
  s.K = K;
  s.alpha = alpha;
  s.n = n;
  s.r0 = r0;
  s.base = base;
  s.log_r1 = compute_log_r1(n, r0, alpha);
  s.eps_J = std::pow(2.0, -0.5 * static_cast<double>(J));
  const double lb = static_cast<double>(log_base_factor(base));
  for (long h = 1; h <= J - K; ++h) s.L.push_back(std::log(static_cast<double>(J - h)) / lb);
  s.conditions_ok = true;
  for (long q = K; q <= J - 1; ++q) {
    s.a_sq.push_back(a_q_squared(q, alpha, n, base));
    s.conditions_ok = s.conditions_ok && condition_r0(q, r0, base) && condition_r1(q, s.log_r1);
  }
  s.tail_sum = alpha > 0.5 ? tail_sum(K, alpha, n, 1e-8, base) : std::numeric_limits<long double>::infinity();
  return s;
}

void write_schedule_json(std::ostream& os, const IterationSchedule& s) {
  nlohmann::ordered_json j;
  j["J"] = s.J;
  j["K"] = s.K;
  j["alpha"] = s.alpha;
  j["n"] = s.n;
  j["r0"] = s.r0;
  j["log_r1"] = static_cast<double>(s.log_r1);
  j["eps_J"] = s.eps_J;
  j["log_base"] = to_string(s.base);
  j["L"] = s.L;
  auto& a = j["a_sq"] = nlohmann::ordered_json::array();
  for (long double x : s.a_sq) a.push_back(static_cast<double>(x));
  if (std::isfinite(static_cast<double>(s.tail_sum))) {
    j["tail_sum"] = static_cast<double>(s.tail_sum);
  } else {
    j["tail_sum"] = nullptr;
  }
  j["conditions_ok"] = s.conditions_ok;
  os << j.dump(2) << '\n';
}

DensityFloor density_floor_check(const DiscreteVarifold& gamma0, const CutoffProfile& chi, const Plane& t, double r,
                                 int q, int quad_order) {
  DensityFloor d{0.0, 1.0 + 0.5 * (q - 1), false};
  if (gamma0.empty()) return d;
  const int n = gamma0.dim();
  const double w = integrate(gamma0, quad_order, [&](const Vec& x, std::size_t, const auto&) {
    if (!(t.project_perp(x).norm() < std::numbers::sqrt2 * r)) return 0.0;
    const double c = cylindrical_cutoff(chi, t, r, x);
    return c * c;
  });
  d.ratio = w / (unit_ball_volume(n) * std::pow(r, n));
  d.pass = d.ratio >= d.threshold;
  return d;
}

ExperimentResult orchestrate(const ExperimentConfig& cfg) {
  return orchestrate(make_fixture(cfg.kind, cfg.q, cfg.level, cfg.fixture), cfg);
}

ExperimentResult orchestrate(const DiscreteVarifold& gamma0, const ExperimentConfig& cfg) {
  if (!(cfg.alpha > 0.5) && !cfg.allow_critical) throw PreconditionFailed("alpha must exceed 1/2");
  if (cfg.j < 0) throw InvalidArgument("j must be nonnegative");
  if (!(cfg.eps > 0)) throw InvalidArgument("eps must be positive");
  const int n = gamma0.dim();
  const Plane t = Plane::coordinate(n + 1, n);
  const double omega = unit_ball_volume(n);
  ExperimentResult res;

  const GrowthEnvelope env(cfg.alpha, cfg.r0, cfg.allow_critical);
  res.envelope = envelope_check(gamma0, env, t, cfg.r0);
  if (!res.envelope.pass) throw PreconditionFailed("fixture violates the growth envelope");
  const CutoffProfile chi = make_profile(cfg.zeta, n);
  for (int h = 0; h <= cfg.j; ++h) {
    const double r = std::pow(2.0, 0.5 * h) * cfg.eps;
    res.density_floor.push_back(density_floor_check(gamma0, chi, t, r, cfg.q, cfg.quad_order));
    if (!res.density_floor.back().pass) throw PreconditionFailed("density floor fails at r = " + std::to_string(r));
  }
  for (int h = 1; h <= cfg.j; ++h) {
    if (!(2.0 * cfg.L * std::pow(2.0, 0.5 * (h - 1)) * cfg.eps < cfg.r0)) {
      throw PreconditionFailed("stage " + std::to_string(h) + ": 2 L 2^((h-1)/2) eps must stay below r0");
    }
  }

  const DiscreteVarifold nucleated = nucleate(gamma0, t, cfg.eps, SquashMap{cfg.delta});
  res.nucleation = verify_nucleation(gamma0, nucleated, t, cfg.eps, env, cfg.q, cfg.quad_order);
  res.mass_initial = gamma0.mass();
  res.mass_nucleated = nucleated.mass();

  DiscreteVarifold final_v = nucleated;
  if (cfg.j > 0) {
    FlowOptions fo;
    fo.dt_factor = cfg.dt_factor;
    fo.c_stab = std::max(fo.c_stab, cfg.dt_factor);
    fo.cadence = cfg.eps * cfg.eps / cfg.snapshots_per_unit;
    fo.quad_order = cfg.quad_order;
    const double duration = std::pow(2.0, cfg.j - 1) * cfg.eps * cfg.eps;
    res.trajectory = evolve(nucleated, duration, fo);
    final_v = res.trajectory.snapshots.back().v;
    res.E0 = gaussian_density_sup(res.trajectory, std::max(cfg.R0, cfg.eps), cfg.eps, cfg.quad_order);

    const long double log_r1 = compute_log_r1(n, cfg.r0, cfg.alpha);
    const double lb = cfg.base == LogBase::natural ? 1.0 : std::log(2.0);
    double sum_mu = 0.0, max_m = 0.0;
    for (int h = 1; h <= cfg.j; ++h) {
      const double lambda = std::pow(2.0, 0.5 * (h - 1)) * cfg.eps;
      const FlowTrajectory w = rescale_trajectory(res.trajectory, lambda);
      StageRecord st{};
      st.h = h;
      st.scale = lambda;
      for (int sign : {1, -1}) {
        const BarrierSetup b = sphere_barrier_from_scale(1.0, n, t, sign);
        std::optional<double> hit;
        try {
          hit = barrier_monitor(w, b.barrier);
        } catch (const InvalidArgument&) {
          hit = w.t_begin();
        }
        if (hit && (!st.barrier_contact || *hit < *st.barrier_contact)) st.barrier_contact = hit;
      }
      st.empty_spot = true;
      const auto rule = simplex_rule(n, cfg.quad_order);
      for (const auto& s : w.snapshots) {
        if (s.t > 4.0) break;
        auto bad = [&](const Vec& x) {
          const double z = t.project_perp(x).norm();
          return t.project(x).norm() < std::numbers::sqrt2 && z >= std::numbers::sqrt2 && z <= 2.0;
        };
        for (std::size_t f = 0; f < s.v.num_faces() && st.empty_spot; ++f) {
          for (const auto& q : rule) {
            if (bad(s.v.face_point(f, q.bary))) st.empty_spot = false;
          }
        }
      }
      const ExpandingHolesConfig eh(t, h == 1 ? 0.0 : 0.5, 1.0, 1.0, std::numbers::sqrt2, std::numbers::sqrt2, 2.0, chi,
                                    cfg.quad_order);
      const ExcessReport rep = expanding_holes_run(w, eh);
      st.mu_sq_measured = rep.mu_bar_sq;
      st.ratio_before = rep.mass_ratio_start;
      st.ratio_after = rep.mass_ratio_end;
      st.M_empirical = rep.empirical_M;
      st.dissipation_pass = rep.dissipation_pass;
      const double arg = std::pow(2.0, 0.5 * (h + 1)) * cfg.eps * cfg.L;
      const double lg_inv = -std::log(arg) / lb;
      const double lfac = std::pow(cfg.L, n + 2) * res.E0;
      st.mu_sq_bound = lg_inv > 0 ? lfac * (std::pow(lg_inv, -2.0 * cfg.alpha) +
                                            std::exp(-(cfg.L - 1) * (cfg.L - 1) / 8.0))
                                  : std::numeric_limits<double>::infinity();
      st.c_min = st.mu_sq_bound > 0 ? st.mu_sq_measured / st.mu_sq_bound : 0.0;
      st.as_r1 = std::log(static_cast<long double>(lambda)) < log_r1;
      st.fits_r0 = 2.0 * cfg.L * lambda < cfg.r0;
      sum_mu += st.mu_sq_measured;
      max_m = std::max(max_m, st.M_empirical);
      res.stages.push_back(st);
    }
    res.chained_rhs = omega + max_m * sum_mu;
  }

  res.mass_final = final_v.mass();
  res.mass_drop = res.mass_initial - res.mass_final;
  res.drop_threshold = 0.5 * (cfg.q - 1) * omega * std::pow(cfg.eps, n);
  res.mass_drop_pass = res.mass_drop >= res.drop_threshold;
  const double r = std::pow(2.0, 0.5 * cfg.j) * cfg.eps;
  auto weighted = [&](const DiscreteVarifold& v) {
    return integrate(v, cfg.quad_order, [&](const Vec& x, std::size_t, const auto&) {
      if (!(t.project_perp(x).norm() < std::numbers::sqrt2 * r)) return 0.0;
      const double c = cylindrical_cutoff(chi, t, r, x);
      return c * c;
    });
  };
  res.lef2_lhs = weighted(final_v);
  res.lef2_rhs = weighted(gamma0);
  res.lef2_pass = res.lef2_lhs < res.lef2_rhs;
  return res;
}

void write_experiment_csv(std::ostream& os, const ExperimentResult& r) {
  const auto old = os.precision(17);
  os << "h,scale,mu_h_sq_measured,mu_h_sq_bound,ratio_before,ratio_after,M_empirical\n";
  for (const auto& s : r.stages) {
    os << s.h << ',' << s.scale << ',' << s.mu_sq_measured << ',' << s.mu_sq_bound << ',' << s.ratio_before << ','
       << s.ratio_after << ',' << s.M_empirical << '\n';
  }
  os.precision(old);
}

}  // namespace varflow
