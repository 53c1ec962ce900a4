#include "varflow/suites.hpp"

#include "varflow/estimates.hpp"
#include "varflow/iteration.hpp"
#include "varflow/mesh_gen.hpp"
#include "varflow/nucleation.hpp"

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>

namespace varflow {
namespace {

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

class Timed {
 public:
  explicit Timed(SuiteResult& r) : r_(r), start_(std::chrono::steady_clock::now()) {}
  ~Timed() { r_.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

 private:
  SuiteResult& r_;
  std::chrono::steady_clock::time_point start_;
};

void check(SuiteResult& r, bool ok, const std::string& line) {
  r.pass = r.pass && ok;
  r.lines.push_back((ok ? "ok   " : "FAIL ") + line);
}

Vec random_vec(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = g(rng);
  return v;
}

double mean_radius(const DiscreteVarifold& v) {
  const MeanCurvature hf = mean_curvature(v);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < v.num_vertices(); ++i) {
    num += hf.mass[i] * v.vertex(i).norm();
    den += hf.mass[i];
  }
  return num / den;
}

ScalarTest constant_scalar(double c) {
  ScalarTest phi;
  phi.value = [c](const Vec&, double) { return c; };
  phi.gradient = [](const Vec& x, double) -> Vec { return Vec::Zero(x.size()); };
  phi.time_derivative = [](const Vec&, double) { return 0.0; };
  return phi;
}

// bump(x) (1 + b t): affine in time.
ScalarTest affine_bump(const Vec& c, double radius, double height, double b) {
  const ScalarTest base = bump_scalar(c, radius, height);
  ScalarTest phi;
  phi.value = [=](const Vec& x, double t) { return base.value(x, t) * (1.0 + b * t); };
  phi.gradient = [=](const Vec& x, double t) -> Vec { return base.gradient(x, t) * (1.0 + b * t); };
  phi.time_derivative = [=](const Vec& x, double t) { return base.value(x, t) * b; };
  return phi;
}

FlowTrajectory constant_trajectory(const DiscreteVarifold& v, double duration, int steps) {
  FlowTrajectory traj;
  for (int i = 0; i <= steps; ++i) traj.snapshots.push_back({duration * i / steps, v});
  traj.ledger.push_back({0.0, v.mass(), 0.0, min_edge_length(v), 0.0});
  return traj;
}

struct HolesRun {
  double M;
  bool dissipation;
  double mu_bar_sq;
  double gain;
};

HolesRun holes_at_level(int level, double eps) {
  const Plane t = Plane::coordinate(3, 2);
  const DiscreteVarifold g0 = make_fixture(FixtureKind::flat_stack, 2, level);
  const DiscreteVarifold nuc = nucleate(g0, t, eps, SquashMap{});
  FlowOptions fo;
  fo.cadence = eps * eps / 20.0;
  const FlowTrajectory traj = evolve(nuc, eps * eps, fo);
  const FlowTrajectory w = rescale_trajectory(traj, eps);
  const ExpandingHolesConfig cfg(t, 0.0, 1.0, 1.0, std::numbers::sqrt2, std::numbers::sqrt2, 2.0, make_profile(0.1, 2));
  const ExcessReport rep = expanding_holes_run(w, cfg);
  return {rep.empirical_M, rep.dissipation_pass, rep.mu_bar_sq, rep.gain};
}

}  // namespace

SuiteResult suite_grassmann(int pairs, std::uint64_t seed) {
  SuiteResult r{"grassmann", true, {}, 0.0};
  Timed timer(r);
  std::mt19937_64 rng(seed);
  constexpr double tol = 1e-10;
  double worst[5] = {0, 0, 0, 0, 0};
  for (int i = 0; i < pairs; ++i) {
    const int ambient = 2 + i % 3;
    const int k = 1 + (i / 3) % (ambient - 1);
    const Plane s = random_plane(ambient, k, rng);
    const Plane tp = random_plane(ambient, k, rng);
    const Vec v = random_vec(ambient, rng);
    const Mat& T = tp.proj();
    const Mat& S = s.proj();
    const Mat id = Mat::Identity(ambient, ambient);
    const double e1 = std::max({std::abs(hs_dot(id, T) - k), (T - T.transpose()).cwiseAbs().maxCoeff(),
                                (T * T - T).cwiseAbs().maxCoeff(), (T * tp.perp()).cwiseAbs().maxCoeff()});
    worst[0] = std::max(worst[0], e1);
    const GrassmannGap gap = grassmann_gap(s, tp);
    const double op2 = gap.op_norm * gap.op_norm;
    const double st = hs_dot(S, T);
    const double sperp_t = hs_dot(s.perp(), T);
    worst[1] = std::max({worst[1], -(k - st), std::abs((k - st) - sperp_t), sperp_t - k * op2});
    const double tperp_s = hs_dot(tp.perp(), S);
    worst[2] = std::max({worst[2], -op2, op2 - gap.hs_norm_sq, std::abs(gap.hs_norm_sq - 2.0 * tperp_s)});
    worst[3] = std::max(worst[3], (T * s.project_perp(v)).norm() - gap.op_norm * v.norm());
    worst[4] = std::max(worst[4], (T * s.project_perp(T * v)).norm() - op2 * v.norm());
  }
  const char* names[5] = {"trace/symmetry/idempotence", "k - S.T = Sperp.T in [0, k|S-T|^2]",
                          "|S-T|^2 <= (S-T).(S-T) = 2 Tperp.S", "|T Sperp v| <= |T-S||v|",
                          "|T Sperp T v| <= |T-S|^2 |v|"};
  for (int i = 0; i < 5; ++i) check(r, worst[i] <= tol, fmt("%s: worst violation %.3e over %d pairs", names[i], worst[i], pairs));
  return r;
}

SuiteResult suite_profile() {
  SuiteResult r{"profile", true, {}, 0.0};
  Timed timer(r);
  for (int k : {1, 2, 3}) {
    const CutoffProfile chi(0.1, k);
    bool mono = true, inner = true, outer = true, fact = true;
    double prev = 1.0, sup = 0.0;
    for (int i = 0; i <= 20000; ++i) {
      const double x = 1.2 * i / 20000.0;
      const double c = chi.value(x);
      mono = mono && c <= prev + 1e-15 && c >= 0.0 && c <= 1.0;
      prev = c;
      if (x < 0.9) inner = inner && c == 1.0;
      if (x >= 1.0) outer = outer && c == 0.0;
      sup = std::max(sup, std::abs(chi.d1(x)) + 2.0 * chi.hessian_norm(x));
      if (c > 1e-12) fact = fact && chi.d1(x) * chi.d1(x) / c <= chi.rho();
    }
    check(r, mono, fmt("k=%d: chi radially nonincreasing in [0,1]", k));
    check(r, inner, fmt("k=%d: chi = 1 below 1 - zeta", k));
    check(r, outer, fmt("k=%d: chi = 0 beyond 1", k));
    check(r, sup <= chi.rho(), fmt("k=%d: rho %.6g bounds sampled |chi'| + 2|D^2 chi| = %.6g", k, chi.rho(), sup));
    check(r, fact, fmt("k=%d: |grad chi|^2 / chi <= rho", k));
  }
  return r;
}

SuiteResult suite_heat(int samples, std::uint64_t seed) {
  SuiteResult r{"heat", true, {}, 0.0};
  Timed timer(r);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k : {1, 2}) {
    double worst = 0.0;
    int skipped = 0;
    for (int i = 0; i < samples; ++i) {
      const Plane s = random_plane(3, k, rng);
      const HeatKernel ker{k, random_vec(3, rng) * 0.5, 1.0 + u(rng)};
      const double t = u(rng) * ker.s * 0.99;
      const Vec x = ker.y + random_vec(3, rng) * std::sqrt(ker.s - t) * (0.5 + 2.0 * u(rng));
      const HeatResidual res = heat_identity_residual(ker, x, t, s);
      if (res.skipped) {
        ++skipped;
        continue;
      }
      const HeatKernelJet jet = heat_kernel_eval(ker, x, t);
      const double scale = std::abs(hs_dot(jet.hessian, s.proj())) +
                           s.project_perp(jet.grad).squaredNorm() / jet.value + std::abs(jet.dt);
      worst = std::max(worst, std::abs(res.residual) / scale);
    }
    check(r, worst <= 1e-8, fmt("k=%d: worst relative residual %.3e over %d samples (%d underflowed)", k, worst, samples, skipped));
  }
  return r;
}

SuiteResult suite_squash(int pairs, std::uint64_t seed) {
  SuiteResult r{"squash", true, {}, 0.0};
  Timed timer(r);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const SquashMap m{};
  const Plane t = Plane::coordinate(3, 2);
  auto sample = [&] {
    Vec x(3);
    do {
      x << 2.0 * u(rng), 2.0 * u(rng), 0.3 * u(rng);
    } while (std::hypot(x[0], x[1]) >= 2.0);
    return x;
  };
  double lip = 0.0;
  long not_idem = 0, grew = 0;
  Vec first_bad;
  for (int i = 0; i < pairs; ++i) {
    const Vec x = sample();
    Vec y = i % 2 == 0 ? sample() : Vec(x + 1e-3 * random_vec(3, rng));
    const Vec gx = squash_point(m, t, x), gy = squash_point(m, t, y);
    const double d = (x - y).norm();
    if (d > 0) lip = std::max(lip, (gx - gy).norm() / d);
    const Vec ggx = squash_point(m, t, gx);
    if (ggx != gx) {
      if (not_idem == 0) first_bad = x;
      ++not_idem;
    }
    if (std::abs(gx[2]) > std::abs(x[2])) ++grew;
  }
  check(r, lip <= 2.0 + 1e-9, fmt("sampled Lipschitz constant %.12f over %d pairs", lip, pairs));
  std::string idem = fmt("g(g(x)) == g(x) bitwise: %ld of %d samples differ", not_idem, pairs);
  if (not_idem > 0) {
    const Vec g1 = squash_point(m, t, first_bad);
    idem += fmt(" (e.g. x3 %.6g -> %.6g -> %.6g)", first_bad[2], g1[2], squash_point(m, t, g1)[2]);
  }
  check(r, not_idem == 0, idem);
  check(r, grew == 0, fmt("|g(x)_3| <= |x_3|: %ld violations", grew));
  return r;
}

SuiteResult suite_nucleation(int level, double eps) {
  SuiteResult r{"nucleation", true, {}, 0.0};
  Timed timer(r);
  const Plane t = Plane::coordinate(3, 2);
  const DiscreteVarifold before = make_fixture(FixtureKind::flat_stack, 2, level);
  const DiscreteVarifold after = nucleate(before, t, eps, SquashMap{});
  const NucleationReport rep = verify_nucleation(before, after, t, eps, GrowthEnvelope{}, 2);
  check(r, rep.locality, "outside U_2eps: faces bitwise unchanged");
  check(r, rep.height, fmt("inside U_2eps: heights under the envelope (worst excess %.3e)", rep.worst_height_excess));
  check(r, rep.mass_ball_after <= 0.7 * rep.mass_bound_rhs,
        fmt("mass in U_2eps %.6g <= 0.7 * %.6g", rep.mass_ball_after, rep.mass_bound_rhs));
  check(r, rep.mass_hole_after <= 1.02 * rep.mass_hole_rhs,
        fmt("mass in C(eps) cap U_2eps %.6g <= 1.02 * %.6g (before %.6g)", rep.mass_hole_after, rep.mass_hole_rhs,
            rep.mass_hole_before));
  r.lines.push_back("info partition: " + rep.partition + "; " + rep.containment);
  return r;
}

SuiteResult suite_sphere(int level) {
  SuiteResult r{"sphere", true, {}, 0.0};
  Timed timer(r);
  const DiscreteVarifold s0 = icosphere(level, 1.0);
  FlowOptions fo;
  fo.cadence = 0.0125;
  const double t_end = 0.1875;  // r = 1/2
  const FlowTrajectory traj = evolve(s0, t_end, fo);
  double worst = 0.0;
  for (const auto& s : traj.snapshots) {
    const double rr = mean_radius(s.v);
    const double exact = 1.0 - 4.0 * s.t;
    worst = std::max(worst, std::abs(rr * rr - exact) / exact);
  }
  check(r, worst <= 0.02, fmt("r(t)^2 vs 1 - 4t: worst relative error %.4f over %zu snapshots", worst, traj.snapshots.size()));
  check(r, traj.valid, fmt("ledger: max (mass + dissipation) / mass0 - 1 = %.3e <= 0.05", traj.ledger_excess));
  double neg = 0.0;
  for (const auto& row : traj.ledger) neg = std::min(neg, row.dissipation);
  check(r, neg >= 0.0, "dissipation entries nonnegative");
  check(r, traj.mass_increase <= 1e-3, fmt("per-step mass increase %.3e <= 1e-3", traj.mass_increase));
  return r;
}

SuiteResult suite_brakke(int tests, std::uint64_t seed) {
  SuiteResult r{"brakke", true, {}, 0.0};
  Timed timer(r);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const DiscreteVarifold plane = hex_disk(3, 1.0);
  const FlowTrajectory still = constant_trajectory(plane, 1.0, 10);
  double worst = 0.0;
  for (int i = 0; i < tests; ++i) {
    const double ang = 2.0 * std::numbers::pi * u(rng), rad = 0.6 * u(rng);
    const Vec c = make_vec({rad * std::cos(ang), rad * std::sin(ang), 0.2 * (u(rng) - 0.5)});
    const ScalarTest phi = affine_bump(c, 0.2 + 0.6 * u(rng), 0.5 + 1.5 * u(rng), u(rng) - 0.5);
    int a = static_cast<int>(u(rng) * 10), b = static_cast<int>(u(rng) * 10);
    if (a == b) b = a + 1;
    if (a > b) std::swap(a, b);
    const BrakkeResult br = brakke_inequality_test(still, phi, a / 10.0, b / 10.0);
    const double rel = br.slack / (std::abs(br.lhs) + std::abs(br.rhs) + 1e-300);
    worst = std::min(worst, rel);
  }
  check(r, worst >= -1e-12, fmt("stationary plane: min relative slack %.3e over %d tests", worst, tests));

  const DiscreteVarifold s0 = icosphere(4, 1.0);
  FlowOptions fo;
  fo.cadence = 0.0125;
  const FlowTrajectory traj = evolve(s0, 0.1875, fo);
  const ScalarTest one = constant_scalar(1.0);
  const BrakkeResult b1 = brakke_inequality_test(traj, one, 0.0, 0.1875);
  const double m0 = s0.mass();
  check(r, std::abs(b1.slack) <= 0.05 * m0, fmt("sphere, phi = 1: |slack| %.4g <= 0.05 * %.4g", std::abs(b1.slack), m0));
  const ScalarTest bump = bump_scalar(make_vec({0.3, 0.0, 0.0}), 1.5, 1.0);
  const double mb = integrate(s0, 3, [&](const Vec& x, std::size_t, const auto&) { return bump.value(x, 0.0); });
  const BrakkeResult b2 = brakke_inequality_test(traj, bump, 0.0, 0.1875);
  check(r, std::abs(b2.slack) <= 0.05 * mb, fmt("sphere, off-center bump: |slack| %.4g <= 0.05 * %.4g", std::abs(b2.slack), mb));
  return r;
}

SuiteResult suite_expanding_holes(int coarse, int fine, double eps) {
  SuiteResult r{"expanding-holes", true, {}, 0.0};
  Timed timer(r);
  const HolesRun a = holes_at_level(coarse, eps);
  const HolesRun b = holes_at_level(fine, eps);
  check(r, a.dissipation, fmt("level %d: dissipation inequality at all snapshots", coarse));
  check(r, b.dissipation, fmt("level %d: dissipation inequality at all snapshots", fine));
  const double drift = std::abs(a.M - b.M) / std::abs(b.M);
  check(r, drift <= 0.2,
        fmt("empirical M %.6g (level %d) vs %.6g (level %d): relative change %.3f <= 0.2", a.M, coarse, b.M, fine, drift));
  r.lines.push_back(fmt("info mu_bar^2 %.4g / %.4g, gain %.4g / %.4g", a.mu_bar_sq, b.mu_bar_sq, a.gain, b.gain));
  return r;
}

SuiteResult suite_series() {
  SuiteResult r{"series", true, {}, 0.0};
  Timed timer(r);
  const int n = 2;
  for (double alpha : {0.51, 0.6, 0.75, 1.0}) {
    bool ok = true;
    long double prev = std::numeric_limits<long double>::infinity();
    std::string vals;
    for (long k : {3L, 10L, 100L, 1000L, 10000L, 100000L, 1000000L}) {
      const long double s = tail_sum(k, alpha, n);
      ok = ok && std::isfinite(static_cast<double>(s)) && s > 0 && s < prev;
      prev = s;
      vals += fmt(" %.4Lg", s);
    }
    const long double step = tail_sum(1000, alpha, n) - tail_sum(1001, alpha, n);
    ok = ok && step > 0;
    check(r, ok, fmt("alpha=%.2f: tail_sum finite, decreasing in K:%s", alpha, vals.c_str()));
  }
  const double alpha = 0.51;
  const long double q = 1e5L;
  const long double ratio = a_q_squared(100000, alpha, n) * std::pow(q, 2.0L * alpha) / std::pow(std::log(q), n + 2.0L);
  const long double limit = std::pow(2.0L / std::log(2.0L), 2.0L * alpha);
  const double dev = static_cast<double>(std::abs(ratio / limit - 1.0L));
  check(r, dev <= 0.05, fmt("a_q^2 q^{2a} / ln^{n+2} q at q=1e5: %.6Lg vs limit %.6Lg (%.2f%%)", ratio, limit, 100 * dev));
  const long double critical = partial_sum(3, 10000000, 0.5, n);
  const long double total = tail_sum(3, 0.51, n);
  check(r, critical > 10.0L * total,
        fmt("alpha=0.5 partial sum to 1e7 = %.6Lg vs 10 x alpha=0.51 total = %.6Lg", critical, 10.0L * total));
  return r;
}

SuiteResult suite_experiment(int level) {
  SuiteResult r{"experiment", true, {}, 0.0};
  Timed timer(r);
  ExperimentConfig cfg;
  cfg.level = level;
  const ExperimentResult a = orchestrate(cfg);
  check(r, a.mass_drop_pass,
        fmt("mass drop %.6g >= 0.5 (Q-1) pi eps^2 = %.6g (mass %.6g -> %.6g)", a.mass_drop, a.drop_threshold,
            a.mass_initial, a.mass_final));
  check(r, a.lef2_pass, fmt("weighted mass at r^2/2: %.6g < %.6g", a.lef2_lhs, a.lef2_rhs));
  for (const auto& s : a.stages) {
    r.lines.push_back(fmt("info h=%d ratio %.6g -> %.6g, mu^2 %.4g (bound %.4g), M %.4g, dissipation %s, empty spot %s",
                          s.h, s.ratio_before, s.ratio_after, s.mu_sq_measured, s.mu_sq_bound, s.M_empirical,
                          s.dissipation_pass ? "ok" : "fails", s.empty_spot ? "ok" : "fails"));
  }
  const ExperimentResult b = orchestrate(cfg);
  std::ostringstream ca, cb;
  write_experiment_csv(ca, a);
  write_ledger_csv(ca, a.trajectory);
  write_experiment_csv(cb, b);
  write_ledger_csv(cb, b.trajectory);
  check(r, ca.str() == cb.str(), "rerun produces byte-identical experiment and ledger CSV");
  return r;
}

SuiteResult suite_covariance() {
  SuiteResult r{"covariance", true, {}, 0.0};
  Timed timer(r);
  const Plane t = Plane::coordinate(3, 2);
  const std::vector<std::pair<std::string, DiscreteVarifold>> fixtures = {
      {"branched_disk", make_fixture(FixtureKind::branched_disk, 2, 3)},
      {"perturbed_stack", make_fixture(FixtureKind::perturbed_stack, 2, 3)},
      {"sphere", icosphere(2, 0.3, make_vec({0.05, 0.0, 0.1}))}};
  double worst_mu = 0.0, worst_den = 0.0;
  for (const auto& [name, v] : fixtures) {
    for (double lambda : {0.5, 2.0, 3.0, 0.05}) {
      const DiscreteVarifold w = parabolic_rescale(v, lambda);
      for (double rad : {0.1, 0.25, 0.4}) {
        const double a = mu_squared(v, t, rad);
        const double b = mu_squared(w, t, rad / lambda) * std::pow(lambda, 4);
        if (a > 0) worst_mu = std::max(worst_mu, std::abs(a - b) / a);
        const double da = density_ratio(v, Vec::Zero(3), rad);
        const double db = density_ratio(w, Vec::Zero(3), rad / lambda);
        if (da > 0) worst_den = std::max(worst_den, std::abs(da - db) / da);
      }
    }
  }
  check(r, worst_mu <= 1e-10, fmt("mu^2 scales by lambda^-(k+2): worst relative error %.3e", worst_mu));
  check(r, worst_den <= 1e-10, fmt("density ratios invariant: worst relative error %.3e", worst_den));
  return r;
}

std::vector<std::string> suite_names() {
  return {"grassmann", "heat", "squash", "nucleation", "sphere", "brakke",
          "expanding-holes", "series", "experiment", "covariance", "profile"};
}

std::vector<std::string> default_suites() { return {"grassmann", "profile", "heat", "squash", "nucleation", "sphere"}; }

SuiteResult run_suite(const std::string& name, std::uint64_t seed) {
  if (name == "grassmann") return suite_grassmann(10000, 1 + seed);
  if (name == "profile") return suite_profile();
  if (name == "heat") return suite_heat(1000, 2 + seed);
  if (name == "squash") return suite_squash(100000, 3 + seed);
  if (name == "nucleation") return suite_nucleation();
  if (name == "sphere") return suite_sphere();
  if (name == "brakke") return suite_brakke(20, 4 + seed);
  if (name == "expanding-holes") return suite_expanding_holes();
  if (name == "series") return suite_series();
  if (name == "experiment") return suite_experiment();
  if (name == "covariance") return suite_covariance();
  throw InvalidArgument("unknown suite '" + name + "'");
}

}  // namespace varflow
