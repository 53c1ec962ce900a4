#pragma once

#include "varflow/estimates.hpp"
#include "varflow/nucleation.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace varflow {

enum class LogBase { natural, two };

LogBase parse_log_base(const std::string& s);
std::string to_string(LogBase b);

/// lg^{n+2}(q) / lg^{2 alpha}(2^{(q-1)/2} / lg q) + lg^{n+2}(q) exp(-(lg q - 1)^2 / 8).
/// Throws InvalidArgument("formula domain") for q < 3.
long double a_q_squared(long q, double alpha, int n, LogBase base = LogBase::natural);

/// Same formula for real q >= 3, evaluated through logarithms.
long double a_q_squared_real(long double q, double alpha, int n, LogBase base = LogBase::natural);

/// sum_{q=k}^{last} a_q^2.
long double partial_sum(long k, long last, double alpha, int n, LogBase base = LogBase::natural);

struct TailSum {
  long double value;
  long double direct;     // sum_{q=K}^{Q} a_q^2
  long double remainder;  // integral tail from Q + 1/2
  long last_direct;       // Q
};

/// sum_{q>=K} a_q^2. Throws InvalidArgument("series may diverge") for alpha <= 1/2.
TailSum tail_sum_detail(long k, double alpha, int n, double rel_tol = 1e-8, LogBase base = LogBase::natural);
long double tail_sum(long k, double alpha, int n, double rel_tol = 1e-8, LogBase base = LogBase::natural);

/// ln r1 for the largest r1 with delta1 / ln^alpha(1/(r1 delta1)) < 1 and
/// (sqrt2 + 2 delta1) r1 < r0. r1 itself underflows double for alpha near 1/2.
long double compute_log_r1(int n, double r0, double alpha);

bool condition_r0(long q, double r0, LogBase base = LogBase::natural);
bool condition_r1(long q, long double log_r1);

struct KChoice {
  bool feasible;
  long k;
  long k_r0;
  long k_r1;
  long k_tail;
};

/// Smallest K with tail_sum(K) <= budget / constant that also passes
/// the r0 and r1 conditions. Infeasible beyond 1e9.
KChoice choose_K(double alpha, int n, double budget, double constant, double r0, long double log_r1,
                 LogBase base = LogBase::natural);

struct IterationSchedule {
  long J;
  long K;
  double alpha;
  int n;
  double r0;
  long double log_r1;
  double eps_J;
  std::vector<double> L;                 // L_h for h = 1..J-K
  std::vector<long double> a_sq;         // a_q^2 for q = K..J-1
  long double tail_sum;
  bool conditions_ok;
  LogBase base;
};

IterationSchedule make_schedule(long J, long K, double alpha, int n, double r0, LogBase base = LogBase::natural);
void write_schedule_json(std::ostream& os, const IterationSchedule& s);

struct DensityFloor {
  double ratio;
  double threshold;
  bool pass;
};

/// (omega_n r^n)^{-1} int chi_r^2 restricted to |T^perp x| < sqrt2 r, against 1 + (Q-1)/2.
DensityFloor density_floor_check(const DiscreteVarifold& gamma0, const CutoffProfile& chi, const Plane& t, double r,
                                 int q, int quad_order = 3);

struct ExperimentConfig {
  FixtureKind kind = FixtureKind::branched_disk;
  FixtureParams fixture;
  int q = 2;
  int level = 5;
  double eps = 0.05;
  int j = 2;
  double alpha = 0.51;
  double r0 = 0.3;
  double zeta = 0.1;
  double delta = 0.2;
  double dt_factor = 0.1;
  int quad_order = 3;
  double L = 2.0;
  double R0 = 0.1;  // scale for the density supremum
  int snapshots_per_unit = 20;
  LogBase base = LogBase::natural;
  bool allow_critical = false;
};

struct StageRecord {
  int h;
  double scale;
  double mu_sq_measured;
  double mu_sq_bound;  // with c(n) = 1
  double c_min;
  double ratio_before;
  double ratio_after;
  double M_empirical;
  bool dissipation_pass;
  bool empty_spot;
  std::optional<double> barrier_contact;
  bool as_r1;
  bool fits_r0;
};

struct ExperimentResult {
  EnvelopeCheck envelope;
  std::vector<DensityFloor> density_floor;
  NucleationReport nucleation;
  FlowTrajectory trajectory;
  std::vector<StageRecord> stages;
  double E0 = 0.0;
  double mass_initial = 0.0;
  double mass_nucleated = 0.0;
  double mass_final = 0.0;
  double mass_drop = 0.0;
  double drop_threshold = 0.0;
  bool mass_drop_pass = false;
  double lef2_lhs = 0.0;
  double lef2_rhs = 0.0;
  bool lef2_pass = false;
  double chained_rhs = 0.0;  // omega_n + max(M, 0) sum mu_h^2 with the largest stage M

  bool pass() const { return mass_drop_pass && lef2_pass; }
};

/// Nucleation, flow and the per-stage expanding-holes estimates.
/// Throws PreconditionFailed when the fixture or parameters are refused.
ExperimentResult orchestrate(const ExperimentConfig& cfg);
ExperimentResult orchestrate(const DiscreteVarifold& gamma0, const ExperimentConfig& cfg);

void write_experiment_csv(std::ostream& os, const ExperimentResult& r);

}  // namespace varflow
