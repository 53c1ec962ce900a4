#include "varflow/kernels.hpp"

#include <cmath>
#include <numbers>

namespace varflow {
namespace {

// psi(s) = exp(-1/s) and its first two derivatives; flushed to zero where
// exp underflows.
struct Psi {
  double v, d1, d2;
};

Psi psi(double s) {
  if (s <= 1.5e-3) return {0.0, 0.0, 0.0};
  const double v = std::exp(-1.0 / s);
  const double s2 = s * s;
  return {v, v / s2, v * (1.0 - 2.0 * s) / (s2 * s2)};
}

// Smoothstep S(u) = psi(1-u) / (psi(1-u) + psi(u)) on [0,1] with derivatives.
struct Step {
  double v, d1, d2;
};

Step smoothstep(double u) {
  if (u <= 0.0) return {1.0, 0.0, 0.0};
  if (u >= 1.0) return {0.0, 0.0, 0.0};
  const Psi pa = psi(1.0 - u);
  const Psi pb = psi(u);
  const double a = pa.v, da = -pa.d1, dda = pa.d2;
  const double b = pb.v, db = pb.d1, ddb = pb.d2;
  const double sum = a + b;
  const double num = da * b - a * db;
  const double dnum = dda * b - a * ddb;
  return {a / sum, num / (sum * sum), dnum / (sum * sum) - 2.0 * num * (da + db) / (sum * sum * sum)};
}

}  // namespace

CutoffProfile::CutoffProfile(double zeta, int k) : zeta_(zeta), k_(k) {
  if (!(zeta > 0.0 && zeta < 0.5)) throw InvalidArgument("zeta must lie in (0, 1/2)");
  if (k < 1 || k > 3) throw InvalidArgument("profile dimension must be 1, 2 or 3");
  constexpr int kSamples = 100000;
  double sup = 0.0;
  for (int i = 0; i <= kSamples; ++i) {
    const double r = (1.0 - zeta_) + zeta_ * i / kSamples;
    sup = std::max(sup, std::abs(d1(r)) + 2.0 * hessian_norm(r));
  }
  rho_ = 1.01 * sup;
}

double CutoffProfile::value(double r) const { return smoothstep((r - (1.0 - zeta_)) / zeta_).v; }
double CutoffProfile::d1(double r) const { return smoothstep((r - (1.0 - zeta_)) / zeta_).d1 / zeta_; }
double CutoffProfile::d2(double r) const {
  return smoothstep((r - (1.0 - zeta_)) / zeta_).d2 / (zeta_ * zeta_);
}

double CutoffProfile::hessian_norm(double r) const {
  const double radial = std::abs(d2(r));
  if (k_ == 1 || r <= 0.0) return radial;
  return std::max(radial, std::abs(d1(r)) / r);
}

CutoffProfile make_profile(double zeta, int k) { return CutoffProfile(zeta, k); }

double cylindrical_cutoff(const CutoffProfile& chi, const Plane& t, double radius, const Vec& x) {
  if (!(radius > 0)) throw InvalidArgument("cutoff radius must be positive");
  return chi.value(t.project(x).norm() / radius);
}

Vec cylindrical_cutoff_gradient(const CutoffProfile& chi, const Plane& t, double radius, const Vec& x) {
  if (!(radius > 0)) throw InvalidArgument("cutoff radius must be positive");
  const Vec tx = t.project(x);
  const double r = tx.norm();
  const double d = chi.d1(r / radius);
  if (d == 0.0 || r == 0.0) return Vec::Zero(x.size());
  return (d / (radius * r)) * tx;
}

ScalarTest expanding_cylinder_test(const CutoffProfile& chi, const Plane& t, double r1_sq, double sigma,
                                   double t1) {
  auto radius = [=](double time) {
    const double r2 = r1_sq + sigma * (time - t1);
    if (!(r2 > 0)) throw InvalidArgument("expanding cylinder radius became nonpositive");
    return std::sqrt(r2);
  };
  ScalarTest phi;
  phi.value = [=](const Vec& x, double time) { return cylindrical_cutoff(chi, t, radius(time), x); };
  phi.gradient = [=](const Vec& x, double time) {
    return cylindrical_cutoff_gradient(chi, t, radius(time), x);
  };
  phi.time_derivative = [=](const Vec& x, double time) {
    const double big_r = radius(time);
    const double r = t.project(x).norm();
    const double rdot = 0.5 * sigma / big_r;
    return chi.d1(r / big_r) * (-r / (big_r * big_r)) * rdot;
  };
  return phi;
}

HeatKernelJet heat_kernel_eval(const HeatKernel& kernel, const Vec& x, double t) {
  const double tau = kernel.s - t;
  if (!(tau > 0)) throw InvalidArgument("heat kernel evaluated at t >= s");
  const Vec d = x - kernel.y;
  const double d2 = d.squaredNorm();
  const double v = std::pow(4.0 * std::numbers::pi * tau, -0.5 * kernel.k) * std::exp(-d2 / (4.0 * tau));
  const int n = static_cast<int>(x.size());
  HeatKernelJet jet;
  jet.value = v;
  jet.grad = (-v / (2.0 * tau)) * d;
  jet.hessian = v * (d * d.transpose() / (4.0 * tau * tau) - Mat::Identity(n, n) / (2.0 * tau));
  jet.dt = v * (0.5 * kernel.k / tau - d2 / (4.0 * tau * tau));
  return jet;
}

HeatResidual heat_identity_residual(const HeatKernel& kernel, const Vec& x, double t, const Plane& s) {
  const HeatKernelJet jet = heat_kernel_eval(kernel, x, t);
  if (jet.value < 1e-300) return {0.0, true};
  const Vec sp = s.project_perp(jet.grad);
  return {hs_dot(jet.hessian, s.proj()) + sp.squaredNorm() / jet.value + jet.dt, false};
}

}  // namespace varflow
