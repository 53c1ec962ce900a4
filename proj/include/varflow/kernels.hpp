#pragma once

#include "varflow/geom.hpp"
#include "varflow/varifold.hpp"

#include <functional>

namespace varflow {

/// Radial cutoff chi on R^k: 1 on [0, 1-zeta], 0 on [1, inf), and a C^inf
/// monotone transition between built from psi(s) = exp(-1/s).
class CutoffProfile {
 public:
  CutoffProfile(double zeta, int k);

  double zeta() const noexcept { return zeta_; }
  int k() const noexcept { return k_; }
  /// sup(|grad chi| + 2 ||D^2 chi||) over 1e5 samples, times 1.01.
  double rho() const noexcept { return rho_; }

  double value(double r) const;
  double d1(double r) const;
  double d2(double r) const;
  /// Operator norm of the Hessian of x -> chi(|x|) at radius r.
  double hessian_norm(double r) const;

 private:
  double zeta_;
  int k_;
  double rho_ = 0.0;
};

/// zeta in (0, 1/2); k is the dimension of the plane carrying the profile.
CutoffProfile make_profile(double zeta, int k = 2);

/// chi(|T x| / R).
double cylindrical_cutoff(const CutoffProfile& chi, const Plane& t, double radius, const Vec& x);
/// R^{-1} chi'(|Tx|/R) Tx/|Tx|; lies in T.
Vec cylindrical_cutoff_gradient(const CutoffProfile& chi, const Plane& t, double radius, const Vec& x);

/// phi_t(x) = chi(|Tx| / R(t)) with R(t)^2 = r1_sq + sigma (t - t1).
ScalarTest expanding_cylinder_test(const CutoffProfile& chi, const Plane& t, double r1_sq, double sigma,
                                   double t1);

/// Backward heat kernel (4 pi (s-t))^{-k/2} exp(-|x-y|^2 / (4(s-t))).
struct HeatKernel {
  int k;
  Vec y;
  double s;
};

struct HeatKernelJet {
  double value;
  Vec grad;
  Mat hessian;
  double dt;
};

/// Throws InvalidArgument when t >= s.
HeatKernelJet heat_kernel_eval(const HeatKernel& kernel, const Vec& x, double t);

struct HeatResidual {
  double residual;
  bool skipped;  // kernel underflowed
};

/// D^2 rho . S + |S^perp grad rho|^2 / rho + d_t rho.
HeatResidual heat_identity_residual(const HeatKernel& kernel, const Vec& x, double t, const Plane& s);

}  // namespace varflow
