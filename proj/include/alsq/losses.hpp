#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "alsq/types.hpp"

namespace alsq {

/// An M-estimator loss: pointwise evaluation plus its declared growth
/// envelope. For y > x > 0 the envelope promises
///   M(y)/M(x) <= c_U (y/x)^{p_M}   and, when q_M is set,
///   M(y)/M(x) >= c_L (y/x)^{q_M}.
/// Declared constants are validated empirically by the invariant suite,
/// not trusted.
struct LossDescriptor {
  std::string name;
  std::function<double(double)> eval;    // x >= 0 -> M(x) >= 0
  std::function<double(double)> deriv;   // dM/dx on x > 0, for solvers
  std::function<double(double)> deriv2;  // d2M/dx2 where defined; optional

  double p_M = 2.0;  // upper growth degree
  double c_U = 1.0;
  std::optional<double> q_M;  // lower growth degree, if any
  double c_L = 1.0;

  bool root_subadditive = false;  // M^{1/p_M} subadditive
  bool scale_invariant = false;
  bool monotone = true;
  bool convex = true;  // convex along rays

  // non-empty for sum-composed losses
  std::vector<LossDescriptor> components;

  double operator()(double x) const { return eval(std::abs(x)); }
};

LossDescriptor loss_catalog(const std::string& name, const std::vector<double>& params);

LossDescriptor lp_loss(double p);
LossDescriptor huber_loss(double tau);
LossDescriptor tukey_lp_loss(double tau, double p);
LossDescriptor tukey_smooth_loss(double tau);
LossDescriptor l2lq_loss(double q);
LossDescriptor gamma_p_loss(double t, double p);

/// M = M1 + M2; sensitivities for the sum are controlled per component.
LossDescriptor compose_sum(const LossDescriptor& m1, const LossDescriptor& m2);

/// sum_i w_i M(|y_i|)  (the p_M-th power of the M-norm)
double msum(const Vector& y, const LossDescriptor& M, const WeightVector& w);
double msum(const Vector& y, const LossDescriptor& M);

/// (sum_i w_i M(|y_i|))^{1/p_M}
double mnorm(const Vector& y, const LossDescriptor& M, const WeightVector& w);
double mnorm(const Vector& y, const LossDescriptor& M);

/// plain lp norm (sum |y_i|^p)^{1/p}
double lp_norm(const Vector& y, double p);

}  // namespace alsq
