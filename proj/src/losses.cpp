#include "alsq/losses.hpp"

#include <cmath>

namespace alsq {

LossDescriptor lp_loss(double p) {
  require(p > 0, "lp: p must be > 0");
  LossDescriptor m;
  m.name = "lp(" + std::to_string(p) + ")";
  m.eval = [p](double x) { return std::pow(x, p); };
  m.deriv = [p](double x) { return p * std::pow(x, p - 1.0); };
  m.deriv2 = [p](double x) { return p * (p - 1.0) * std::pow(x, p - 2.0); };
  m.p_M = p;
  m.c_U = 1.0;
  m.q_M = p;
  m.c_L = 1.0;
  m.root_subadditive = true;  // M^{1/p}(x) = x
  m.scale_invariant = true;
  m.convex = p >= 1.0;
  return m;
}

LossDescriptor huber_loss(double tau) {
  require(tau > 0, "huber: tau must be > 0");
  LossDescriptor m;
  m.name = "huber(" + std::to_string(tau) + ")";
  m.eval = [tau](double x) { return x <= tau ? x * x / (2.0 * tau) : x - tau / 2.0; };
  m.deriv = [tau](double x) { return x <= tau ? x / tau : 1.0; };
  m.deriv2 = [tau](double x) { return x <= tau ? 1.0 / tau : 0.0; };
  m.p_M = 2.0;
  m.c_U = 1.0;
  m.q_M = 1.0;
  m.c_L = 1.0;
  m.root_subadditive = true;
  m.convex = true;
  return m;
}

LossDescriptor tukey_lp_loss(double tau, double p) {
  require(tau > 0, "tukey_lp: tau must be > 0");
  require(p > 0, "tukey_lp: p must be > 0");
  LossDescriptor m;
  m.name = "tukey_lp(" + std::to_string(tau) + "," + std::to_string(p) + ")";
  double cap = std::pow(tau, p);
  m.eval = [tau, p, cap](double x) { return x <= tau ? std::pow(x, p) : cap; };
  m.deriv = [tau, p](double x) { return x <= tau ? p * std::pow(x, p - 1.0) : 0.0; };
  m.deriv2 = [tau, p](double x) {
    return x <= tau ? p * (p - 1.0) * std::pow(x, p - 2.0) : 0.0;
  };
  m.p_M = p;
  m.c_U = 1.0;
  m.q_M = std::nullopt;  // flat tail has no polynomial lower bound
  m.root_subadditive = true;  // M^{1/p}(x) = min(x, tau)
  m.convex = false;
  return m;
}

LossDescriptor tukey_smooth_loss(double tau) {
  require(tau > 0, "tukey_smooth: tau must be > 0");
  LossDescriptor m;
  m.name = "tukey_smooth(" + std::to_string(tau) + ")";
  double t2 = tau * tau;
  m.eval = [tau, t2](double x) {
    if (x >= tau) return t2 / 6.0;
    double u = 1.0 - x * x / t2;
    return t2 / 6.0 * (1.0 - u * u * u);
  };
  m.deriv = [tau, t2](double x) {
    if (x >= tau) return 0.0;
    double u = 1.0 - x * x / t2;
    return x * u * u;
  };
  m.deriv2 = [tau, t2](double x) {
    if (x >= tau) return 0.0;
    double u = x * x / t2;
    return (1.0 - u) * (1.0 - 5.0 * u);
  };
  m.p_M = 2.0;
  m.c_U = 3.0;  // x^2/6 <= T(x) <= x^2/2 on [0, tau]
  m.q_M = std::nullopt;
  m.root_subadditive = true;
  m.convex = false;
  return m;
}

LossDescriptor l2lq_loss(double q) {
  require(q > 0 && q < 2, "l2lq: q must be in (0,2)");
  LossDescriptor m;
  m.name = "l2lq(" + std::to_string(q) + ")";
  m.eval = [q](double x) { return x <= 1.0 ? x * x : std::pow(x, q); };
  m.deriv = [q](double x) { return x <= 1.0 ? 2.0 * x : q * std::pow(x, q - 1.0); };
  m.deriv2 = [q](double x) {
    return x <= 1.0 ? 2.0 : q * (q - 1.0) * std::pow(x, q - 2.0);
  };
  m.p_M = 2.0;
  m.c_U = 1.0;
  m.q_M = q;
  m.c_L = 1.0;
  m.root_subadditive = true;  // x for x<=1, x^{q/2} beyond: f(x)/x nonincreasing
  m.convex = false;           // slope drops from 2 to q at the knee
  return m;
}

LossDescriptor gamma_p_loss(double t, double p) {
  require(t >= 1, "gamma_p: t must be >= 1");
  require(p >= 1 && p <= 2, "gamma_p: p must be in [1,2]");
  LossDescriptor m;
  m.name = "gamma_p(" + std::to_string(t) + "," + std::to_string(p) + ")";
  double a = p / 2.0 * std::pow(t, p - 2.0);
  double c = (p / 2.0 - 1.0) * std::pow(t, p);
  m.eval = [t, p, a, c](double x) { return x <= t ? a * x * x : std::pow(x, p) + c; };
  m.deriv = [t, p, a](double x) { return x <= t ? 2.0 * a * x : p * std::pow(x, p - 1.0); };
  m.deriv2 = [t, p, a](double x) {
    return x <= t ? 2.0 * a : p * (p - 1.0) * std::pow(x, p - 2.0);
  };
  m.p_M = 2.0;
  m.c_U = 2.0 / p;
  m.q_M = p;
  m.c_L = 1.0;
  m.root_subadditive = true;
  m.convex = true;
  return m;
}

LossDescriptor compose_sum(const LossDescriptor& m1, const LossDescriptor& m2) {
  LossDescriptor m;
  m.name = "sum(" + m1.name + "," + m2.name + ")";
  auto e1 = m1.eval, e2 = m2.eval;
  m.eval = [e1, e2](double x) { return e1(x) + e2(x); };
  auto d1 = m1.deriv, d2 = m2.deriv;
  m.deriv = [d1, d2](double x) { return d1(x) + d2(x); };
  if (m1.deriv2 && m2.deriv2) {
    auto dd1 = m1.deriv2, dd2 = m2.deriv2;
    m.deriv2 = [dd1, dd2](double x) { return dd1(x) + dd2(x); };
  }
  m.p_M = std::max(m1.p_M, m2.p_M);
  m.c_U = m1.c_U + m2.c_U;
  if (m1.q_M && m2.q_M) {
    m.q_M = std::min(*m1.q_M, *m2.q_M);
    m.c_L = std::min(m1.c_L, m2.c_L) / 2.0;
  }
  m.root_subadditive = false;
  m.scale_invariant = false;
  m.monotone = m1.monotone && m2.monotone;
  m.convex = m1.convex && m2.convex;
  m.components = {m1, m2};
  return m;
}

LossDescriptor loss_catalog(const std::string& name, const std::vector<double>& params) {
  auto arity = [&](size_t k) {
    if (params.size() != k)
      throw std::invalid_argument("loss_catalog: '" + name + "' takes " + std::to_string(k) +
                                  " parameter(s), got " + std::to_string(params.size()));
  };
  if (name == "lp") {
    arity(1);
    return lp_loss(params[0]);
  }
  if (name == "huber") {
    arity(1);
    return huber_loss(params[0]);
  }
  if (name == "tukey_lp") {
    arity(2);
    return tukey_lp_loss(params[0], params[1]);
  }
  if (name == "tukey_smooth") {
    arity(1);
    return tukey_smooth_loss(params[0]);
  }
  if (name == "l2lq") {
    arity(1);
    return l2lq_loss(params[0]);
  }
  if (name == "gamma_p") {
    arity(2);
    return gamma_p_loss(params[0], params[1]);
  }
  throw std::invalid_argument("loss_catalog: unknown loss '" + name + "'");
}

double msum(const Vector& y, const LossDescriptor& M, const WeightVector& w) {
  require(y.size() == w.n(), "msum: length mismatch");
  check_finite(y, "msum");
  double s = 0.0;
  for (const auto& [i, wi] : w.entries()) s += wi * M.eval(std::abs(y[i]));
  return s;
}

double msum(const Vector& y, const LossDescriptor& M) {
  check_finite(y, "msum");
  double s = 0.0;
  for (Index i = 0; i < y.size(); ++i) s += M.eval(std::abs(y[i]));
  return s;
}

double mnorm(const Vector& y, const LossDescriptor& M, const WeightVector& w) {
  return std::pow(msum(y, M, w), 1.0 / M.p_M);
}

double mnorm(const Vector& y, const LossDescriptor& M) {
  return std::pow(msum(y, M), 1.0 / M.p_M);
}

double lp_norm(const Vector& y, double p) {
  double s = 0.0;
  for (Index i = 0; i < y.size(); ++i) s += std::pow(std::abs(y[i]), p);
  return std::pow(s, 1.0 / p);
}

}  // namespace alsq
