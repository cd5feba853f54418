#include "alsq/orlicz.hpp"

#include <cmath>

namespace alsq {

namespace {

void check_orlicz_function(const LossDescriptor& G) {
  require(G.convex, "orlicz: G must be convex");
  require(G.eval(0.0) == 0.0, "orlicz: G(0) must be 0");
  // increasing on a probe grid
  double prev = 0.0;
  for (double x = 0.125; x <= 64.0; x *= 2.0) {
    double g = G.eval(x);
    require(std::isfinite(g) && g > prev, "orlicz: G must be strictly increasing");
    prev = g;
  }
}

}  // namespace

double orlicz_norm(const Vector& y, const LossDescriptor& G, const WeightVector& w,
                   double tol) {
  require(y.size() == w.n(), "orlicz_norm: size mismatch");
  check_finite(y, "orlicz_norm");
  check_orlicz_function(G);

  double ymax = 0.0;
  for (const auto& [i, wi] : w.entries()) ymax = std::max(ymax, std::abs(y[i]));
  if (ymax == 0.0) return 0.0;

  auto excess = [&](double t) {
    double s = 0.0;
    for (const auto& [i, wi] : w.entries()) s += wi * G.eval(std::abs(y[i]) / t);
    return s - 1.0;
  };

  // bracket the root: excess is decreasing in t
  double t_hi = ymax;
  while (excess(t_hi) > 0) {
    t_hi *= 2.0;
    if (!std::isfinite(t_hi)) throw Error("orlicz_norm: failed to bracket from above");
  }
  double t_lo = t_hi;
  while (excess(t_lo) <= 0) {
    t_lo *= 0.5;
    if (t_lo < 1e-300) return 0.0;
  }
  // sign check before bisecting
  require(excess(t_lo) > 0 && excess(t_hi) <= 0, "orlicz_norm: invalid bracket");

  while (t_hi - t_lo > tol * t_hi) {
    const double mid = 0.5 * (t_lo + t_hi);
    if (excess(mid) > 0)
      t_lo = mid;
    else
      t_hi = mid;
  }
  return t_hi;
}

double orlicz_norm(const Vector& y, const LossDescriptor& G, double tol) {
  return orlicz_norm(y, G, WeightVector::ones(y.size()), tol);
}

WeightVector orlicz_subspace_embedding(const Matrix& A, const LossDescriptor& G, double eps,
                                       RngStream& rng, const OrliczConfig& cfg) {
  require(eps > 0 && eps < 1, "orlicz_subspace_embedding: eps must be in (0,1)");
  check_orlicz_function(G);
  const Index n = A.rows(), d = A.cols();

  double tau1 = cfg.tau1 > 0 ? cfg.tau1
                             : std::min(std::pow(static_cast<double>(d), 3.0),
                                        static_cast<double>(n) / 2.0);
  tau1 = std::min(std::max(1.0, tau1), static_cast<double>(n));

  // stage 1: hash sensitivities at the unit Orlicz ball; only monotonicity
  // and the p_G growth bound of G enter
  RngStream r1 = rng.substream(1), r2 = rng.substream(2), r3 = rng.substream(3),
            r4 = rng.substream(4);
  SensitivityEstimates s1 = m_sensitivities(A, G, tau1, r1, cfg.sens);
  WeightVector w = sensitivity_sample(WeightVector::ones(n), s1, cfg.m_stage1, r2);
  if (w.nnz() == 0) return w;

  // stage 2: weighted sensitivities over dyadic level sets (losses 2^{j-1} G
  // per set; the scale cancels inside the hash algorithm)
  auto lg = [](double x) { return std::max(1.0, std::log2(std::max(2.0, x))); };
  const double m2 =
      cfg.m_stage2 * static_cast<double>(d) / (eps * eps) * lg(1.0 / eps);
  const double tau2 = std::min(static_cast<double>(w.nnz()), static_cast<double>(d));
  SensitivityEstimates s2 =
      weighted_m_sensitivities(A, G, w, std::max(1.0, tau2), r3, cfg.sens);
  return sensitivity_sample(w, s2, m2, r4);
}

}  // namespace alsq
