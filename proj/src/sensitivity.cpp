#include "alsq/sensitivity.hpp"

#include <cmath>
#include <map>

#include "alsq/lewis.hpp"

namespace alsq {

namespace {

constexpr std::uint64_t kHashPrime = (1ull << 61) - 1;  // Mersenne prime

struct UniversalHash {
  std::uint64_t a, b;
  Index buckets;
  Index operator()(Index i) const {
    __uint128_t v = static_cast<__uint128_t>(a) * static_cast<std::uint64_t>(i + 1) + b;
    std::uint64_t r = static_cast<std::uint64_t>(v % kHashPrime);
    return static_cast<Index>(r % static_cast<std::uint64_t>(buckets));
  }
};

UniversalHash draw_hash(RngStream& rng, Index buckets) {
  UniversalHash h;
  h.a = 1 + rng.next_u64() % (kHashPrime - 1);
  h.b = rng.next_u64() % kHashPrime;
  h.buckets = buckets;
  return h;
}

// In-bucket Lewis weights at exponent p; leverage scores when p == 2, and the
// leverage fallback keeps estimates on the conservative side when the
// fixed-point iteration does not converge.
Vector bucket_lewis(const Matrix& sub, double p, const SensitivityConfig& cfg) {
  if (p == 2.0) return leverage_scores(sub);
  LewisWeights lw = lewis_weights(sub, p, cfg.lewis_tol, cfg.lewis_max_iter);
  if (!lw.converged) return leverage_scores(sub);
  return lw.w;
}

// Core pass for an atomic (non-composed) loss over the rows listed in `rows`.
void hash_and_raise(const Matrix& A, const std::vector<Index>& rows, double p_M, double tau,
                    RngStream& rng, const SensitivityConfig& cfg, Vector& s,
                    std::vector<std::pair<int, int>>& level) {
  const Index n = static_cast<Index>(rows.size());
  if (n <= 1) return;
  const int max_r = static_cast<int>(std::ceil(std::log2(static_cast<double>(n) / tau)));
  if (max_r < 1) return;
  const int reps = cfg.c_rep <= 0
                       ? 1
                       : static_cast<int>(std::ceil(cfg.c_rep * std::log2(std::max<double>(2, n))));

  Matrix sub;
  for (int r = 1; r <= max_r; ++r) {
    const Index buckets = 10 * (Index(1) << r);
    const double raise = std::min(1.0, 2.0 / std::pow(2.0, r));
    for (int t = 0; t < reps; ++t) {
      RngStream hrng = rng.substream((static_cast<std::uint64_t>(r) << 32) | t);
      UniversalHash h = draw_hash(hrng, buckets);

      std::vector<std::vector<Index>> groups(static_cast<size_t>(buckets));
      for (Index j = 0; j < n; ++j)
        groups[static_cast<size_t>(h(rows[static_cast<size_t>(j)]))].push_back(
            rows[static_cast<size_t>(j)]);

      for (const auto& g : groups) {
        if (g.empty()) continue;
        sub.resize(static_cast<Index>(g.size()), A.cols());
        for (size_t k = 0; k < g.size(); ++k) sub.row(static_cast<Index>(k)) = A.row(g[k]);
        Vector lw = bucket_lewis(sub, p_M, cfg);
        for (size_t k = 0; k < g.size(); ++k) {
          if (lw[static_cast<Index>(k)] >= cfg.theta && raise > s[g[k]]) {
            s[g[k]] = raise;
            level[static_cast<size_t>(g[k])] = {r, t};
          }
        }
      }
    }
  }
}

SensitivityEstimates sensitivities_on_rows(const Matrix& A, const LossDescriptor& M,
                                           const std::vector<Index>& rows, double tau,
                                           RngStream& rng, const SensitivityConfig& cfg) {
  require(M.monotone, "m_sensitivities: loss must be monotone");
  const Index n_amb = A.rows();
  const Index n = static_cast<Index>(rows.size());
  require(n >= 1, "m_sensitivities: empty row set");
  require(tau >= 1 && tau <= static_cast<double>(n), "m_sensitivities: tau must be in [1, n]");

  SensitivityEstimates out;
  out.tau = tau;
  out.s = Vector::Zero(n_amb);
  out.level.assign(static_cast<size_t>(n_amb), {0, -1});
  const double floor = std::min(1.0, 2.0 * tau / static_cast<double>(n));
  for (Index i : rows) out.s[i] = floor;

  if (M.components.empty()) {
    hash_and_raise(A, rows, M.p_M, tau, rng, cfg, out.s, out.level);
  } else {
    // sum-composed loss: a heavy coordinate is heavy for some component, so
    // take twice the max of per-component estimates
    Vector combined = out.s;
    for (size_t c = 0; c < M.components.size(); ++c) {
      Vector sc = Vector::Zero(n_amb);
      for (Index i : rows) sc[i] = floor;
      std::vector<std::pair<int, int>> lc(static_cast<size_t>(n_amb), {0, -1});
      RngStream crng = rng.substream(0xc0u + c);
      hash_and_raise(A, rows, M.components[c].p_M, tau, crng, cfg, sc, lc);
      for (Index i : rows) {
        if (2.0 * sc[i] > combined[i]) {
          combined[i] = std::min(1.0, 2.0 * sc[i]);
          out.level[static_cast<size_t>(i)] = lc[static_cast<size_t>(i)];
        }
      }
    }
    out.s = combined;
  }

  for (Index i : rows) out.total += out.s[i];
  return out;
}

}  // namespace

SensitivityEstimates m_sensitivities(const Matrix& A, const LossDescriptor& M, double tau,
                                     RngStream& rng, const SensitivityConfig& cfg) {
  std::vector<Index> rows(static_cast<size_t>(A.rows()));
  for (Index i = 0; i < A.rows(); ++i) rows[static_cast<size_t>(i)] = i;
  return sensitivities_on_rows(A, M, rows, tau, rng, cfg);
}

SensitivityEstimates weighted_m_sensitivities(const Matrix& A, const LossDescriptor& M,
                                              const WeightVector& w, double tau,
                                              RngStream& rng, const SensitivityConfig& cfg) {
  require(w.n() == A.rows(), "weighted_m_sensitivities: size mismatch");
  for (const auto& [i, wi] : w.entries())
    require(wi >= 1.0, "weighted_m_sensitivities: weights must be >= 1 on the support");

  // dyadic level sets T_j = {i : 2^{j-1} <= w_i < 2^j}
  std::map<int, std::vector<Index>> levels;
  for (const auto& [i, wi] : w.entries()) {
    int j = static_cast<int>(std::floor(std::log2(wi))) + 1;
    if (wi < std::pow(2.0, j - 1)) --j;  // guard rounding at dyadic boundaries
    levels[j].push_back(i);
  }

  SensitivityEstimates out;
  out.tau = tau;
  out.s = Vector::Zero(A.rows());
  out.level.assign(static_cast<size_t>(A.rows()), {0, -1});
  int k = 0;
  for (const auto& [j, rows] : levels) {
    RngStream sub = rng.substream(static_cast<std::uint64_t>(0x17e0 + k++));
    const double tau_j = std::min(tau, static_cast<double>(rows.size()));
    SensitivityEstimates part = sensitivities_on_rows(A, M, rows, std::max(1.0, tau_j), sub, cfg);
    for (Index i : rows) {
      out.s[i] = std::min(1.0, 2.0 * part.s[i]);
      out.level[static_cast<size_t>(i)] = part.level[static_cast<size_t>(i)];
    }
  }
  out.total = out.s.sum();
  return out;
}

WeightVector sensitivity_sample(const WeightVector& w, const SensitivityEstimates& s,
                                double m, RngStream& rng, TargetOracle* b) {
  require(m > 0, "sensitivity_sample: m must be > 0");
  require(s.s.size() == w.n(), "sensitivity_sample: size mismatch");
  WeightVector out(w.n());
  for (const auto& [i, wi] : w.entries()) {
    const double pi = std::min(1.0, m * s.s[i]);
    if (pi <= 0) continue;
    if (pi >= 1.0 || rng.bernoulli(pi)) {
      out.set(i, wi / pi);
      if (b) (*b)(i);
    }
  }
  return out;
}

}  // namespace alsq
