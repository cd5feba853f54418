#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "alsq/rng.hpp"
#include "alsq/sensitivity.hpp"

using namespace alsq;

namespace {

Matrix random_matrix(Index n, Index d, RngStream& rng) {
  Matrix A(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < d; ++j) A(i, j) = rng.gaussian();
  return A;
}

// empirical per-row sensitivities: max over random directions with a simple
// hill climb on the best ones; always a lower bound on the truth
Vector brute_force_sensitivities(const Matrix& A, const LossDescriptor& M, int probes,
                                 RngStream& rng) {
  const Index n = A.rows(), d = A.cols();
  Vector shat = Vector::Zero(n);
  std::vector<Vector> argbest(static_cast<size_t>(n), Vector::Zero(d));
  auto ratios = [&](const Vector& x) {
    Vector Ax = A * x;
    double total = 0;
    for (Index i = 0; i < n; ++i) total += M.eval(std::abs(Ax[i]));
    if (total <= 0) return;
    for (Index i = 0; i < n; ++i) {
      const double r = M.eval(std::abs(Ax[i])) / total;
      if (r > shat[i]) {
        shat[i] = r;
        argbest[static_cast<size_t>(i)] = x;
      }
    }
  };
  for (int t = 0; t < probes; ++t) {
    Vector x(d);
    for (Index j = 0; j < d; ++j) x[j] = rng.gaussian();
    const double scale = std::exp(3.0 * (rng.uniform() - 0.5));
    ratios(scale * x);
  }
  // refine each row's champion direction
  for (Index i = 0; i < n; ++i) {
    Vector x = argbest[static_cast<size_t>(i)];
    double step = 0.3;
    for (int it = 0; it < 60; ++it) {
      bool improved = false;
      for (Index j = 0; j < d; ++j)
        for (double sgn : {1.0, -1.0}) {
          Vector cand = x;
          cand[j] += sgn * step * (1.0 + std::abs(x[j]));
          Vector Ax = A * cand;
          double total = 0;
          for (Index k = 0; k < n; ++k) total += M.eval(std::abs(Ax[k]));
          if (total <= 0) continue;
          const double r = M.eval(std::abs(Ax[i])) / total;
          if (r > shat[i]) {
            shat[i] = r;
            x = cand;
            improved = true;
          }
        }
      if (!improved) step *= 0.5;
      if (step < 1e-4) break;
    }
  }
  return shat;
}

}  // namespace

TEST_CASE("tau = n clamps every estimate to one") {
  RngStream rng(1);
  Matrix A = random_matrix(16, 2, rng);
  SensitivityEstimates est = m_sensitivities(A, huber_loss(1.0), 16.0, rng);
  for (Index i = 0; i < 16; ++i) CHECK(est.s[i] == 1.0);
  CHECK(est.total == doctest::Approx(16.0));
}

TEST_CASE("estimates respect the floor and the (0,1] range") {
  RngStream rng(2);
  Matrix A = random_matrix(200, 3, rng);
  const double tau = 4.0;
  SensitivityEstimates est = m_sensitivities(A, l2lq_loss(0.5), tau, rng);
  const double floor = 2.0 * tau / 200.0;
  for (Index i = 0; i < 200; ++i) {
    CHECK(est.s[i] >= floor);
    CHECK(est.s[i] <= 1.0);
  }
  CHECK(est.tau == tau);
}

TEST_CASE("a dominant row earns a large estimate") {
  RngStream rng(3);
  const Index n = 128;
  Matrix A = random_matrix(n, 2, rng);
  A *= 0.01;
  A.row(0) << 1000.0, 0.0;  // one massive row: true sensitivity near 1
  SensitivityEstimates est = m_sensitivities(A, lp_loss(2.0), 1.0, rng);
  CHECK(est.s[0] >= 0.5);
}

TEST_CASE("estimates upper bound brute-force sensitivities on most rows") {
  SensitivityConfig cfg;
  cfg.c_rep = 4.0;
  Index covered = 0, total_rows = 0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    RngStream rng(seed);
    Matrix A = random_matrix(100, 3, rng);
    A.row(0) *= 30.0;  // a genuinely heavy row
    for (const LossDescriptor& M : {huber_loss(1.0), l2lq_loss(0.5)}) {
      RngStream srng = rng.substream(10);
      SensitivityEstimates est = m_sensitivities(A, M, 2.0, srng, cfg);
      RngStream brng = rng.substream(20);
      Vector shat = brute_force_sensitivities(A, M, 4000, brng);
      for (Index i = 0; i < A.rows(); ++i) {
        ++total_rows;
        if (est.s[i] >= shat[i] * (1 - 1e-9)) ++covered;
      }
    }
  }
  CHECK(static_cast<double>(covered) / static_cast<double>(total_rows) >= 0.95);
}

TEST_CASE("total stays within the d^{max(1,p/2)} log^2 n + tau shape") {
  RngStream rng(5);
  for (const LossDescriptor& M :
       {huber_loss(1.0), tukey_lp_loss(1.0, 2.0), l2lq_loss(0.5), lp_loss(3.0)}) {
    CAPTURE(M.name);
    Matrix A = random_matrix(512, 4, rng);
    const double tau = 8.0;
    RngStream srng = rng.substream(1);
    SensitivityEstimates est = m_sensitivities(A, M, tau, srng);
    const double lgn = std::log2(512.0);
    const double bound =
        60.0 * (std::pow(4.0, std::max(1.0, M.p_M / 2)) * lgn * lgn + tau);
    CHECK(est.total <= bound);
  }
}

TEST_CASE("single-hash variant runs one repetition and stays bounded") {
  RngStream rng(6);
  Matrix A = random_matrix(256, 3, rng);
  SensitivityConfig cfg;
  cfg.c_rep = 0;  // single hash
  SensitivityEstimates est = m_sensitivities(A, huber_loss(1.0), 2.0, rng, cfg);
  CHECK(est.total <= 60.0 * (3.0 * 64.0 + 2.0));
  for (Index i = 0; i < 256; ++i) CHECK(est.s[i] <= 1.0);
}

TEST_CASE("weighted estimates require w >= 1 on the support") {
  RngStream rng(7);
  Matrix A = random_matrix(20, 2, rng);
  WeightVector w(20);
  w.set(0, 0.5);
  CHECK_THROWS_AS(weighted_m_sensitivities(A, huber_loss(1.0), w, 2.0, rng),
                  std::invalid_argument);
}

TEST_CASE("uniform weights give doubled single-level estimates") {
  RngStream rng(8);
  Matrix A = random_matrix(64, 2, rng);
  WeightVector w = WeightVector::ones(64);
  SensitivityEstimates est = weighted_m_sensitivities(A, huber_loss(1.0), w, 2.0, rng);
  // every value is twice a legal unweighted estimate (floor or 2/2^r), capped
  const double floor = 2.0 * 2.0 / 64.0;
  for (Index i = 0; i < 64; ++i) {
    const double half = est.s[i] / 2.0;
    bool legal = est.s[i] == 1.0 || std::abs(half - floor) < 1e-12;
    for (int r = 1; r <= 6 && !legal; ++r)
      legal = std::abs(half - 2.0 / std::pow(2.0, r)) < 1e-12;
    CHECK(legal);
  }
}

TEST_CASE("two dyadic levels are processed as separate sub-problems") {
  RngStream rng(9);
  const Index n = 364;
  Matrix A = random_matrix(n, 2, rng);
  WeightVector w(n);
  for (Index i = 0; i < n; ++i) w.set(i, i < 360 ? 1.0 : 8.0);
  // the w = 8 level set has only 4 rows, so its floor (with tau clamped to 4)
  // pushes every estimate there to 1 after doubling
  SensitivityEstimates est = weighted_m_sensitivities(A, huber_loss(1.0), w, 8.0, rng);
  for (Index i = 360; i < n; ++i) CHECK(est.s[i] == 1.0);
  // the big level set keeps sub-unit estimates on plenty of rows
  Index small_count = 0;
  for (Index i = 0; i < 360; ++i)
    if (est.s[i] < 1.0) ++small_count;
  CHECK(small_count > 0);
}

TEST_CASE("sampling keeps everything when m clears 1/min(s)") {
  RngStream rng(10);
  Matrix A = random_matrix(30, 2, rng);
  SensitivityEstimates est = m_sensitivities(A, huber_loss(1.0), 2.0, rng);
  double smin = 1.0;
  for (Index i = 0; i < 30; ++i) smin = std::min(smin, est.s[i]);
  WeightVector w = WeightVector::ones(30);
  WeightVector out = sensitivity_sample(w, est, 1.0 / smin + 1.0, rng);
  CHECK(out.nnz() == 30);
  for (const auto& [i, wi] : out.entries()) CHECK(wi == 1.0);
}

TEST_CASE("sensitivity sampling is unbiased for weighted M-sums") {
  RngStream rng(11);
  Matrix A = random_matrix(40, 3, rng);
  Vector y = A * Vector::Ones(3);
  const LossDescriptor M = huber_loss(1.0);
  SensitivityEstimates est = m_sensitivities(A, M, 2.0, rng);
  WeightVector w = WeightVector::ones(40);
  const double truth = msum(y, M, w);
  const int trials = 10000;
  double sum = 0, sumsq = 0;
  for (int t = 0; t < trials; ++t) {
    RngStream trng = rng.substream(static_cast<std::uint64_t>(t));
    WeightVector out = sensitivity_sample(w, est, 0.7, trng);
    const double v = msum(y, M, out);
    sum += v;
    sumsq += v * v;
  }
  const double mean = sum / trials;
  const double sd = std::sqrt((sumsq / trials - mean * mean) / trials);
  CHECK(std::abs(mean - truth) <= 3.0 * sd + 1e-12);
}

TEST_CASE("sampled support size concentrates around m * total") {
  RngStream rng(12);
  Matrix A = random_matrix(300, 3, rng);
  SensitivityEstimates est = m_sensitivities(A, huber_loss(1.0), 3.0, rng);
  WeightVector w = WeightVector::ones(300);
  const double m = 0.5;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    RngStream trng = rng.substream(seed);
    WeightVector out = sensitivity_sample(w, est, m, trng);
    CHECK(static_cast<double>(out.nnz()) <= 2.0 * m * est.total + 20.0);
  }
}

TEST_CASE("the oracle is queried exactly at surviving indices") {
  RngStream rng(13);
  Matrix A = random_matrix(50, 2, rng);
  SensitivityEstimates est = m_sensitivities(A, huber_loss(1.0), 2.0, rng);
  TargetOracle b(Vector::Ones(50));
  WeightVector w = WeightVector::ones(50);
  WeightVector out = sensitivity_sample(w, est, 0.5, rng, &b);
  CHECK(b.count() == out.nnz());
  for (const auto& [i, wi] : out.entries()) CHECK(b.was_queried(i));
}

TEST_CASE("composed losses take doubled per-component maxima") {
  RngStream rng(14);
  Matrix A = random_matrix(64, 2, rng);
  A.row(0) *= 100.0;
  const LossDescriptor M = compose_sum(huber_loss(1.0), lp_loss(1.0));
  SensitivityEstimates est = m_sensitivities(A, M, 2.0, rng);
  CHECK(est.s[0] >= 0.5);  // dominant row still detected
  for (Index i = 0; i < 64; ++i) CHECK(est.s[i] <= 1.0);
}

TEST_CASE("non-monotone losses are rejected") {
  RngStream rng(15);
  Matrix A = random_matrix(10, 2, rng);
  LossDescriptor bad = huber_loss(1.0);
  bad.monotone = false;
  CHECK_THROWS_AS(m_sensitivities(A, bad, 2.0, rng), std::invalid_argument);
}
