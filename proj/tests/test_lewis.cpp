#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "alsq/lewis.hpp"
#include "alsq/losses.hpp"
#include "alsq/rng.hpp"

using namespace alsq;

namespace {

Matrix random_matrix(Index n, Index d, RngStream& rng, double scale = 1.0) {
  Matrix A(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < d; ++j) A(i, j) = scale * rng.gaussian();
  return A;
}

// Independent fixed-point oracle: damped iteration on the defining equation
// w_i = (a_i^T (A^T W^{1-2/p} A)^{-1} a_i)^{p/2}, with explicit d x d inverse.
Vector lewis_oracle(const Matrix& A, double p, Vector w0, double damping,
                    double tol = 1e-12, int iters = 20000) {
  const Index n = A.rows(), d = A.cols();
  Vector w = std::move(w0);
  for (int it = 0; it < iters; ++it) {
    Matrix G = Matrix::Zero(d, d);
    for (Index i = 0; i < n; ++i)
      G += std::pow(w[i], 1.0 - 2.0 / p) * A.row(i).transpose() * A.row(i);
    Matrix Ginv = G.inverse();
    Vector w_new(n);
    double resid = 0;
    for (Index i = 0; i < n; ++i) {
      w_new[i] = std::pow(A.row(i) * Ginv * A.row(i).transpose(), p / 2.0);
      resid = std::max(resid, std::abs(w_new[i] - w[i]) / w[i]);
    }
    for (Index i = 0; i < n; ++i)
      w[i] = std::pow(w[i], 1.0 - damping) * std::pow(w_new[i], damping);
    if (resid <= tol) break;
  }
  return w;
}

}  // namespace

TEST_CASE("leverage scores of the identity are all one") {
  Matrix I = Matrix::Identity(6, 6);
  Vector tau = leverage_scores(I);
  for (Index i = 0; i < 6; ++i) CHECK(tau[i] == doctest::Approx(1.0));
}

TEST_CASE("leverage scores match the closed form on the 3x2 example") {
  Matrix A(3, 2);
  A << 1, 0, 0, 1, 1, 1;
  // (A^T A)^{-1} = (1/3) [[2,-1],[-1,2]]; every score comes out 2/3
  Vector tau = leverage_scores(A);
  for (Index i = 0; i < 3; ++i) CHECK(tau[i] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(tau.sum() == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("duplicating a row halves its leverage score") {
  RngStream rng(3);
  Matrix B = random_matrix(12, 3, rng);
  // matrix with v twice vs matrix with sqrt(2) v once
  Matrix With2(13, 3), With1(12, 3);
  With2.topRows(12) = B;
  With2.row(12) = B.row(0);
  With1 = B;
  With1.row(0) = std::sqrt(2.0) * B.row(0);
  Vector t2 = leverage_scores(With2);
  Vector t1 = leverage_scores(With1);
  CHECK(t2[0] == doctest::Approx(t2[12]).epsilon(1e-10));
  CHECK(2.0 * t2[0] == doctest::Approx(t1[0]).epsilon(1e-9));
}

TEST_CASE("leverage handles rank deficiency through the pseudo-inverse") {
  RngStream rng(5);
  Matrix A(20, 4);
  A.leftCols(2) = random_matrix(20, 2, rng);
  A.col(2) = A.col(0) + A.col(1);  // dependent
  A.col(3) = 2.0 * A.col(0);
  CHECK(numeric_rank(A) == 2);
  Vector tau = leverage_scores(A);
  CHECK(tau.sum() == doctest::Approx(2.0).epsilon(1e-8));
  for (Index i = 0; i < 20; ++i) {
    CHECK(tau[i] >= 0.0);
    CHECK(tau[i] <= 1.0);
  }
}

TEST_CASE("lewis weights at p = 2 equal leverage scores") {
  RngStream rng(7);
  Matrix A = random_matrix(60, 5, rng);
  LewisWeights lw = lewis_weights(A, 2.0, 1e-12);
  Vector tau = leverage_scores(A);
  CHECK(lw.converged);
  CHECK((lw.w - tau).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("lewis weights of the identity are all one for any p") {
  for (double p : {0.5, 1.0, 1.7, 2.0, 3.0, 5.0}) {
    Matrix I = Matrix::Identity(5, 5);
    LewisWeights lw = lewis_weights(I, p, 1e-10);
    CHECK(lw.converged);
    for (Index i = 0; i < 5; ++i) CHECK(lw.w[i] == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("lewis weights agree with the damped fixed-point oracle from 5 starts") {
  Matrix A(3, 2);
  A << 1, 0, 0, 1, 1, 1;
  const double p = 1.0;
  const Index n = 3;

  std::vector<Vector> inits;
  inits.push_back(Vector::Constant(n, 2.0 / 3.0));
  inits.push_back(Vector::Constant(n, 0.05));
  inits.push_back(Vector::Constant(n, 0.95));
  Vector v(n);
  v << 0.2, 0.5, 0.9;
  inits.push_back(v);
  v << 0.9, 0.1, 0.4;
  inits.push_back(v);

  std::vector<Vector> oracle_results;
  for (const auto& w0 : inits) oracle_results.push_back(lewis_oracle(A, p, w0, 0.5));
  for (size_t k = 1; k < oracle_results.size(); ++k)
    CHECK((oracle_results[k] - oracle_results[0]).cwiseAbs().maxCoeff() <= 1e-9);

  LewisWeights lw = lewis_weights(A, p, 1e-12, 1000);
  CHECK(lw.converged);
  CHECK((lw.w - oracle_results[0]).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("lewis weights: residual, range, and sum over a p sweep") {
  RngStream rng(11);
  Matrix A = random_matrix(120, 6, rng);
  for (double p : {0.5, 1.0, 1.5, 2.0, 3.0, 4.5}) {
    CAPTURE(p);
    const double tol = 1e-9;
    LewisWeights lw = lewis_weights(A, p, tol, 2000);
    CHECK(lw.converged);
    CHECK(lw.residual <= tol);
    CHECK(std::abs(lw.sum_w - 6.0) <= 10 * tol * 6.0 + 1e-6);
    for (Index i = 0; i < A.rows(); ++i) {
      CHECK(lw.w[i] > 0.0);
      CHECK(lw.w[i] <= 1.0);
    }
  }
}

TEST_CASE("all-zero rows get weight zero and do not block convergence") {
  RngStream rng(13);
  Matrix A = random_matrix(30, 3, rng);
  A.row(7).setZero();
  A.row(20).setZero();
  LewisWeights lw = lewis_weights(A, 1.5, 1e-10);
  CHECK(lw.converged);
  CHECK(lw.w[7] == 0.0);
  CHECK(lw.w[20] == 0.0);
  CHECK(std::abs(lw.sum_w - 3.0) <= 1e-6);
}

TEST_CASE("lewis weights bound sensitivities (brute-force probe)") {
  RngStream rng(17);
  for (double p : {1.0, 1.5, 3.0}) {
    CAPTURE(p);
    Matrix A = random_matrix(40, 3, rng);
    LewisWeights lw = lewis_weights(A, p, 1e-10);
    const double boost = std::pow(3.0, std::max(0.0, p / 2 - 1));
    Vector shat = Vector::Zero(40);
    RngStream prng = rng.substream(static_cast<std::uint64_t>(p * 10));
    for (int t = 0; t < 20000; ++t) {
      Vector x(3);
      for (Index j = 0; j < 3; ++j) x[j] = prng.gaussian();
      Vector Ax = A * x;
      double total = 0;
      for (Index i = 0; i < 40; ++i) total += std::pow(std::abs(Ax[i]), p);
      for (Index i = 0; i < 40; ++i)
        shat[i] = std::max(shat[i], std::pow(std::abs(Ax[i]), p) / total);
    }
    for (Index i = 0; i < 40; ++i) CHECK(shat[i] <= boost * lw.w[i] * (1 + 1e-6));
  }
}

TEST_CASE("split_rows is the identity when all weights are small") {
  RngStream rng(19);
  Matrix A = random_matrix(50, 4, rng);
  Vector w = Vector::Constant(50, 0.01);  // below C2*d/n = 8*4/50
  SplitRows sp = split_rows(A, w, 1.5, 8.0);
  CHECK(sp.A.rows() == 50);
  for (Index i = 0; i < 50; ++i) CHECK(sp.parent[static_cast<size_t>(i)] == i);
  CHECK((sp.A - A).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("split_rows makes k scaled copies of a heavy row") {
  Matrix A(4, 2);
  A << 1, 0, 0, 1, 2, 3, 0.5, 0.5;
  const double C2 = 8.0;
  const double threshold = C2 * 2.0 / 4.0;  // = 4
  Vector w = Vector::Constant(4, 0.1);
  w[2] = 3.0 * threshold;  // k = 3
  SplitRows sp = split_rows(A, w, 1.0, C2);
  CHECK(sp.A.rows() == 6);
  CHECK(sp.copies[2] == 3);
  Index copies_of_2 = 0;
  for (size_t r = 0; r < sp.parent.size(); ++r)
    if (sp.parent[r] == 2) {
      ++copies_of_2;
      CHECK(sp.A(static_cast<Index>(r), 0) == doctest::Approx(2.0 / 3.0));
      CHECK(sp.A(static_cast<Index>(r), 1) == doctest::Approx(1.0));
    }
  CHECK(copies_of_2 == 3);
}

TEST_CASE("split_rows preserves the lp norm of every image vector") {
  RngStream rng(23);
  const double p = 1.5;
  Matrix A = random_matrix(60, 4, rng);
  LewisWeights lw = lewis_weights(A, p, 1e-8);
  SplitRows sp = split_rows(A, 1.05 * lw.w, p, 2.0);
  CHECK(sp.A.rows() > 60);  // something actually split
  for (int t = 0; t < 100; ++t) {
    Vector x(4);
    for (Index j = 0; j < 4; ++j) x[j] = rng.gaussian();
    const double n0 = lp_norm(A * x, p);
    const double n1 = lp_norm(sp.A * x, p);
    CHECK(std::abs(n1 - n0) <= 1e-12 * std::max(1.0, n0));
  }
}

TEST_CASE("split_rows flattens the lewis weights of the output") {
  RngStream rng(29);
  const double p = 1.3, C2 = 2.0;
  Matrix A = random_matrix(40, 3, rng);
  A.row(0) *= 40.0;  // heavy row
  LewisWeights lw = lewis_weights(A, p, 1e-10);
  SplitRows sp = split_rows(A, 1.05 * lw.w, p, C2);
  LewisWeights lw2 = lewis_weights(sp.A, p, 1e-8, 500);
  const double cap = C2 * 3.0 / static_cast<double>(A.rows());
  for (Index i = 0; i < sp.A.rows(); ++i) CHECK(lw2.w[i] <= cap * (1 + 1e-4));
}

TEST_CASE("split_and_sample keeps everything when all coins are heads") {
  // find a seed whose first 6 coins are heads
  Matrix A = Matrix::Identity(6, 6);
  for (std::uint64_t seed = 0; seed < 50000; ++seed) {
    RngStream probe(seed);
    bool all = true;
    for (int i = 0; i < 6; ++i) all = all && probe.bernoulli(0.5);
    if (!all) continue;
    RngStream rng(seed);
    auto [S, kept] = split_and_sample(A, 1.0, rng);
    REQUIRE(kept.size() == 6);
    CHECK((S - 2.0 * A).cwiseAbs().maxCoeff() == 0.0);  // scale 2^{1/p}, p = 1
    return;
  }
  FAIL("no all-heads seed found");
}

TEST_CASE("split_and_sample is unbiased for the lp^p mass") {
  RngStream rng(31);
  const double p = 1.5;
  Matrix A = random_matrix(20, 3, rng);
  Vector x(3);
  x << 0.3, -1.0, 0.7;
  const double truth = std::pow(lp_norm(A * x, p), p);
  const int trials = 10000;
  double sum = 0, sumsq = 0;
  for (int t = 0; t < trials; ++t) {
    RngStream trng = rng.substream(static_cast<std::uint64_t>(t));
    auto [S, kept] = split_and_sample(A, p, trng);
    const double v = kept.empty() ? 0.0 : std::pow(lp_norm(S * x, p), p);
    sum += v;
    sumsq += v * v;
  }
  const double mean = sum / trials;
  const double sd = std::sqrt((sumsq / trials - mean * mean) / trials);
  CHECK(std::abs(mean - truth) <= 3.0 * sd + 1e-12);
}

TEST_CASE("split_and_sample kept count concentrates binomially") {
  Matrix A = Matrix::Ones(400, 2);
  for (std::uint64_t seed = 100; seed < 140; ++seed) {
    RngStream rng(seed);
    auto [S, kept] = split_and_sample(A, 2.0, rng);
    CHECK(std::abs(static_cast<double>(kept.size()) - 200.0) <= 4.0 * std::sqrt(400.0));
  }
}

TEST_CASE("one-shot sampling plan saturates for huge m") {
  RngStream rng(37);
  Matrix A = random_matrix(25, 3, rng);
  LewisWeights lw = lewis_weights(A, 1.0, 1e-8);
  SamplingPlan plan = lewis_sampling_plan(lw.w, 1.0, 1e9, 3);
  for (Index i = 0; i < 25; ++i) CHECK(plan.prob[i] == 1.0);
  TargetOracle b(Vector::Ones(25));
  PlanApplication app = apply_plan(A, &b, plan, rng);
  CHECK(app.rows.size() == 25);
  for (Index j = 0; j < 25; ++j) CHECK(app.scale[j] == 1.0);
  CHECK(b.count() == 25);
}

TEST_CASE("one-shot sampling is unbiased and queries exactly the selection") {
  RngStream rng(41);
  Matrix A = random_matrix(30, 3, rng);
  Vector y = A * Vector::Ones(3);
  const double p = 1.5;
  LewisWeights lw = lewis_weights(A, p, 1e-8);
  SamplingPlan plan = lewis_sampling_plan(lw.w, p, 2.0, 3);

  const double truth = std::pow(lp_norm(y, p), p);
  const int trials = 10000;
  double sum = 0, sumsq = 0;
  for (int t = 0; t < trials; ++t) {
    RngStream trng = rng.substream(static_cast<std::uint64_t>(t));
    PlanApplication app = apply_plan(A, nullptr, plan, trng);
    double v = 0;
    for (size_t j = 0; j < app.rows.size(); ++j)
      v += std::pow(app.scale[static_cast<Index>(j)] * std::abs(y[app.rows[j]]), p);
    sum += v;
    sumsq += v * v;
  }
  const double mean = sum / trials;
  const double sd = std::sqrt((sumsq / trials - mean * mean) / trials);
  CHECK(std::abs(mean - truth) <= 3.0 * sd + 1e-12);

  TargetOracle b(y);
  RngStream orng = rng.substream(99999);
  PlanApplication app = apply_plan(A, &b, plan, orng);
  CHECK(b.count() == static_cast<Index>(app.rows.size()));
}

TEST_CASE("subspace embedding base case returns all-ones weights") {
  RngStream rng(43);
  Matrix A = random_matrix(30, 3, rng);
  EmbeddingConfig cfg;
  cfg.C_se = 10.0;  // push the target above n
  REQUIRE(embedding_target_rows(30, 3, 1.5, 0.25, 0.1, cfg) >= 30);
  EmbeddingResult emb = lp_subspace_embedding(A, 1.5, 0.25, 0.1, rng, cfg);
  CHECK(emb.rounds == 0);
  CHECK(emb.w.nnz() == 30);
  for (const auto& [i, wi] : emb.w.entries()) CHECK(wi == 1.0);
}

TEST_CASE("subspace embedding compresses and keeps nonnegative weights") {
  RngStream rng(47);
  Matrix A = random_matrix(3000, 4, rng);
  EmbeddingConfig cfg;
  cfg.C_se = 0.01;
  const Index target = embedding_target_rows(3000, 4, 1.0, 0.5, 0.1, cfg);
  REQUIRE(target < 3000);
  EmbeddingResult emb = lp_subspace_embedding(A, 1.0, 0.5, 0.1, rng, cfg);
  CHECK(emb.ok);
  CHECK(emb.rounds >= 1);
  CHECK(emb.rounds <= static_cast<int>(std::ceil(std::log2(3000.0))) + cfg.extra_rounds);
  CHECK(emb.w.nnz() <= static_cast<Index>(1.5 * static_cast<double>(target)));
  for (const auto& [i, wi] : emb.w.entries()) CHECK(wi > 0.0);

  // moderate empirical distortion on random directions
  double worst = 0;
  for (int t = 0; t < 300; ++t) {
    Vector x(4);
    for (Index j = 0; j < 4; ++j) x[j] = rng.gaussian();
    const double full = std::pow(lp_norm(A * x, 1.0), 1.0);
    const double sub = weighted_lp_cost(A, x, emb.w, 1.0);
    worst = std::max(worst, std::abs(sub / full - 1.0));
  }
  CHECK(worst <= 0.9);  // sanity bound; the acceptance suite pins the real one
}
