#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "alsq/instances.hpp"
#include "alsq/lp_active.hpp"
#include "alsq/rng.hpp"

using namespace alsq;

namespace {

Matrix random_matrix(Index n, Index d, RngStream& rng) {
  Matrix A(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < d; ++j) A(i, j) = rng.gaussian();
  return A;
}

double full_cost(const Matrix& A, const Vector& b, const Vector& x, double p) {
  Vector r = A * x - b;
  double s = 0;
  for (Index i = 0; i < r.size(); ++i) s += std::pow(std::abs(r[i]), p);
  return s;
}

}  // namespace

TEST_CASE("budget rejects bad parameters") {
  CHECK_THROWS_AS(budget(1.5, 10, 100, 0.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(budget(1.5, 10, 100, 0.25, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(budget(0.0, 10, 100, 0.25, 0.1), std::invalid_argument);
}

TEST_CASE("budget beta ladder is 2^i/(2^i - 1)") {
  ActiveBudget b = budget(1.5, 10, 1000, 0.01, 0.1);
  REQUIRE(!b.beta_ladder.empty());
  for (size_t i = 0; i < b.beta_ladder.size(); ++i) {
    const double expect = std::pow(2.0, i + 1) / (std::pow(2.0, i + 1) - 1.0);
    CHECK(b.beta_ladder[i] == doctest::Approx(expect).epsilon(1e-12));
  }
  CHECK(b.beta_ladder.size() ==
        static_cast<size_t>(std::ceil(std::log2(std::log2(1.0 / 0.01)))));
  // no ladder outside (1,2)
  CHECK(budget(3.0, 10, 1000, 0.01, 0.1).beta_ladder.empty());
  CHECK(budget(0.5, 10, 1000, 0.01, 0.1).beta_ladder.empty());
}

TEST_CASE("budget doubles linearly in d for p = 1.5, holding the logs fixed") {
  ActiveBudget b1 = budget(1.5, 10, 100000, 0.25, 0.1);
  ActiveBudget b2 = budget(1.5, 20, 100000, 0.25, 0.1);
  const double ratio = (static_cast<double>(b2.m) / b2.polylog) /
                       (static_cast<double>(b1.m) / b1.polylog);
  CHECK(ratio >= 2.0);
  CHECK(ratio <= 2.4);
}

TEST_CASE("budget scales as eps^{-3} for p = 3") {
  ActiveBudget b1 = budget(3.0, 10, 100000, 0.2, 0.1);
  ActiveBudget b2 = budget(3.0, 10, 100000, 0.1, 0.1);
  const double ratio = static_cast<double>(b2.m) / static_cast<double>(b1.m);
  CHECK(ratio >= 7.5);
  CHECK(ratio <= 9.5);
}

TEST_CASE("boosting returns an identical candidate unchanged") {
  RngStream rng(1);
  Matrix A = random_matrix(30, 3, rng);
  Vector x(3);
  x << 1, 2, 3;
  std::vector<Vector> cands(7, x);
  BoostResult res = boost_candidates(cands, A, lp_loss(1.5), 1.0);
  CHECK(res.qualified);
  CHECK((res.x - x).norm() == 0.0);
}

TEST_CASE("boosting never returns the lone far outlier") {
  RngStream rng(2);
  Matrix A = random_matrix(40, 3, rng);
  Vector good(3);
  good << 1, 0, -1;
  for (int pos = 0; pos < 10; ++pos) {
    std::vector<Vector> cands;
    for (int k = 0; k < 10; ++k) {
      if (k == pos) {
        cands.push_back(Vector::Constant(3, 1e6));
      } else {
        Vector g = good;
        g[0] += 1e-3 * k;  // small spread among the good ones
        cands.push_back(g);
      }
    }
    BoostResult res = boost_candidates(cands, A, lp_loss(1.0), 1.0);
    CHECK(res.qualified);
    CHECK((res.x - Vector::Constant(3, 1e6)).norm() > 1.0);
  }
}

TEST_CASE("boosting is deterministic given input order") {
  RngStream rng(3);
  Matrix A = random_matrix(25, 2, rng);
  std::vector<Vector> cands;
  for (int k = 0; k < 8; ++k) {
    Vector v(2);
    v << 0.01 * k, -0.01 * k;
    cands.push_back(v);
  }
  BoostResult r1 = boost_candidates(cands, A, lp_loss(2.0), 1.0);
  BoostResult r2 = boost_candidates(cands, A, lp_loss(2.0), 1.0);
  CHECK(r1.chosen == r2.chosen);
}

TEST_CASE("boosted output meets the kappa-alpha guarantee on a known fixture") {
  // d = 1 so everything is computable by hand: A = 1_n, b with OPT known
  const Index n = 50;
  Matrix A = Matrix::Ones(n, 1);
  Vector b = Vector::Zero(n);
  b[0] = 10.0;  // OPT at x* = 0 for p = 1: cost 10
  const double p = 1.0, OPT = 10.0, alpha = 2.0, kappa = 1.0;
  // 9 candidates with ||Ax - b||_1 <= alpha OPT, 1 adversarial
  std::vector<Vector> cands;
  for (int k = 0; k < 9; ++k) {
    Vector v(1);
    v << 0.2 * (k % 3);  // cost 10 - v + 49 v <= 20 for v <= 0.2
    cands.push_back(v);
  }
  cands.push_back(Vector::Constant(1, 1e5));
  BoostResult res = boost_candidates(cands, A, lp_loss(p), kappa);
  const double cost = full_cost(A, b, res.x, p);
  CHECK(cost <= (kappa * alpha + 2 * std::pow(kappa, 3) * (alpha + 1)) * OPT);
}

TEST_CASE("constant factor run: consistent target costs zero") {
  RngStream rng(4);
  Matrix A = random_matrix(400, 4, rng);
  Vector xstar(4);
  xstar << 1, -2, 0.5, 3;
  TargetOracle b(A * xstar);
  RngStream prng = rng.substream(1);
  SolveResult res = constant_factor_lp(A, b, 1.5, 0.1, prng);
  CHECK(full_cost(A, A * xstar, res.x, 1.5) <= 1e-10);
  CHECK(b.count() < 400);
}

TEST_CASE("constant factor quality with a huge outlier at p = 1") {
  Index ok = 0;
  const Index seeds = 20;
  for (std::uint64_t seed = 0; seed < seeds; ++seed) {
    RngStream rng(seed);
    Matrix A = random_matrix(1000, 5, rng);
    Vector xstar(5);
    for (Index j = 0; j < 5; ++j) xstar[j] = rng.gaussian();
    Vector b = A * xstar;
    for (Index i = 0; i < 1000; ++i) b[i] += 0.1 * rng.gaussian();
    b[3] += 1e6;  // single huge outlier
    SolveResult full = solve_weighted_lp(A, b, 1.0);
    TargetOracle oracle(b);
    RngStream prng = rng.substream(1);
    SolveResult res = constant_factor_lp(A, oracle, 1.0, 0.1, prng);
    const double ratio = full_cost(A, b, res.x, 1.0) / full.objective;
    if (ratio <= 10.0) ++ok;
  }
  CHECK(ok >= 18);  // cost ratio <= 10 in nearly every seed
}

TEST_CASE("recursion passes straight through when n <= m") {
  RngStream rng(5);
  Matrix A = random_matrix(50, 3, rng);
  Vector b(50);
  for (Index i = 0; i < 50; ++i) b[i] = rng.gaussian();
  TargetOracle oracle(b);
  RngStream prng = rng.substream(1);
  RecursiveLpResult res = recursive_relative_lp(A, oracle, 1.5, 100, prng);
  CHECK(res.depth == 0);
  CHECK(oracle.count() == 50);  // base case reads the whole subproblem
  SolveResult direct = solve_weighted_lp(A, b, 1.5);
  CHECK(std::abs(res.sol.objective - direct.objective) <=
        1e-8 * std::max(1.0, direct.objective));
}

TEST_CASE("recursion base sample stays within m and bounds the query count") {
  RngStream rng(6);
  Matrix A = random_matrix(4000, 5, rng);
  Vector b(4000);
  for (Index i = 0; i < 4000; ++i) b[i] = rng.gaussian();
  const Index m = 300;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    TargetOracle oracle(b);
    RngStream prng = rng.substream(seed);
    RecursiveLpResult res = recursive_relative_lp(A, oracle, 1.5, m, prng);
    CHECK(res.depth_ok);
    CHECK(res.depth <= static_cast<int>(std::ceil(std::log2(4000.0))) + 1);
    CHECK(static_cast<Index>(res.sample_rows.size()) <= m);
    CHECK(oracle.count() <= m);
  }
}

TEST_CASE("high probability pipeline stays within budget and is b-oblivious") {
  RngStream rng(7);
  const Index n = 3000, d = 5;
  Matrix A = random_matrix(n, d, rng);
  Vector b1(n), b2(n);
  for (Index i = 0; i < n; ++i) {
    b1[i] = rng.gaussian();
    b2[i] = 100.0 * rng.uniform() - 3.0;
  }
  LpActiveConfig cfg;
  ActiveBudget bud = budget(1.5, d, n, 0.25, 0.2, cfg.budget);

  TargetOracle o1(b1), o2(b2);
  RngStream r1 = rng.substream(1), r2 = rng.substream(1);
  (void)high_prob_relative_lp(A, o1, 1.5, 0.25, 0.2, r1, cfg);
  (void)high_prob_relative_lp(A, o2, 1.5, 0.25, 0.2, r2, cfg);
  CHECK(o1.count() <= bud.m);
  // query sets identical although the two b's are wildly different
  CHECK(o1.queried_indices() == o2.queried_indices());
}

TEST_CASE("high probability pipeline degrades gracefully at delta = 1/2") {
  RngStream rng(8);
  Matrix A = random_matrix(500, 3, rng);
  Vector xstar(3);
  xstar << 1, 1, -1;
  TargetOracle b(A * xstar);
  RngStream prng = rng.substream(1);
  SolveResult res = high_prob_relative_lp(A, b, 1.0, 0.4, 0.5, prng);
  CHECK(full_cost(A, A * xstar, res.x, 1.0) <= 1e-8);
}

TEST_CASE("relative error on a modest outlier instance") {
  Index ok = 0;
  const Index seeds = 10;
  for (std::uint64_t seed = 0; seed < seeds; ++seed) {
    RngStream rng(900 + seed);
    RngStream irng = rng.substream(1);
    Instance inst = gen_instance(
        "gaussian_outlier", {{"n", Index(4000)}, {"d", Index(5)}, {"frac", 0.02}, {"mag", 1e5}},
        irng);
    SolveResult full = solve_weighted_lp(inst.A, inst.b, 1.5);
    TargetOracle oracle(inst.b);
    RngStream prng = rng.substream(2);
    SolveResult act = high_prob_relative_lp(inst.A, oracle, 1.5, 0.25, 0.2, prng);
    const double ratio =
        std::pow(full_cost(inst.A, inst.b, act.x, 1.5) / full.objective, 1.0 / 1.5);
    if (ratio <= 1.25) ++ok;
    CHECK(oracle.count() < 4000);
  }
  CHECK(ok >= 8);
}

TEST_CASE("no-assumptions pipeline keeps everything when m1 clears n") {
  RngStream rng(9);
  Matrix A = random_matrix(60, 3, rng);
  Vector b(60);
  for (Index i = 0; i < 60; ++i) b[i] = rng.gaussian();
  TargetOracle oracle(b);
  NoAssumptionsConfig cfg;
  cfg.C_stage1 = 1e9;  // saturates every p_i at 1
  RngStream prng = rng.substream(1);
  (void)no_assumptions_lp(A, oracle, 1.5, 0.25, 0.2, prng, cfg);
  CHECK(oracle.count() == 60);
}

TEST_CASE("no-assumptions stage-1 query count concentrates") {
  RngStream rng(10);
  Matrix A = random_matrix(3000, 4, rng);
  Vector b(3000);
  for (Index i = 0; i < 3000; ++i) b[i] = rng.gaussian();
  NoAssumptionsConfig cfg;
  const double p = 1.5;
  LewisWeights lw = lewis_weights(A, p, 1e-6, 60);
  const double m1 = cfg.C_stage1 * 4.0 * std::max(1.0, std::log2(1.0 / (0.25 * 0.2))) /
                    std::pow(0.25, 2.0 + p);
  SamplingPlan plan = lewis_sampling_plan(cfg.inner.embed.ub_slack * lw.w, p, m1, 4);
  const double expected = plan.prob.sum();
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    TargetOracle oracle(b);
    RngStream prng(12345 + seed);
    (void)no_assumptions_lp(A, oracle, p, 0.25, 0.2, prng, cfg);
    CHECK(static_cast<double>(oracle.count()) <= 2.0 * expected + 20.0);
  }
}
