#include "alsq/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <thread>

#include "alsq/huber.hpp"
#include "alsq/instances.hpp"
#include "alsq/io.hpp"
#include "alsq/kron.hpp"
#include "alsq/lewis.hpp"
#include "alsq/lp_active.hpp"
#include "alsq/m_active.hpp"
#include "alsq/orlicz.hpp"
#include "alsq/sensitivity.hpp"
#include "alsq/solvers.hpp"

namespace alsq {

using nlohmann::json;

namespace {

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

json base_report(const std::string& name, const json& params) {
  return {{"schema_version", 1},
          {"experiment", name},
          {"params", params},
          {"trials", json::array()},
          {"summary", json::object()}};
}

// gaussian design with a few heavy rows, the standard embedding stress case
Matrix gaussian_spike(Index n, Index d, RngStream& rng, Index spike_rows = 5,
                      double spike_mag = 50.0) {
  Matrix A(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < d; ++j) A(i, j) = rng.gaussian();
  for (Index i = 0; i < std::min(spike_rows, n); ++i) A.row(i) *= spike_mag;
  return A;
}

double full_lp_cost(const Matrix& A, const Vector& b, const Vector& x, double p) {
  Vector r = A * x - b;
  double s = 0;
  for (Index i = 0; i < r.size(); ++i) s += pow_abs(r[i], p);
  return s;
}

}  // namespace

double pow_abs(double x, double p) {
  const double a = std::abs(x);
  if (p == 1.0) return a;
  if (p == 2.0) return a * a;
  if (p == 0.5) return std::sqrt(a);
  if (p == 1.5) return a * std::sqrt(a);
  if (p == 3.0) return a * a * a;
  return std::pow(a, p);
}

double median(std::vector<double> v) { return percentile(std::move(v), 0.5); }

double percentile(std::vector<double> v, double q) {
  require(!v.empty(), "percentile: empty sample");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const size_t lo = static_cast<size_t>(std::floor(pos));
  const size_t hi = std::min(v.size() - 1, lo + 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] * (1 - frac) + v[hi] * frac;
}

Index env_thread_cap() {
  if (const char* e = std::getenv("ALS_THREADS")) {
    const long v = std::strtol(e, nullptr, 10);
    if (v > 0) return static_cast<Index>(v);
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<Index>(hc);
}

void parallel_for(Index n, const std::function<void(Index)>& fn) {
  const Index threads = std::min<Index>(env_thread_cap(), n);
  if (threads <= 1) {
    for (Index i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<Index> next{0};
  for (Index t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (Index i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
    });
  for (auto& th : pool) th.join();
}

LossDescriptor parse_loss(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string name = spec.substr(0, colon);
  std::vector<double> params;
  if (colon != std::string::npos) {
    std::string rest = spec.substr(colon + 1);
    size_t pos = 0;
    while (pos < rest.size()) {
      size_t comma = rest.find(',', pos);
      if (comma == std::string::npos) comma = rest.size();
      params.push_back(std::stod(rest.substr(pos, comma - pos)));
      pos = comma + 1;
    }
  }
  return loss_catalog(name, params);
}

double lp_embedding_distortion(const Matrix& A, const WeightVector& w, double p,
                               int n_random, int n_ascent, RngStream& rng) {
  const Index d = A.cols();
  auto distortion = [&](const Vector& x) {
    Vector Ax = A * x;
    double full = 0;
    for (Index i = 0; i < Ax.size(); ++i) full += pow_abs(Ax[i], p);
    double sub = 0;
    for (const auto& [i, wi] : w.entries()) sub += wi * pow_abs(Ax[i], p);
    if (full <= 0) return 0.0;
    return std::abs(std::pow(sub / full, 1.0 / p) - 1.0);
  };

  double worst = 0;
  Vector worst_x = Vector::Zero(d);
  for (int t = 0; t < n_random; ++t) {
    Vector x(d);
    for (Index j = 0; j < d; ++j) x[j] = rng.gaussian();
    const double v = distortion(x);
    if (v > worst) {
      worst = v;
      worst_x = x;
    }
  }
  // hill-climb refinement of the worst direction
  double step = 0.5;
  Vector x = worst_x;
  for (int t = 0; t < n_ascent; ++t) {
    bool improved = false;
    for (Index j = 0; j < d; ++j) {
      for (double sgn : {1.0, -1.0}) {
        Vector cand = x;
        cand[j] += sgn * step;
        const double v = distortion(cand);
        if (v > worst) {
          worst = v;
          x = cand;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
    if (step < 1e-6) break;
  }
  return worst;
}

double huber_embedding_distortion(const Matrix& A, const WeightVector& w_ref,
                                  const WeightVector& w_new, double tau, int n_random,
                                  int radii, RngStream& rng) {
  const Index d = A.cols();
  const LossDescriptor H = huber_loss(tau);
  double worst = 0;
  for (int t = 0; t < n_random; ++t) {
    Vector x(d);
    for (Index j = 0; j < d; ++j) x[j] = rng.gaussian();
    Vector Ax = A * x;
    const double base = mnorm(Ax, H, w_ref);
    if (base <= 0) continue;
    for (int k = 0; k < radii; ++k) {
      const double rho = std::pow(2.0, k - radii / 2);
      Vector y = (rho / base) * Ax;
      const double ref = msum(y, H, w_ref);
      const double sub = msum(y, H, w_new);
      if (ref <= 0) continue;
      worst = std::max(worst, std::abs(std::sqrt(sub / ref) - 1.0));
    }
  }
  return worst;
}

namespace {

json run_lewis(const json& P) {
  json rep = base_report("lewis", P);
  const Index n = P.value("n", Index(500)), d = P.value("d", Index(20));
  const double tol = P.value("tol", 1e-9);
  const std::vector<double> ps = P.value("p", std::vector<double>{0.5, 1, 1.5, 2, 3});
  const Index seeds = P.value("seeds", Index(1));
  const std::uint64_t seed0 = P.value("seed", 1u);

  double worst_resid = 0, worst_sum_err = 0;
  for (Index s = 0; s < seeds; ++s) {
    RngStream rng(seed0 + static_cast<std::uint64_t>(s));
    Instance inst = gen_instance("gaussian", {{"n", n}, {"d", d}}, rng);
    for (double p : ps) {
      const double t0 = now_seconds();
      LewisWeights lw = lewis_weights(inst.A, p, tol, 400);
      const double sum_err = std::abs(lw.sum_w - static_cast<double>(d));
      worst_resid = std::max(worst_resid, lw.residual);
      worst_sum_err = std::max(worst_sum_err, sum_err);
      rep["trials"].push_back({{"seed", seed0 + static_cast<std::uint64_t>(s)},
                               {"p", p},
                               {"residual", lw.residual},
                               {"sum_w", lw.sum_w},
                               {"sum_err", sum_err},
                               {"iterations", lw.iterations},
                               {"converged", lw.converged},
                               {"seconds", now_seconds() - t0}});
    }
  }
  rep["summary"] = {{"max_residual", worst_resid}, {"max_sum_err", worst_sum_err}};
  return rep;
}

json run_embed(const json& P) {
  json rep = base_report("embed", P);
  const Index n = P.value("n", Index(2000)), d = P.value("d", Index(10));
  const double p = P.value("p", 1.5), eps = P.value("eps", 0.25);
  const double delta = P.value("delta", 0.1);
  const Index seeds = P.value("seeds", Index(20));
  const int probes = P.value("probes", 10000), ascent = P.value("ascent", 50);
  const std::uint64_t seed0 = P.value("seed", 1u);
  EmbeddingConfig cfg;
  cfg.C_se = P.value("C_se", cfg.C_se);

  std::vector<double> dists;
  for (Index s = 0; s < seeds; ++s) {
    RngStream rng(seed0 + static_cast<std::uint64_t>(s));
    RngStream arng = rng.substream(1), erng = rng.substream(2), prng = rng.substream(3);
    Matrix A = gaussian_spike(n, d, arng);
    const double t0 = now_seconds();
    EmbeddingResult emb = lp_subspace_embedding(A, p, eps, delta, erng, cfg);
    const double dist = lp_embedding_distortion(A, emb.w, p, probes, ascent, prng);
    dists.push_back(dist);
    rep["trials"].push_back({{"seed", seed0 + static_cast<std::uint64_t>(s)},
                             {"nnz", emb.w.nnz()},
                             {"rounds", emb.rounds},
                             {"ok", emb.ok},
                             {"distortion", dist},
                             {"seconds", now_seconds() - t0}});
  }
  rep["summary"] = {{"median_distortion", median(dists)},
                    {"max_distortion", *std::max_element(dists.begin(), dists.end())},
                    {"target_rows", embedding_target_rows(n, d, p, eps, delta, cfg)}};
  return rep;
}

json run_regress_lp(const json& P) {
  json rep = base_report("regress-lp", P);
  const Index n = P.value("n", Index(20000)), d = P.value("d", Index(10));
  const double p = P.value("p", 1.5), eps = P.value("eps", 0.25);
  const double delta = P.value("delta", 0.2);
  const double frac = P.value("frac", 0.02), mag = P.value("mag", 1e6);
  const Index seeds = P.value("seeds", Index(20));
  const std::uint64_t seed0 = P.value("seed", 1u);
  const bool two_b = P.value("two_b_check", false);

  LpActiveConfig cfg;
  SolverOptions base_opt;
  base_opt.max_iter = 300;
  base_opt.starts = 3;

  ActiveBudget bud = budget(p, d, n, eps, delta, cfg.budget);
  std::vector<double> ratios, queries;
  bool all_within = true, nonadaptive = true;
  for (Index s = 0; s < seeds; ++s) {
    RngStream rng(seed0 + static_cast<std::uint64_t>(s));
    RngStream irng = rng.substream(1);
    Instance inst = gen_instance(
        "gaussian_outlier", {{"n", n}, {"d", d}, {"frac", frac}, {"mag", mag}}, irng);
    const double t0 = now_seconds();
    SolveResult full = solve_weighted_lp(inst.A, inst.b, p, base_opt);

    TargetOracle oracle(inst.b);
    RngStream prng = rng.substream(2);
    SolveResult active = high_prob_relative_lp(inst.A, oracle, p, eps, delta, prng, cfg);
    const double q = static_cast<double>(oracle.count());
    const double ratio = std::pow(full_lp_cost(inst.A, inst.b, active.x, p) /
                                      std::max(full.objective, 1e-300),
                                  1.0 / p);
    all_within = all_within && (oracle.count() <= bud.m);
    ratios.push_back(ratio);
    queries.push_back(q);

    bool same_set = true;
    if (two_b) {
      Vector b2(n);
      RngStream brng = rng.substream(77);
      for (Index i = 0; i < n; ++i) b2[i] = brng.gaussian() * 10.0;
      TargetOracle oracle2(b2);
      RngStream prng2 = rng.substream(2);  // same stream id -> same coins
      (void)high_prob_relative_lp(inst.A, oracle2, p, eps, delta, prng2, cfg);
      same_set = oracle.queried_indices() == oracle2.queried_indices();
      nonadaptive = nonadaptive && same_set;
    }
    rep["trials"].push_back({{"seed", seed0 + static_cast<std::uint64_t>(s)},
                             {"ratio", ratio},
                             {"queries", q},
                             {"within_budget", oracle.count() <= bud.m},
                             {"query_set_b_independent", same_set},
                             {"seconds", now_seconds() - t0}});
  }
  rep["summary"] = {{"median_ratio", median(ratios)},
                    {"p90_ratio", percentile(ratios, 0.9)},
                    {"budget", bud.m},
                    {"max_queries", *std::max_element(queries.begin(), queries.end())},
                    {"all_within_budget", all_within},
                    {"nonadaptive", nonadaptive}};
  return rep;
}

json run_regress_m(const json& P) {
  json rep = base_report("regress-m", P);
  const Index n = P.value("n", Index(5000)), d = P.value("d", Index(5));
  const double eps = P.value("eps", 0.25), delta = P.value("delta", 0.1);
  const double frac = P.value("frac", 0.02), mag = P.value("mag", 1e3);
  const Index seeds = P.value("seeds", Index(20));
  const std::uint64_t seed0 = P.value("seed", 1u);
  const LossDescriptor M = parse_loss(P.value("loss", std::string("huber:1")));

  MActiveConfig cfg;
  std::vector<double> ratios, queries;
  for (Index s = 0; s < seeds; ++s) {
    RngStream rng(seed0 + static_cast<std::uint64_t>(s));
    RngStream irng = rng.substream(1);
    Instance inst = gen_instance(
        "gaussian_outlier", {{"n", n}, {"d", d}, {"frac", frac}, {"mag", mag}}, irng);
    const double t0 = now_seconds();
    SolveResult full = solve_weighted_mloss(inst.A, inst.b, M, cfg.solver);

    TargetOracle oracle(inst.b);
    RngStream prng = rng.substream(2);
    SolveResult active = m_relative_active(inst.A, oracle, M, eps, delta, prng, cfg);
    const double cost = msum(inst.A * active.x - inst.b, M);
    const double ratio =
        std::pow(cost / std::max(full.objective, 1e-300), 1.0 / M.p_M);
    ratios.push_back(ratio);
    queries.push_back(static_cast<double>(oracle.count()));
    rep["trials"].push_back({{"seed", seed0 + static_cast<std::uint64_t>(s)},
                             {"ratio", ratio},
                             {"queries", oracle.count()},
                             {"seconds", now_seconds() - t0}});
  }
  rep["summary"] = {{"median_ratio", median(ratios)},
                    {"frac_below_1_25", static_cast<double>(std::count_if(
                                            ratios.begin(), ratios.end(),
                                            [](double r) { return r <= 1.25; })) /
                                            static_cast<double>(ratios.size())},
                    {"median_queries", median(queries)}};
  return rep;
}

json run_regress_huber(const json& P) {
  json rep = base_report("regress-huber", P);
  const Index n = P.value("n", Index(20000)), d = P.value("d", Index(8));
  const double eps = P.value("eps", 0.25);
  const double frac = P.value("frac", 0.02), mag = P.value("mag", 1e3);
  const Index seeds = P.value("seeds", Index(20));
  const std::uint64_t seed0 = P.value("seed", 1u);

  HuberConfig cfg;
  std::vector<double> ratios, queries;
  for (Index s = 0; s < seeds; ++s) {
    RngStream rng(seed0 + static_cast<std::uint64_t>(s));
    RngStream irng = rng.substream(1);
    Instance inst = gen_instance(
        "gaussian_outlier", {{"n", n}, {"d", d}, {"frac", frac}, {"mag", mag}}, irng);
    const double t0 = now_seconds();
    SolveResult full = solve_weighted_mloss(inst.A, inst.b, huber_loss(cfg.tau), cfg.solver);

    TargetOracle oracle(inst.b);
    RngStream prng = rng.substream(2);
    HuberActiveResult act = huber_active(inst.A, oracle, eps, prng, cfg);
    const double cost = msum(inst.A * act.sol.x - inst.b, huber_loss(cfg.tau));
    const double ratio = std::sqrt(cost / std::max(full.objective, 1e-300));
    ratios.push_back(ratio);
    queries.push_back(static_cast<double>(oracle.count()));
    rep["trials"].push_back({{"seed", seed0 + static_cast<std::uint64_t>(s)},
                             {"ratio", ratio},
                             {"levels", act.levels},
                             {"queries", oracle.count()},
                             {"seconds", now_seconds() - t0}});
  }
  rep["summary"] = {{"median_ratio", median(ratios)},
                    {"frac_below_1_3", static_cast<double>(std::count_if(
                                           ratios.begin(), ratios.end(),
                                           [](double r) { return r <= 1.3; })) /
                                           static_cast<double>(ratios.size())},
                    {"median_queries", median(queries)}};
  return rep;
}

json run_regress_tukey(const json& P) {
  json rep = base_report("regress-tukey", P);
  const Index n = P.value("n", Index(5000)), d = P.value("d", Index(5));
  const double tau = P.value("tau", 1.0), pp = P.value("pp", 2.0);
  const double eps = P.value("eps", 0.25);
  const double frac = P.value("frac", 0.05), mag = P.value("mag", 1e3);
  const Index seeds = P.value("seeds", Index(20));
  const std::uint64_t seed0 = P.value("seed", 1u);
  const LossDescriptor M = tukey_lp_loss(tau, pp);

  MActiveConfig cfg;
  std::vector<double> ratios;
  for (Index s = 0; s < seeds; ++s) {
    RngStream rng(seed0 + static_cast<std::uint64_t>(s));
    RngStream irng = rng.substream(1);
    Instance inst = gen_instance(
        "gaussian_outlier", {{"n", n}, {"d", d}, {"frac", frac}, {"mag", mag}}, irng);
    const double t0 = now_seconds();
    SolveResult full = solve_weighted_mloss(inst.A, inst.b, M, cfg.solver);

    TargetOracle oracle(inst.b);
    RngStream prng = rng.substream(2);
    SolveResult act = tukey_relative_active(inst.A, oracle, tau, pp, eps, prng, cfg);
    const double cost = msum(inst.A * act.x - inst.b, M);
    const double ratio = std::pow(cost / std::max(full.objective, 1e-300), 1.0 / pp);
    ratios.push_back(ratio);
    rep["trials"].push_back({{"seed", seed0 + static_cast<std::uint64_t>(s)},
                             {"ratio", ratio},
                             {"queries", oracle.count()},
                             {"seconds", now_seconds() - t0}});
  }
  rep["summary"] = {{"median_ratio", median(ratios)},
                    {"frac_below_1_3", static_cast<double>(std::count_if(
                                           ratios.begin(), ratios.end(),
                                           [](double r) { return r <= 1.3; })) /
                                           static_cast<double>(ratios.size())}};
  return rep;
}

json run_kron(const json& P) {
  json rep = base_report("kron", P);
  const Index n1 = P.value("n1", Index(64)), d1 = P.value("d1", Index(4));
  const Index n2 = P.value("n2", Index(64)), d2 = P.value("d2", Index(4));
  const double p = P.value("p", 1.5), eps = P.value("eps", 0.3);
  const double delta = P.value("delta", 0.1);
  const Index seeds = P.value("seeds", Index(20));
  const std::uint64_t seed0 = P.value("seed", 1u);
  KronConfig cfg;

  std::vector<double> ratios, queries;
  for (Index s = 0; s < seeds; ++s) {
    RngStream rng(seed0 + static_cast<std::uint64_t>(s));
    RngStream arng = rng.substream(1);
    std::vector<Matrix> factors(2);
    factors[0].resize(n1, d1);
    factors[1].resize(n2, d2);
    for (Matrix& f : factors)
      for (Index i = 0; i < f.rows(); ++i)
        for (Index j = 0; j < f.cols(); ++j) f(i, j) = arng.gaussian();

    Matrix K = kron_materialize(factors);
    Vector x(K.cols());
    for (Index j = 0; j < x.size(); ++j) x[j] = arng.gaussian();
    Vector b = K * x;
    for (Index i = 0; i < b.size(); ++i) b[i] += 0.1 * arng.gaussian();

    const double t0 = now_seconds();
    SolveResult full = solve_weighted_lp(K, b, p);
    TargetOracle oracle(b);
    RngStream prng = rng.substream(2);
    SolveResult act = kron_regress(factors, oracle, p, eps, delta, prng, cfg);
    const double ratio =
        std::pow(full_lp_cost(K, b, act.x, p) / std::max(full.objective, 1e-300), 1.0 / p);
    ratios.push_back(ratio);
    queries.push_back(static_cast<double>(oracle.count()));
    rep["trials"].push_back({{"seed", seed0 + static_cast<std::uint64_t>(s)},
                             {"ratio", ratio},
                             {"queries", oracle.count()},
                             {"seconds", now_seconds() - t0}});
  }
  rep["summary"] = {{"median_ratio", median(ratios)},
                    {"frac_below_1_3", static_cast<double>(std::count_if(
                                           ratios.begin(), ratios.end(),
                                           [](double r) { return r <= 1.3; })) /
                                           static_cast<double>(ratios.size())},
                    {"max_queries", *std::max_element(queries.begin(), queries.end())},
                    {"sample_budget", kron_sample_count(p, d1 * d2, eps, delta, cfg)}};
  return rep;
}

json run_orlicz(const json& P) {
  json rep = base_report("orlicz", P);
  const Index n = P.value("n", Index(2000)), d = P.value("d", Index(8));
  const double eps = P.value("eps", 0.25);
  const Index seeds = P.value("seeds", Index(5));
  const int probes = P.value("probes", 2000);
  const std::uint64_t seed0 = P.value("seed", 1u);

  // smooth convex non-power gauge: quadratic near zero, linear in the tail
  LossDescriptor G;
  G.name = "gauge";
  G.eval = [](double x) { return x * x / (1.0 + x); };
  G.deriv = [](double x) { return (x * x + 2.0 * x) / ((1.0 + x) * (1.0 + x)); };
  G.p_M = 2.0;
  G.c_U = 2.0;
  G.q_M = 1.0;
  G.convex = true;

  OrliczConfig cfg;
  std::vector<double> dists;
  for (Index s = 0; s < seeds; ++s) {
    RngStream rng(seed0 + static_cast<std::uint64_t>(s));
    RngStream arng = rng.substream(1), erng = rng.substream(2), prng = rng.substream(3);
    Matrix A = gaussian_spike(n, d, arng);
    const double t0 = now_seconds();
    WeightVector w = orlicz_subspace_embedding(A, G, eps, erng, cfg);
    double worst = 0;
    for (int t = 0; t < probes; ++t) {
      Vector x(d);
      for (Index j = 0; j < d; ++j) x[j] = prng.gaussian();
      Vector Ax = A * x;
      const double ref = orlicz_norm(Ax, G);
      if (ref <= 0) continue;
      const double sub = orlicz_norm(Ax, G, w, 1e-10);
      worst = std::max(worst, std::abs(sub / ref - 1.0));
    }
    dists.push_back(worst);
    rep["trials"].push_back({{"seed", seed0 + static_cast<std::uint64_t>(s)},
                             {"nnz", w.nnz()},
                             {"distortion", worst},
                             {"seconds", now_seconds() - t0}});
  }
  rep["summary"] = {{"max_distortion", *std::max_element(dists.begin(), dists.end())}};
  return rep;
}

json run_sens(const json& P) {
  json rep = base_report("sens", P);
  const LossDescriptor M = parse_loss(P.value("loss", std::string("huber:1")));
  const std::string kind = P.value("kind", std::string("gaussian"));
  const Index n = P.value("n", Index(1024)), d = P.value("d", Index(6));
  const double tau = P.value("tau", 16.0);
  const Index seeds = P.value("seeds", Index(3));
  const bool single_hash = P.value("single_hash", false);
  const std::uint64_t seed0 = P.value("seed", 1u);

  SensitivityConfig cfg;
  if (single_hash) cfg.c_rep = 0;

  for (Index s = 0; s < seeds; ++s) {
    RngStream rng(seed0 + static_cast<std::uint64_t>(s));
    RngStream irng = rng.substream(1), srng = rng.substream(2);
    json ip = P.value("instance_params", json::object());
    ip["n"] = n;
    ip["d"] = d;
    Instance inst = gen_instance(kind, ip, irng);
    const double tau_eff = std::min(tau, static_cast<double>(inst.A.rows()));
    const double t0 = now_seconds();
    SensitivityEstimates est = m_sensitivities(inst.A, M, tau_eff, srng, cfg);
    const double lgn = std::log2(std::max<double>(2, inst.A.rows()));
    const double bound =
        std::pow(static_cast<double>(inst.A.cols()), std::max(1.0, M.p_M / 2)) * lgn * lgn +
        tau_eff;
    rep["trials"].push_back({{"seed", seed0 + static_cast<std::uint64_t>(s)},
                             {"n", inst.A.rows()},
                             {"total", est.total},
                             {"bound_unit", bound},
                             {"ratio_to_bound", est.total / bound},
                             {"seconds", now_seconds() - t0}});
  }
  double worst = 0;
  for (const auto& t : rep["trials"]) worst = std::max(worst, t["ratio_to_bound"].get<double>());
  rep["summary"] = {{"max_ratio_to_bound", worst}};
  return rep;
}

json run_hardness(const json& P) {
  json rep = base_report("hardness", P);
  const std::string kind = P.value("kind", std::string("delta"));
  const std::uint64_t seed0 = P.value("seed", 1u);

  if (kind == "bernoulli") {
    const double eps = P.value("eps", 0.1);
    const Index trials = P.value("trials", Index(200));
    Index correct = 0;
    for (Index t = 0; t < trials; ++t) {
      RngStream rng(seed0 + static_cast<std::uint64_t>(t));
      const int sign = rng.bernoulli(0.5) ? +1 : -1;
      RngStream irng = rng.substream(1);
      Instance inst = gen_instance("bernoulli", {{"eps", eps}, {"sign", sign}}, irng);
      // a (1+eps)-accurate solution lands on the majority endpoint
      SolveResult opt =
          brute_force_1d(inst.A.col(0), inst.b, lp_loss(0.5), WeightVector::ones(inst.b.size()));
      const int guess = opt.x[0] >= 0.5 ? +1 : -1;
      if (guess == sign) ++correct;
    }
    rep["summary"] = {{"trials", trials},
                      {"sign_accuracy", static_cast<double>(correct) / trials}};
    return rep;
  }

  // delta instance: naive sample-and-solve vs the boosted pipeline shape at
  // an equal query budget
  const double delta = P.value("delta", 0.05);
  const double p = P.value("p", 2.0);
  const Index trials = P.value("trials", Index(400));
  const Index B = P.value("budget", static_cast<Index>(std::ceil(0.5 / delta)));
  const Index n = P.value("n", static_cast<Index>(std::ceil(static_cast<double>(B) / delta)));
  const Index ell = P.value("ell", Index(6));
  const Index m_trial = std::max<Index>(2, B / ell);

  Index naive_fail = 0, boosted_fail = 0;
  double naive_q = 0, boosted_q = 0;
  for (Index t = 0; t < trials; ++t) {
    RngStream rng(seed0 + static_cast<std::uint64_t>(t));
    RngStream irng = rng.substream(1);
    Instance inst = gen_instance("delta", {{"n", n}}, irng);
    SolveResult opt = brute_force_1d(inst.A.col(0), inst.b, lp_loss(p),
                                     WeightVector::ones(n));
    const double OPT = std::max(opt.objective, 1e-300);

    // naive: uniform rows, uniform reweighting, single solve
    {
      TargetOracle oracle(inst.b);
      RngStream nrng = rng.substream(2);
      std::set<Index> picked;
      while (static_cast<Index>(picked.size()) < B) picked.insert(nrng.uniform_index(n));
      double sum = 0;
      for (Index i : picked) sum += oracle(i);
      double x = 0;
      if (p == 2.0) {
        x = sum / static_cast<double>(B);
      } else {
        Matrix As = Matrix::Ones(B, 1);
        Vector bs(B);
        Index j = 0;
        for (Index i : picked) bs[j++] = inst.b[i];
        x = solve_weighted_lp(As, bs, p).x[0];
      }
      const double cost = full_lp_cost(inst.A, inst.b, Vector::Constant(1, x), p);
      if (cost > 2.0 * OPT) ++naive_fail;
      naive_q += static_cast<double>(oracle.count());
    }

    // boosted: independent subsampled solves, ranked by own-sample residual
    // against a boosted pilot, worst tenth dropped, then boosted again
    {
      TargetOracle oracle(inst.b);
      LpActiveConfig cfg;
      std::vector<RecursiveLpResult> runs;
      for (Index e = 0; e < ell; ++e) {
        RngStream trng = rng.substream(100 + static_cast<std::uint64_t>(e));
        runs.push_back(recursive_relative_lp(inst.A, oracle, p, m_trial, trng, cfg));
      }
      std::vector<Vector> cands;
      for (const auto& r : runs) cands.push_back(r.sol.x);
      Vector xc = boost_candidates(cands, inst.A, lp_loss(p), 1.0).x;
      std::vector<std::pair<double, Index>> ranked;
      for (Index e = 0; e < ell; ++e) {
        double score = 0;
        for (size_t j = 0; j < runs[static_cast<size_t>(e)].sample_rows.size(); ++j) {
          const Index i = runs[static_cast<size_t>(e)].sample_rows[j];
          score += runs[static_cast<size_t>(e)].sample_weights[static_cast<Index>(j)] *
                   pow_abs(oracle(i) - xc[0], p);
        }
        ranked.push_back({score, e});
      }
      std::stable_sort(ranked.begin(), ranked.end());
      const Index keep = std::max<Index>(1, ell - ell / 10);
      std::vector<Vector> finalists;
      for (Index k = 0; k < keep; ++k)
        finalists.push_back(runs[static_cast<size_t>(ranked[static_cast<size_t>(k)].second)].sol.x);
      Vector xb = boost_candidates(finalists, inst.A, lp_loss(p), 1.0).x;
      const double cost = full_lp_cost(inst.A, inst.b, xb, p);
      if (cost > 2.0 * OPT) ++boosted_fail;
      boosted_q += static_cast<double>(oracle.count());
    }
  }
  rep["summary"] = {{"n", n},
                    {"budget", B},
                    {"trials", trials},
                    {"naive_fail_freq", static_cast<double>(naive_fail) / trials},
                    {"boosted_fail_freq", static_cast<double>(boosted_fail) / trials},
                    {"naive_mean_queries", naive_q / trials},
                    {"boosted_mean_queries", boosted_q / trials}};
  return rep;
}

}  // namespace

json run_experiment(const std::string& name, const json& params) {
  if (name == "lewis") return run_lewis(params);
  if (name == "embed") return run_embed(params);
  if (name == "regress-lp") return run_regress_lp(params);
  if (name == "regress-m") return run_regress_m(params);
  if (name == "regress-huber") return run_regress_huber(params);
  if (name == "regress-tukey") return run_regress_tukey(params);
  if (name == "kron") return run_kron(params);
  if (name == "orlicz") return run_orlicz(params);
  if (name == "sens") return run_sens(params);
  if (name == "hardness") return run_hardness(params);
  throw std::invalid_argument("run_experiment: unknown experiment '" + name + "'");
}

void write_report(const std::string& path, const json& report) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw Error(path + ": cannot open for writing");
  os << report.dump(2) << '\n';
}

void write_report_csv(const std::string& path, const json& report) {
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw Error(path + ": cannot open for writing");
  const auto& trials = report.at("trials");
  if (trials.empty()) return;
  std::vector<std::string> cols;
  for (auto it = trials[0].begin(); it != trials[0].end(); ++it) cols.push_back(it.key());
  for (size_t c = 0; c < cols.size(); ++c) os << (c ? "," : "") << cols[c];
  os << '\n';
  for (const auto& t : trials) {
    for (size_t c = 0; c < cols.size(); ++c) {
      if (c) os << ',';
      if (t.contains(cols[c])) os << t[cols[c]].dump();
    }
    os << '\n';
  }
}

}  // namespace alsq
