#include "alsq/instances.hpp"

#include <cmath>

namespace alsq {

namespace {

using nlohmann::json;

Instance gen_bernoulli(const json& p, RngStream& rng) {
  const double eps = p.value("eps", 0.1);
  const int sign = p.value("sign", +1);
  require(eps > 0 && eps < 0.5, "bernoulli: eps must be in (0, 1/2)");
  const Index n = 100 * static_cast<Index>(std::ceil(1.0 / (eps * eps)));
  Instance inst;
  inst.A = Matrix::Ones(n, 1);
  inst.b.resize(n);
  const double bias = 0.5 + sign * eps;
  for (Index i = 0; i < n; ++i) inst.b[i] = rng.bernoulli(bias) ? 1.0 : 0.0;
  inst.meta = {{"kind", "bernoulli"}, {"n", n}, {"eps", eps}, {"sign", sign}};
  return inst;
}

Instance gen_delta(const json& p, RngStream& rng) {
  const Index n = p.value("n", Index(1000));
  require(n >= 2, "delta: n must be >= 2");
  Instance inst;
  inst.A = Matrix::Ones(n, 1);
  inst.b = Vector::Zero(n);
  const Index I = rng.uniform_index(n);
  inst.b[I] = 1.0;
  inst.meta = {{"kind", "delta"}, {"n", n}, {"hot_index", I}};
  return inst;
}

Instance gen_coding(const json& p, RngStream& rng) {
  const Index d = p.value("d", Index(31));
  const Index count = p.value("count", Index(100));
  const double C = p.value("C", 6.0);
  require(d >= 2, "coding: d must be >= 2");
  const double cap = C * std::sqrt(static_cast<double>(d));

  std::vector<Vector> rows;
  Index tries = 0;
  const Index max_tries = 1000000;
  while (static_cast<Index>(rows.size()) < count) {
    if (++tries > max_tries)
      throw Error("coding: rejection budget exhausted; request a smaller count for this d");
    Vector v(d);
    for (Index j = 0; j < d; ++j) v[j] = rng.bernoulli(0.5) ? 1.0 : -1.0;
    bool ok = true;
    for (const Vector& u : rows)
      if (std::abs(u.dot(v)) > cap) {
        ok = false;
        break;
      }
    if (ok) rows.push_back(std::move(v));
  }

  Instance inst;
  inst.A.resize(count, d);
  double max_ip = 0.0;
  for (Index i = 0; i < count; ++i) inst.A.row(i) = rows[static_cast<size_t>(i)];
  for (Index i = 0; i < count; ++i)
    for (Index j = i + 1; j < count; ++j)
      max_ip = std::max(max_ip, std::abs(inst.A.row(i).dot(inst.A.row(j))));
  inst.b = Vector::Zero(count);
  const Index I = rng.uniform_index(count);
  inst.b[I] = static_cast<double>(d);
  inst.meta = {{"kind", "coding"},      {"d", d},           {"count", count},
               {"bound", cap},          {"max_inner", max_ip}, {"hot_index", I},
               {"tries", tries}};
  return inst;
}

Instance gen_spiked_tukey(const json& p, RngStream& rng) {
  (void)rng;  // deterministic by construction
  const int levels = p.value("levels", 10);
  const double tau = p.value("tau", 1.0);
  const Index copies = p.value("copies", Index(1));
  require(levels >= 1 && copies >= 1, "spiked_tukey: levels and copies must be >= 1");

  const Index per_copy = (Index(1) << (levels + 1)) - 2;  // sum of 2^i, i = 1..levels
  const Index n = per_copy * copies;
  Instance inst;
  inst.A = Matrix::Zero(n, copies);
  Index r = 0;
  for (Index c = 0; c < copies; ++c)
    for (int i = 1; i <= levels; ++i) {
      const double v = tau / std::pow(2.0, i);
      for (Index k = 0; k < (Index(1) << i); ++k) inst.A(r++, c) = v;
    }
  inst.b = Vector::Zero(n);
  inst.meta = {{"kind", "spiked_tukey"}, {"n", n}, {"levels", levels},
               {"tau", tau},             {"copies", copies}};
  return inst;
}

Instance gen_gaussian(const json& p, RngStream& rng) {
  const Index n = p.value("n", Index(1000));
  const Index d = p.value("d", Index(10));
  Instance inst;
  inst.A.resize(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < d; ++j) inst.A(i, j) = rng.gaussian();
  Vector x(d);
  for (Index j = 0; j < d; ++j) x[j] = rng.gaussian();
  inst.b = inst.A * x;
  for (Index i = 0; i < n; ++i) inst.b[i] += 0.1 * rng.gaussian();
  inst.meta = {{"kind", "gaussian"}, {"n", n}, {"d", d}};
  return inst;
}

Instance gen_dup_rows(const json& p, RngStream& rng) {
  const Index n = p.value("n", Index(1000));
  const Index d = p.value("d", Index(10));
  const Index dups = p.value("dups", n / 4);
  require(dups < n, "dup_rows: dups must be < n");
  Instance inst = gen_gaussian({{"n", n - dups}, {"d", d}}, rng);
  Matrix A(n, d);
  A.topRows(n - dups) = inst.A;
  for (Index i = 0; i < dups; ++i) A.row(n - dups + i) = inst.A.row(rng.uniform_index(std::min<Index>(8, n - dups)));
  inst.A = A;
  Vector x(d);
  for (Index j = 0; j < d; ++j) x[j] = rng.gaussian();
  inst.b = inst.A * x;
  inst.meta = {{"kind", "dup_rows"}, {"n", n}, {"d", d}, {"dups", dups}};
  return inst;
}

Instance gen_gaussian_outlier(const json& p, RngStream& rng) {
  const Index n = p.value("n", Index(1000));
  const Index d = p.value("d", Index(10));
  const double frac = p.value("frac", 0.02);
  const double mag = p.value("mag", 100.0);
  require(frac >= 0 && frac < 1, "gaussian_outlier: frac must be in [0,1)");
  Instance inst;
  inst.A.resize(n, d);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < d; ++j) inst.A(i, j) = rng.gaussian();
  Vector x(d);
  for (Index j = 0; j < d; ++j) x[j] = rng.gaussian();
  inst.b = inst.A * x;
  Index hit = 0;
  for (Index i = 0; i < n; ++i) {
    inst.b[i] += 0.1 * rng.gaussian();
    if (rng.bernoulli(frac)) {
      inst.b[i] += (rng.bernoulli(0.5) ? 1.0 : -1.0) * mag * (1.0 + rng.uniform());
      ++hit;
    }
  }
  std::vector<double> xs(x.data(), x.data() + d);
  inst.meta = {{"kind", "gaussian_outlier"}, {"n", n},     {"d", d},
               {"frac", frac},               {"mag", mag}, {"outliers", hit},
               {"x_star", xs}};
  return inst;
}

}  // namespace

Instance gen_instance(const std::string& kind, const nlohmann::json& params, RngStream& rng) {
  const json p = params.is_object() ? params : json::object();
  return [&]() -> Instance {
    if (kind == "bernoulli") return gen_bernoulli(p, rng);
    if (kind == "delta") return gen_delta(p, rng);
    if (kind == "coding") return gen_coding(p, rng);
    if (kind == "spiked_tukey") return gen_spiked_tukey(p, rng);
    if (kind == "gaussian") return gen_gaussian(p, rng);
    if (kind == "dup_rows") return gen_dup_rows(p, rng);
    if (kind == "gaussian_outlier") return gen_gaussian_outlier(p, rng);
    throw std::invalid_argument("gen_instance: unknown kind '" + kind + "'");
  }();
}


}  // namespace alsq
