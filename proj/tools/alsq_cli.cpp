// Experiment CLI: each subcommand runs one pipeline across seeds and writes a
// JSON report (optionally CSV) that fully determines a re-run.

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>

#include "alsq/experiments.hpp"
#include "alsq/instances.hpp"
#include "alsq/io.hpp"

using nlohmann::json;

namespace {

struct CommonOpts {
  std::string out;
  std::string csv;
  std::uint64_t seed = 1;
  alsq::Index seeds = 20;
};

void add_common(CLI::App* cmd, CommonOpts& c) {
  cmd->add_option("-o,--out", c.out, "write the JSON report here (default: stdout)");
  cmd->add_option("--csv", c.csv, "also write per-trial rows as CSV");
  cmd->add_option("--seed", c.seed, "base seed");
  cmd->add_option("--seeds", c.seeds, "number of seeds");
}

int emit(const std::string& name, json params, const CommonOpts& c) {
  params["seed"] = c.seed;
  params["seeds"] = c.seeds;
  json rep = alsq::run_experiment(name, params);
  if (c.out.empty())
    std::cout << rep.dump(2) << std::endl;
  else
    alsq::write_report(c.out, rep);
  if (!c.csv.empty()) alsq::write_report_csv(c.csv, rep);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"active lp / M-estimator regression and row-sampling experiments"};
  app.require_subcommand(1);

  // lewis
  CommonOpts lw_c;
  alsq::Index lw_n = 500, lw_d = 20;
  std::vector<double> lw_p = {0.5, 1, 1.5, 2, 3};
  double lw_tol = 1e-9;
  auto* lw = app.add_subcommand("lewis", "Lewis weight fixed point on random instances");
  lw->add_option("--n", lw_n);
  lw->add_option("--d", lw_d);
  lw->add_option("--p", lw_p, "exponents");
  lw->add_option("--tol", lw_tol);
  add_common(lw, lw_c);

  // embed
  CommonOpts em_c;
  alsq::Index em_n = 2000, em_d = 10;
  double em_p = 1.5, em_eps = 0.25;
  auto* em = app.add_subcommand("embed", "lp subspace embedding distortion probe");
  em->add_option("--n", em_n);
  em->add_option("--d", em_d);
  em->add_option("--p", em_p);
  em->add_option("--eps", em_eps);
  add_common(em, em_c);

  // regress-lp
  CommonOpts rl_c;
  alsq::Index rl_n = 20000, rl_d = 10;
  double rl_p = 1.5, rl_eps = 0.25, rl_delta = 0.2, rl_frac = 0.02, rl_mag = 1e6;
  auto* rl = app.add_subcommand("regress-lp", "active lp regression vs full solve");
  rl->add_option("--n", rl_n);
  rl->add_option("--d", rl_d);
  rl->add_option("--p", rl_p);
  rl->add_option("--eps", rl_eps);
  rl->add_option("--delta", rl_delta);
  rl->add_option("--frac", rl_frac, "outlier fraction");
  rl->add_option("--mag", rl_mag, "outlier magnitude");
  add_common(rl, rl_c);

  // regress-m
  CommonOpts rm_c;
  alsq::Index rm_n = 5000, rm_d = 5;
  double rm_eps = 0.25, rm_delta = 0.1;
  std::string rm_loss = "huber:1";
  auto* rm = app.add_subcommand("regress-m", "active M-estimator regression");
  rm->add_option("--n", rm_n);
  rm->add_option("--d", rm_d);
  rm->add_option("--eps", rm_eps);
  rm->add_option("--delta", rm_delta);
  rm->add_option("--loss", rm_loss, "catalog loss, e.g. huber:1 or l2lq:0.5");
  add_common(rm, rm_c);

  // regress-huber
  CommonOpts rh_c;
  alsq::Index rh_n = 20000, rh_d = 8;
  double rh_eps = 0.25;
  auto* rh = app.add_subcommand("regress-huber", "recursive active Huber regression");
  rh->add_option("--n", rh_n);
  rh->add_option("--d", rh_d);
  rh->add_option("--eps", rh_eps);
  add_common(rh, rh_c);

  // regress-tukey
  CommonOpts rt_c;
  alsq::Index rt_n = 5000, rt_d = 5;
  double rt_tau = 1.0, rt_pp = 2.0, rt_eps = 0.25;
  auto* rt = app.add_subcommand("regress-tukey", "active lp-Tukey regression");
  rt->add_option("--n", rt_n);
  rt->add_option("--d", rt_d);
  rt->add_option("--tau", rt_tau);
  rt->add_option("--pp", rt_pp, "Tukey exponent");
  rt->add_option("--eps", rt_eps);
  add_common(rt, rt_c);

  // kron
  CommonOpts kr_c;
  alsq::Index kr_n1 = 64, kr_d1 = 4, kr_n2 = 64, kr_d2 = 4;
  double kr_p = 1.5, kr_eps = 0.3;
  auto* kr = app.add_subcommand("kron", "sublinear Kronecker lp regression");
  kr->add_option("--n1", kr_n1);
  kr->add_option("--d1", kr_d1);
  kr->add_option("--n2", kr_n2);
  kr->add_option("--d2", kr_d2);
  kr->add_option("--p", kr_p);
  kr->add_option("--eps", kr_eps);
  add_common(kr, kr_c);

  // orlicz
  CommonOpts or_c;
  alsq::Index or_n = 2000, or_d = 8;
  double or_eps = 0.25;
  auto* orc = app.add_subcommand("orlicz", "Orlicz norm embedding distortion");
  orc->add_option("--n", or_n);
  orc->add_option("--d", or_d);
  orc->add_option("--eps", or_eps);
  add_common(orc, or_c);

  // sens
  CommonOpts sn_c;
  std::string sn_loss = "huber:1", sn_kind = "gaussian";
  alsq::Index sn_n = 1024, sn_d = 6;
  double sn_tau = 16;
  bool sn_single = false;
  auto* sn = app.add_subcommand("sens", "sensitivity upper-bound sums");
  sn->add_option("--loss", sn_loss);
  sn->add_option("--kind", sn_kind, "instance kind");
  sn->add_option("--n", sn_n);
  sn->add_option("--d", sn_d);
  sn->add_option("--tau", sn_tau);
  sn->add_flag("--single-hash", sn_single, "single-hash variant");
  add_common(sn, sn_c);

  // hardness
  CommonOpts hd_c;
  std::string hd_kind = "delta";
  double hd_delta = 0.05, hd_p = 2.0, hd_eps = 0.1;
  alsq::Index hd_trials = 400;
  auto* hd = app.add_subcommand("hardness", "lower-bound instance demos");
  hd->add_option("--kind", hd_kind, "delta | bernoulli");
  hd->add_option("--delta", hd_delta);
  hd->add_option("--p", hd_p);
  hd->add_option("--eps", hd_eps);
  hd->add_option("--trials", hd_trials);
  add_common(hd, hd_c);

  // gen: write an instance to disk
  std::string g_kind = "gaussian", g_amat = "A.alsm", g_bvec = "b.alsm", g_params = "{}";
  std::uint64_t g_seed = 1;
  bool g_csv = false;
  auto* gen = app.add_subcommand("gen", "generate an instance and write A and b");
  gen->add_option("--kind", g_kind);
  gen->add_option("--params", g_params, "JSON parameter object");
  gen->add_option("--A", g_amat);
  gen->add_option("--b", g_bvec);
  gen->add_option("--seed", g_seed);
  gen->add_flag("--as-csv", g_csv);

  CLI11_PARSE(app, argc, argv);

  try {
    if (lw->parsed())
      return emit("lewis", {{"n", lw_n}, {"d", lw_d}, {"p", lw_p}, {"tol", lw_tol}}, lw_c);
    if (em->parsed())
      return emit("embed", {{"n", em_n}, {"d", em_d}, {"p", em_p}, {"eps", em_eps}}, em_c);
    if (rl->parsed())
      return emit("regress-lp",
                  {{"n", rl_n}, {"d", rl_d}, {"p", rl_p}, {"eps", rl_eps},
                   {"delta", rl_delta}, {"frac", rl_frac}, {"mag", rl_mag}},
                  rl_c);
    if (rm->parsed())
      return emit("regress-m",
                  {{"n", rm_n}, {"d", rm_d}, {"eps", rm_eps}, {"delta", rm_delta},
                   {"loss", rm_loss}},
                  rm_c);
    if (rh->parsed())
      return emit("regress-huber", {{"n", rh_n}, {"d", rh_d}, {"eps", rh_eps}}, rh_c);
    if (rt->parsed())
      return emit("regress-tukey",
                  {{"n", rt_n}, {"d", rt_d}, {"tau", rt_tau}, {"pp", rt_pp}, {"eps", rt_eps}},
                  rt_c);
    if (kr->parsed())
      return emit("kron",
                  {{"n1", kr_n1}, {"d1", kr_d1}, {"n2", kr_n2}, {"d2", kr_d2},
                   {"p", kr_p}, {"eps", kr_eps}},
                  kr_c);
    if (orc->parsed())
      return emit("orlicz", {{"n", or_n}, {"d", or_d}, {"eps", or_eps}}, or_c);
    if (sn->parsed())
      return emit("sens",
                  {{"loss", sn_loss}, {"kind", sn_kind}, {"n", sn_n}, {"d", sn_d},
                   {"tau", sn_tau}, {"single_hash", sn_single}},
                  sn_c);
    if (hd->parsed())
      return emit("hardness",
                  {{"kind", hd_kind}, {"delta", hd_delta}, {"p", hd_p},
                   {"eps", hd_eps}, {"trials", hd_trials}},
                  hd_c);
    if (gen->parsed()) {
      alsq::RngStream rng(g_seed);
      alsq::Instance inst = alsq::gen_instance(g_kind, json::parse(g_params), rng);
      const auto fmt = g_csv ? alsq::MatrixFormat::Csv : alsq::MatrixFormat::Binary;
      alsq::write_matrix(g_amat, inst.A, fmt);
      alsq::write_vector(g_bvec, inst.b, fmt);
      std::cout << inst.meta.dump(2) << std::endl;
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}
