#pragma once

#include <json.hpp>

#include <functional>
#include <string>

#include "alsq/losses.hpp"
#include "alsq/rng.hpp"
#include "alsq/types.hpp"

namespace alsq {

/// "name:p1,p2" -> catalog descriptor, e.g. "huber:1" or "tukey_lp:1,2".
LossDescriptor parse_loss(const std::string& spec);

/// Max lp distortion |(sum w|a_i x|^p)^{1/p} / ||Ax||_p - 1| over random
/// directions plus hill-climb refinements of the worst ones.
double lp_embedding_distortion(const Matrix& A, const WeightVector& w, double p,
                               int n_random, int n_ascent, RngStream& rng);

/// Same for the weighted Huber norm, probed at dyadic radii.
double huber_embedding_distortion(const Matrix& A, const WeightVector& w_ref,
                                  const WeightVector& w_new, double tau, int n_random,
                                  int radii, RngStream& rng);

double median(std::vector<double> v);
double percentile(std::vector<double> v, double q);  // q in [0,1]

/// |x|^p with fast paths for the common exponents.
double pow_abs(double x, double p);

Index env_thread_cap();  // ALS_THREADS, else hardware concurrency
void parallel_for(Index n, const std::function<void(Index)>& fn);

/// Experiment drivers behind the CLI. Each consumes a parameter object and
/// returns a versioned JSON report that fully determines a re-run.
nlohmann::json run_experiment(const std::string& name, const nlohmann::json& params);

void write_report(const std::string& path, const nlohmann::json& report);
void write_report_csv(const std::string& path, const nlohmann::json& report);

}  // namespace alsq
