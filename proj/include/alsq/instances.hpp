#pragma once

#include <json.hpp>

#include "alsq/rng.hpp"
#include "alsq/types.hpp"

namespace alsq {

struct Instance {
  Matrix A;
  Vector b;
  nlohmann::json meta;
};

/// Deterministic instance generators, including the hard instances used as
/// test fixtures:
///   bernoulli       {eps, sign}            all-ones column, biased coin labels
///   delta           {n}                    all-ones column, b = e_I
///   coding          {d, count, C}          near-orthogonal +-1 rows, b = d e_I
///   spiked_tukey    {levels, tau, copies}  2^i coordinates of value tau/2^i
///   gaussian        {n, d}
///   dup_rows        {n, d, dups}           gaussian with heavily repeated rows
///   gaussian_outlier{n, d, frac, mag}      b = A x* + sparse large noise
Instance gen_instance(const std::string& kind, const nlohmann::json& params, RngStream& rng);

}  // namespace alsq
