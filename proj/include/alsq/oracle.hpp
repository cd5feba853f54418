#pragma once

#include <functional>
#include <mutex>
#include <unordered_set>

#include "alsq/types.hpp"

namespace alsq {

/// Entry access to the target vector b with a linearizable distinct-query
/// counter. Reading a fresh index increments the count; re-reads are free.
class TargetOracle {
 public:
  explicit TargetOracle(Vector b);
  /// Generator-backed oracle for targets too large to materialize.
  TargetOracle(Index n, std::function<double(Index)> gen);

  Index n() const { return n_; }

  double operator()(Index i) const;

  Index count() const;
  bool was_queried(Index i) const;
  std::vector<Index> queried_indices() const;  // sorted ascending

  void reset_counter();

 private:
  Index n_ = 0;
  Vector values_;
  std::function<double(Index)> gen_;
  mutable std::mutex mu_;
  mutable std::unordered_set<Index> queried_;
};

}  // namespace alsq
