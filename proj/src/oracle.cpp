#include "alsq/oracle.hpp"

#include <algorithm>

namespace alsq {

TargetOracle::TargetOracle(Vector b) : n_(b.size()), values_(std::move(b)) {
  check_finite(values_, "TargetOracle");
}

TargetOracle::TargetOracle(Index n, std::function<double(Index)> gen)
    : n_(n), gen_(std::move(gen)) {
  require(n > 0, "TargetOracle: n must be positive");
  require(static_cast<bool>(gen_), "TargetOracle: null generator");
}

double TargetOracle::operator()(Index i) const {
  if (i < 0 || i >= n_) throw std::out_of_range("TargetOracle: index out of range");
  {
    std::lock_guard<std::mutex> lock(mu_);
    queried_.insert(i);
  }
  return gen_ ? gen_(i) : values_[i];
}

Index TargetOracle::count() const {
  std::lock_guard<std::mutex> lock(mu_);
  return static_cast<Index>(queried_.size());
}

bool TargetOracle::was_queried(Index i) const {
  std::lock_guard<std::mutex> lock(mu_);
  return queried_.count(i) > 0;
}

std::vector<Index> TargetOracle::queried_indices() const {
  std::vector<Index> out;
  {
    std::lock_guard<std::mutex> lock(mu_);
    out.assign(queried_.begin(), queried_.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

void TargetOracle::reset_counter() {
  std::lock_guard<std::mutex> lock(mu_);
  queried_.clear();
}

}  // namespace alsq
