#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace alsq {

using Index = std::int64_t;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Sparse nonnegative per-row weights; an absent entry is 0.
/// Stored weights are strictly positive and finite.
class WeightVector {
 public:
  WeightVector() = default;
  explicit WeightVector(Index n) : n_(n) {}

  static WeightVector ones(Index n) {
    WeightVector w(n);
    w.entries_.reserve(static_cast<size_t>(n));
    for (Index i = 0; i < n; ++i) w.entries_.emplace_back(i, 1.0);
    return w;
  }

  Index n() const { return n_; }
  Index nnz() const { return static_cast<Index>(entries_.size()); }

  double operator()(Index i) const {
    auto it = find(i);
    return it == entries_.end() ? 0.0 : it->second;
  }

  void set(Index i, double w) {
    if (i < 0 || i >= n_) throw std::invalid_argument("WeightVector::set: index out of range");
    if (!(w > 0.0) || !std::isfinite(w))
      throw std::invalid_argument("WeightVector::set: weight must be positive and finite");
    auto it = lower_bound(i);
    if (it != entries_.end() && it->first == i)
      it->second = w;
    else
      entries_.insert(it, {i, w});
  }

  void erase(Index i) {
    auto it = lower_bound(i);
    if (it != entries_.end() && it->first == i) entries_.erase(it);
  }

  // sorted by row index
  const std::vector<std::pair<Index, double>>& entries() const { return entries_; }

  double max_weight() const {
    double m = 0.0;
    for (const auto& [i, w] : entries_) m = std::max(m, w);
    return m;
  }

  double min_weight() const {
    if (entries_.empty()) return 0.0;
    double m = entries_.front().second;
    for (const auto& [i, w] : entries_) m = std::min(m, w);
    return m;
  }

  double sum() const {
    double s = 0.0;
    for (const auto& [i, w] : entries_) s += w;
    return s;
  }

  std::vector<Index> support() const {
    std::vector<Index> idx;
    idx.reserve(entries_.size());
    for (const auto& [i, w] : entries_) idx.push_back(i);
    return idx;
  }

 private:
  using Entry = std::pair<Index, double>;

  std::vector<Entry>::const_iterator find(Index i) const {
    auto it = lower_bound(i);
    if (it != entries_.end() && it->first == i) return it;
    return entries_.end();
  }
  std::vector<Entry>::const_iterator lower_bound(Index i) const {
    return std::lower_bound(entries_.begin(), entries_.end(), i,
                            [](const Entry& e, Index k) { return e.first < k; });
  }
  std::vector<Entry>::iterator lower_bound(Index i) {
    return std::lower_bound(entries_.begin(), entries_.end(), i,
                            [](const Entry& e, Index k) { return e.first < k; });
  }

  Index n_ = 0;
  std::vector<Entry> entries_;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

inline void check_finite(const Matrix& a, const std::string& what) {
  if (!a.allFinite()) throw Error(what + ": non-finite entry");
}

inline void check_finite(const Vector& v, const std::string& what) {
  if (!v.allFinite()) throw Error(what + ": non-finite entry");
}

}  // namespace alsq
