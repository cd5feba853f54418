#pragma once

#include <cmath>
#include <cstdint>

#include "alsq/types.hpp"

namespace alsq {

/// Counter-free seeded random stream. Identical (seed, stream-id) reproduces
/// identical draws on any platform; substreams are independent.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0);

  RngStream substream(std::uint64_t id) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  std::uint64_t next_u64();
  double uniform();                 // [0, 1)
  double gaussian();                // standard normal
  bool bernoulli(double p);         // true w.p. p
  Index uniform_index(Index n);     // {0, ..., n-1}

 private:
  std::uint64_t seed_ = 0;
  std::uint64_t stream_ = 0;
  std::uint64_t state_ = 0;
  std::uint64_t inc_ = 0;
  double spare_gauss_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace alsq
