#include "alsq/rng.hpp"

namespace alsq {

namespace {

std::uint64_t splitmix64(std::uint64_t& s) {
  s += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = s;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = a ^ (b * 0x9e3779b97f4a7c15ull + 0x2545f4914f6cdd1dull);
  std::uint64_t z = splitmix64(s);
  return splitmix64(s) ^ z;
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream) {
  state_ = mix(seed, stream);
  inc_ = mix(stream ^ 0xda3e39cb94b95bdbull, seed) | 1ull;  // odd increment
  // burn-in decorrelates nearby (seed, stream) pairs
  for (int i = 0; i < 4; ++i) next_u64();
}

RngStream RngStream::substream(std::uint64_t id) const {
  return RngStream(seed_, mix(stream_, id ^ 0x94d049bb133111ebull));
}

std::uint64_t RngStream::next_u64() {
  // PCG-XSH-RR, 64-bit state
  std::uint64_t old = state_;
  state_ = old * 6364136223846793005ull + inc_;
  std::uint64_t xorshifted = ((old >> 18u) ^ old) >> 27u;
  std::uint64_t rot = old >> 59u;
  std::uint32_t lo = static_cast<std::uint32_t>(xorshifted);
  std::uint32_t out_lo = (lo >> rot) | (lo << ((-rot) & 31));
  // run twice for full 64 bits of output
  std::uint64_t old2 = state_;
  state_ = old2 * 6364136223846793005ull + inc_;
  std::uint64_t xs2 = ((old2 >> 18u) ^ old2) >> 27u;
  std::uint64_t rot2 = old2 >> 59u;
  std::uint32_t lo2 = static_cast<std::uint32_t>(xs2);
  std::uint32_t out_hi = (lo2 >> rot2) | (lo2 << ((-rot2) & 31));
  return (static_cast<std::uint64_t>(out_hi) << 32) | out_lo;
}

double RngStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_gauss_;
  }
  // Box-Muller on (0,1] uniforms
  double u1 = 1.0 - uniform();
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double theta = 2.0 * M_PI * u2;
  spare_gauss_ = r * std::sin(theta);
  have_spare_ = true;
  return r * std::cos(theta);
}

bool RngStream::bernoulli(double p) { return uniform() < p; }

Index RngStream::uniform_index(Index n) {
  require(n > 0, "uniform_index: n must be positive");
  // Lemire multiply-shift with rejection for exact uniformity
  std::uint64_t un = static_cast<std::uint64_t>(n);
  while (true) {
    std::uint64_t x = next_u64();
    __uint128_t m = static_cast<__uint128_t>(x) * un;
    std::uint64_t lo = static_cast<std::uint64_t>(m);
    if (lo >= un || lo >= (-un) % un) return static_cast<Index>(m >> 64);
  }
}

}  // namespace alsq
