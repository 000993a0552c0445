#pragma once

#include <cstdint>
#include <random>

namespace migsim {

// splitmix64 step; the standard finalizer, good enough to decorrelate
// consecutive stream indices.
std::uint64_t splitmix64(std::uint64_t x);

// Derives an independent stream seed from (master seed, stream index).
// Replicate i always gets the same stream regardless of how replicates are
// scheduled across workers.
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index);

// mt19937_64 with hand-rolled draw helpers.  The standard <random>
// distributions are implementation-defined, so every distribution here is
// spelled out explicitly; outputs are bit-identical across platforms for a
// given seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform on (0, 1]; safe to pass to log.
  double uniform_pos() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  // Exponential waiting time with the given rate (inverse-CDF method).
  double exponential(double rate) { return -std::log(uniform_pos()) / rate; }

  // Uniform on {0, ..., n-1} by rejection; exactly unbiased.
  std::size_t uniform_index(std::size_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t r;
    do {
      r = next_u64();
    } while (r >= limit);
    return static_cast<std::size_t>(r % n);
  }

  // Poisson count by accumulating unit-rate arrivals until the mean is
  // exceeded.  O(mean) draws but immune to the exp(-mean) underflow that
  // breaks multiplicative schemes for large means.
  std::uint64_t poisson(double mean) {
    if (mean <= 0.0) return 0;
    std::uint64_t k = 0;
    double acc = exponential(1.0);
    while (acc < mean) {
      ++k;
      acc += exponential(1.0);
    }
    return k;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace migsim
