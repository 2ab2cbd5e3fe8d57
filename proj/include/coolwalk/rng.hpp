#pragma once

#include <array>
#include <cstdint>

namespace coolwalk {

// xoshiro256++ with splitmix64 seeding. Hand-rolled so that streams are
// bit-stable across compilers and platforms; replica streams are derived
// deterministically from (master_seed, index) and are independent of thread
// scheduling.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed);

  // Stream for replica `index` under `master_seed`. Distinct indices give
  // statistically independent streams.
  static RandomStream substream(std::uint64_t master_seed, std::uint64_t index);

  std::uint64_t next_u64();

  // Uniform on [0, 1), 53-bit resolution.
  double uniform();

  // Standard normal (Marsaglia polar, one spare cached).
  double normal();

  // Exponential(1).
  double exponential();

  // Gamma(shape), unit scale. Marsaglia-Tsang squeeze method.
  double gamma(double shape);

  // Beta(a, b) on (0,1). Closed-form inversion when a or b equals 1,
  // gamma ratio otherwise. Draws are strictly inside (0,1).
  double beta(double a, double b);

  // Poisson(mean). Inversion for small mean, Hormann's PTRD for large.
  std::int64_t poisson(double mean);

  // Geometric on {0,1,2,...} with success probability p: number of failures
  // before the first success.
  std::int64_t geometric0(double p);

  // Sum of `count` i.i.d. geometric0(p) draws (negative binomial). Uses the
  // gamma-Poisson mixture for large counts, direct summation otherwise.
  std::int64_t negative_binomial(std::int64_t count, double p);

 private:
  std::array<std::uint64_t, 4> state_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace coolwalk
