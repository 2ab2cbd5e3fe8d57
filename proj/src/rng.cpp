#include "coolwalk/rng.hpp"

#include <cmath>

#include "coolwalk/errors.hpp"

namespace coolwalk {

namespace {

inline std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

RandomStream::RandomStream(std::uint64_t seed) {
  std::uint64_t x = seed;
  for (auto& w : state_) w = splitmix64(x);
}

RandomStream RandomStream::substream(std::uint64_t master_seed, std::uint64_t index) {
  // Decorrelate the index before mixing it with the master seed so that
  // consecutive indices do not land on consecutive splitmix chains.
  std::uint64_t ix = index;
  std::uint64_t mixed = splitmix64(ix);
  return RandomStream(master_seed ^ mixed ^ (index * 0xD1342543DE82EF95ULL));
}

std::uint64_t RandomStream::next_u64() {
  std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
  std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double RandomStream::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  double u, v, q;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    q = u * u + v * v;
  } while (q >= 1.0 || q == 0.0);
  double f = std::sqrt(-2.0 * std::log(q) / q);
  spare_normal_ = v * f;
  has_spare_ = true;
  return u * f;
}

double RandomStream::exponential() { return -std::log1p(-uniform()); }

double RandomStream::gamma(double shape) {
  if (!(shape > 0.0)) throw_invalid("gamma shape must be positive");
  if (shape < 1.0) {
    // Boost to shape+1 and scale back.
    double u = uniform();
    while (u == 0.0) u = uniform();
    return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

double RandomStream::beta(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw_invalid("beta parameters must be positive");
  double w;
  if (b == 1.0) {
    double u = uniform();
    while (u == 0.0) u = uniform();
    w = std::pow(u, 1.0 / a);
  } else if (a == 1.0) {
    double u = uniform();
    while (u == 0.0) u = uniform();
    w = 1.0 - std::pow(u, 1.0 / b);
  } else {
    const double x = gamma(a);
    const double y = gamma(b);
    w = x / (x + y);
  }
  // Keep draws strictly inside (0,1); the walk kernel divides by omega.
  const double eps = 1e-15;
  if (w < eps) w = eps;
  if (w > 1.0 - eps) w = 1.0 - eps;
  return w;
}

std::int64_t RandomStream::poisson(double mean) {
  if (!(mean >= 0.0)) throw_invalid("poisson mean must be non-negative");
  if (mean == 0.0) return 0;
  if (mean < 10.0) {
    // Inversion by sequential search.
    double p = std::exp(-mean);
    double f = p;
    double u = uniform();
    std::int64_t k = 0;
    while (u > f) {
      ++k;
      p *= mean / static_cast<double>(k);
      f += p;
      if (k > 2000) break;  // cumulative rounding guard
    }
    return k;
  }
  // Hormann's PTRD (transformed rejection with decomposition).
  const double mu = mean;
  const double smu = std::sqrt(mu);
  const double b = 0.931 + 2.53 * smu;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  const double lmu = std::log(mu);
  for (;;) {
    double u = uniform() - 0.5;
    double v = uniform();
    double us = 0.5 - std::fabs(u);
    double kf = std::floor((2.0 * a / us + b) * u + mu + 0.43);
    if (us >= 0.07 && v <= v_r) return static_cast<std::int64_t>(kf);
    if (kf < 0.0 || (us < 0.013 && v > us)) continue;
    double k = kf;
    if (std::log(v * inv_alpha / (a / (us * us) + b)) <= k * lmu - mu - std::lgamma(k + 1.0)) {
      return static_cast<std::int64_t>(kf);
    }
  }
}

std::int64_t RandomStream::geometric0(double p) {
  if (!(p > 0.0) || !(p > 1e-12)) throw_invalid("geometric success probability too small");
  if (p >= 1.0) return 0;
  const double denom = std::log1p(-p);
  double u = uniform();
  while (u == 0.0) u = uniform();
  const double g = std::floor(std::log(u) / denom);
  return static_cast<std::int64_t>(g);
}

std::int64_t RandomStream::negative_binomial(std::int64_t count, double p) {
  if (count <= 0) return 0;
  if (count < 64) {
    std::int64_t total = 0;
    for (std::int64_t i = 0; i < count; ++i) total += geometric0(p);
    return total;
  }
  // NB(count, p) as Poisson with Gamma(count) * (1-p)/p intensity.
  const double lambda = gamma(static_cast<double>(count)) * (1.0 - p) / p;
  return poisson(lambda);
}

}  // namespace coolwalk
