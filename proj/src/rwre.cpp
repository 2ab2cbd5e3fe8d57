#include "coolwalk/rwre.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "coolwalk/errors.hpp"
#include "coolwalk/parallel.hpp"

namespace coolwalk {

std::int64_t WalkState::run(std::int64_t n, RandomStream& rng) {
  const std::int64_t start = position_;
  for (std::int64_t i = 0; i < n; ++i) {
    const double w = omega_at(position_, rng);
    position_ += rng.uniform() < w ? 1 : -1;
  }
  time_ += n;
  return position_ - start;
}

std::int64_t rwre_endpoint(const EnvironmentLaw& law, std::int64_t n, RandomStream& rng) {
  if (n < 0) throw_invalid("rwre endpoint: n must be >= 0");
  WalkState walk(law);
  walk.run(n, rng);
  return walk.position();
}

std::vector<std::int64_t> rwre_endpoint_many(const EnvironmentLaw& law, std::int64_t n,
                                             std::int64_t replicas, std::uint64_t master_seed,
                                             int threads) {
  if (n < 0 || replicas < 1) throw_invalid("rwre endpoints: need n >= 0 and replicas >= 1");
  std::vector<std::int64_t> out(static_cast<std::size_t>(replicas));
  parallel_for(threads, replicas, [&](std::int64_t begin, std::int64_t end) {
    WalkState walk(law);
    for (std::int64_t r = begin; r < end; ++r) {
      RandomStream rng = RandomStream::substream(master_seed, static_cast<std::uint64_t>(r));
      walk.reset();
      walk.run(n, rng);
      out[static_cast<std::size_t>(r)] = walk.position();
    }
  });
  return out;
}

namespace {

std::int64_t confirmation_depth(const RegenOptions& options, std::int64_t level_gain) {
  const double scale = static_cast<double>(std::max<std::int64_t>(2, level_gain));
  return options.horizon_factor *
         std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(std::log2(scale))));
}

}  // namespace

RegenerationIncrement sample_regeneration_direct(const EnvironmentLaw& law, RandomStream& rng,
                                                 const RegenOptions& options) {
  WalkState walk(law);

  struct Candidate {
    std::int64_t time;
    std::int64_t level;
  };
  std::deque<Candidate> alive;  // strictly increasing levels
  std::int64_t top = 0;         // highest level reached so far
  std::int64_t confirmed_count = 0;
  Candidate first{}, second{};
  std::int64_t last_confirmed_level = 0;

  for (std::int64_t step = 0; step < options.max_steps; ++step) {
    walk.step(rng);
    const std::int64_t pos = walk.position();
    if (pos > top) {
      top = pos;
      alive.push_back(Candidate{walk.time(), pos});
    } else {
      // Dipping strictly below a candidate's level kills it.
      while (!alive.empty() && pos < alive.back().level) alive.pop_back();
    }
    // Confirm from the lowest level up.
    while (!alive.empty() &&
           pos >= alive.front().level +
                      confirmation_depth(options, alive.front().level - last_confirmed_level)) {
      const Candidate c = alive.front();
      alive.pop_front();
      last_confirmed_level = c.level;
      ++confirmed_count;
      if (confirmed_count == 1) {
        first = c;
      } else {
        second = c;
        return RegenerationIncrement{second.level - first.level, second.time - first.time};
      }
    }
  }
  throw_budget("regeneration sampler: step budget exhausted before confirmation");
}

RegenerationIncrement sample_regeneration_branching(const EnvironmentLaw& law, RandomStream& rng,
                                                    const RegenOptions& options) {
  std::int64_t v = 0;        // V_0 = 0
  std::int64_t sum_v = 0;    // sum_{i < nu} V_i
  for (std::int64_t generation = 1; generation <= options.max_generations; ++generation) {
    const double omega = law.sample_omega(rng);
    const std::int64_t next = rng.negative_binomial(v + 1, omega);
    if (next == 0) {
      return RegenerationIncrement{generation, generation + 2 * sum_v};
    }
    sum_v += next;
    v = next;
  }
  throw_budget("branching regeneration sampler: generation cap exhausted");
}

ConstantEstimates estimate_constants(const EnvironmentLaw& law, const EstimationBudget& budget) {
  if (budget.n_grid.size() < 2) throw_invalid("estimate_constants: need at least two grid points");
  if (budget.replicas < 16) throw_invalid("estimate_constants: need at least 16 replicas");

  const double s = law.s();
  const double v = law.speed();
  const std::size_t grid_size = budget.n_grid.size();
  const std::int64_t replicas = budget.replicas;

  ConstantEstimates est;
  est.n_grid = budget.n_grid;
  est.replicas = replicas;
  est.mean_by_n.resize(grid_size);
  est.var_by_n.resize(grid_size);

  std::vector<std::vector<std::int64_t>> samples(grid_size);
  for (std::size_t gi = 0; gi < grid_size; ++gi) {
    // Distinct substream block per grid point.
    const std::uint64_t seed =
        budget.master_seed ^ (0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(gi) + 1));
    samples[gi] =
        rwre_endpoint_many(law, budget.n_grid[gi], replicas, seed, budget.parallelism);
    double mean = 0.0;
    for (auto z : samples[gi]) mean += static_cast<double>(z);
    mean /= static_cast<double>(replicas);
    double var = 0.0;
    for (auto z : samples[gi]) {
      const double d = static_cast<double>(z) - mean;
      var += d * d;
    }
    var /= static_cast<double>(replicas - 1);
    est.mean_by_n[gi] = mean;
    est.var_by_n[gi] = var;
  }

  // Constrained fit: log Var = log sigma^2 + (3-s) log n.
  double log_sigma2_sum = 0.0, log_sigma2_sq = 0.0;
  for (std::size_t gi = 0; gi < grid_size; ++gi) {
    const double term =
        std::log(est.var_by_n[gi]) - (3.0 - s) * std::log(static_cast<double>(est.n_grid[gi]));
    log_sigma2_sum += term;
    log_sigma2_sq += term * term;
  }
  const double j = static_cast<double>(grid_size);
  const double log_sigma2 = log_sigma2_sum / j;
  const double term_sd =
      std::sqrt(std::max(0.0, (log_sigma2_sq / j - log_sigma2 * log_sigma2) * j / (j - 1.0)));
  est.sigma_z2_hat = std::exp(log_sigma2);
  est.sigma_z2_se = est.sigma_z2_hat * term_sd / std::sqrt(j);

  // Unconstrained diagnostic slope.
  {
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t gi = 0; gi < grid_size; ++gi) {
      const double x = std::log(static_cast<double>(est.n_grid[gi]));
      const double y = std::log(est.var_by_n[gi]);
      sx += x; sy += y; sxx += x * x; sxy += x * y; syy += y * y;
    }
    const double denom = j * sxx - sx * sx;
    est.diagnostic_exponent = (j * sxy - sx * sy) / denom;
    const double ss_tot = syy - sy * sy / j;
    const double intercept = (sy - est.diagnostic_exponent * sx) / j;
    double ss_res = 0.0;
    for (std::size_t gi = 0; gi < grid_size; ++gi) {
      const double x = std::log(static_cast<double>(est.n_grid[gi]));
      const double y = std::log(est.var_by_n[gi]);
      const double r = y - intercept - est.diagnostic_exponent * x;
      ss_res += r * r;
    }
    est.diagnostic_r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  }

  const double to_tc = (2.0 - s) * (3.0 - s) / (2.0 * std::pow(v, 3.0 - s));
  est.tc_hat = est.sigma_z2_hat * to_tc;
  est.tc_se = est.sigma_z2_se * to_tc;
  // Both Gamma(1-s) and cos(pi s/2) are negative on (1,2); b > 0.
  const double to_b = v * std::tgamma(1.0 - s) * std::cos(M_PI * s / 2.0);
  est.b_hat = est.tc_hat * to_b;
  est.b_se = est.tc_se * to_b;

  // Speed from the largest n.
  {
    const std::size_t last = grid_size - 1;
    const double n_last = static_cast<double>(est.n_grid[last]);
    est.v_hat = est.mean_by_n[last] / n_last;
    est.v_se = std::sqrt(est.var_by_n[last] / static_cast<double>(replicas)) / n_last;
  }

  // Tail-window cross-check at the largest n: the ratio
  // P(Z_n - n v < -t) / ((n v - t) t^{-s}) stabilizes on tc over a window of
  // moderate slow-down depths. The asymptotic window is empty at desk-scale
  // n, so fall back to fixed multiples of the natural scales when needed.
  {
    const std::size_t last = grid_size - 1;
    const double n_last = static_cast<double>(est.n_grid[last]);
    const double log_n = std::log(n_last);
    double t_lo = std::pow(n_last, 1.0 / s) * log_n * log_n * log_n;
    double t_hi = n_last * v - log_n;
    if (!(t_lo < t_hi)) {
      est.tail_window_fallback = true;
      t_lo = 4.0 * std::pow(n_last, 1.0 / s);
      t_hi = 0.6 * n_last * v;
    }
    std::vector<double> centered;
    centered.reserve(samples[last].size());
    for (auto z : samples[last]) centered.push_back(n_last * v - static_cast<double>(z));
    std::sort(centered.begin(), centered.end());
    const int points = 8;
    double ratio_sum = 0.0, weight_sum = 0.0;
    int used = 0;
    for (int p = 0; p < points; ++p) {
      const double t = t_lo * std::pow(t_hi / t_lo, (p + 0.5) / points);
      const auto count = centered.end() - std::lower_bound(centered.begin(), centered.end(), t);
      if (count < 5) continue;
      const double prob = static_cast<double>(count) / static_cast<double>(replicas);
      const double ratio = prob / ((n_last * v - t) * std::pow(t, -s));
      const double se = std::sqrt(prob * (1.0 - prob) / static_cast<double>(replicas)) /
                        ((n_last * v - t) * std::pow(t, -s));
      const double wgt = 1.0 / (se * se);
      ratio_sum += wgt * ratio;
      weight_sum += wgt;
      ++used;
    }
    if (used >= 2 && weight_sum > 0) {
      est.tc_tail_hat = ratio_sum / weight_sum;
      // The window points share samples, so this understates the error a bit;
      // the estimate is advisory either way.
      est.tc_tail_se = std::sqrt(1.0 / weight_sum);
      const double combined = std::sqrt(est.tc_se * est.tc_se + est.tc_tail_se * est.tc_tail_se);
      est.consistent = std::fabs(est.tc_hat - est.tc_tail_hat) <= 3.0 * combined;
    } else {
      est.tc_tail_hat = 0.0;
      est.tc_tail_se = 0.0;
      est.consistent = true;  // no usable window: nothing to contradict
    }
  }

  return est;
}

}  // namespace coolwalk
