#include "coolwalk/rwcre.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include "coolwalk/errors.hpp"
#include "coolwalk/parallel.hpp"
#include "coolwalk/rwre.hpp"

namespace coolwalk {

std::int64_t step_budget() {
  static const std::int64_t cached = [] {
    if (const char* env = std::getenv("COOLWALK_STEP_BUDGET")) {
      try {
        const long long parsed = std::stoll(env);
        if (parsed > 0) return static_cast<std::int64_t>(parsed);
      } catch (...) {
        throw_invalid("COOLWALK_STEP_BUDGET is not a positive integer");
      }
      throw_invalid("COOLWALK_STEP_BUDGET is not a positive integer");
    }
    return std::int64_t{4'000'000'000'000};
  }();
  return cached;
}

Ensemble simulate_rwcre(const EnvironmentLaw& law, const CoolingMap& map,
                        const SimBudget& budget) {
  if (budget.replicas < 1) throw_invalid("simulate: replicas must be >= 1");
  if (budget.n < 0) throw_invalid("simulate: n must be >= 0");
  if (budget.n > 0 && budget.replicas > step_budget() / budget.n) {
    throw_budget("simulate: replicas * n exceeds the step budget (" +
                 std::to_string(step_budget()) + " steps)");
  }

  // Pieces are shared by all replicas: extend the prefix until tau >= n.
  std::int64_t prefix_len = 16;
  while (true) {
    if (prefix_len >= map.max_length()) {
      prefix_len = map.max_length();
      break;
    }
    CoolingPrefix probe(map, prefix_len);
    if (probe.tau(prefix_len) >= budget.n) break;
    prefix_len *= 2;
  }
  const CoolingPrefix prefix(map, prefix_len);
  if (prefix.tau(prefix_len) < budget.n) {
    throw_invalid("simulate: cooling map is too short for n=" + std::to_string(budget.n));
  }
  const auto loc = prefix.locate(budget.n);

  Ensemble ensemble;
  ensemble.n = budget.n;
  ensemble.samples.assign(static_cast<std::size_t>(budget.replicas), 0);

  parallel_for(budget.parallelism, budget.replicas, [&](std::int64_t begin, std::int64_t end) {
    WalkState walk(law);
    for (std::int64_t r = begin; r < end; ++r) {
      RandomStream rng = RandomStream::substream(budget.master_seed, static_cast<std::uint64_t>(r));
      std::int64_t x = 0;
      for (std::int64_t k = 1; k <= loc.ell; ++k) {
        walk.reset();  // fresh environment per piece
        x += walk.run(prefix.increment(k), rng);
      }
      if (loc.t_bar > 0) {
        walk.reset();
        x += walk.run(loc.t_bar, rng);
      }
      ensemble.samples[static_cast<std::size_t>(r)] = x;
    }
  });
  return ensemble;
}

std::vector<double> scaled_view(const Ensemble& ensemble, const ScaledViewSpec& spec) {
  if (ensemble.samples.empty()) throw_invalid("scaled_view: empty ensemble");

  double center = 0.0;
  switch (spec.centering) {
    case Centering::EmpiricalMean: {
      for (auto x : ensemble.samples) center += static_cast<double>(x);
      center /= static_cast<double>(ensemble.samples.size());
      break;
    }
    case Centering::LinearSpeed: {
      if (!(spec.v_mu > 0.0)) throw_invalid("scaled_view: linear-speed centering needs v_mu");
      center = spec.v_mu * static_cast<double>(ensemble.n);
      break;
    }
  }

  double scale = 0.0;
  switch (spec.scaling) {
    case Scaling::NPowInvS: {
      if (!(spec.s > 1.0)) throw_invalid("scaled_view: n^{1/s} scaling needs s");
      scale = std::pow(static_cast<double>(ensemble.n), 1.0 / spec.s);
      break;
    }
    case Scaling::PolyBeta: {
      if (!(spec.tc_hat > 0.0)) {
        throw_invalid("scaled_view: poly-beta scaling needs an estimated tc");
      }
      const double beta = poly_beta_exponent(spec.s, spec.a_exp);
      const double b2 = poly_beta_B2(spec.s, spec.a_exp, spec.A, spec.tc_hat, spec.v_mu);
      scale = std::sqrt(b2) * std::pow(static_cast<double>(ensemble.n), beta);
      break;
    }
    case Scaling::EmpiricalSD: {
      double mean = 0.0;
      for (auto x : ensemble.samples) mean += static_cast<double>(x);
      mean /= static_cast<double>(ensemble.samples.size());
      double var = 0.0;
      for (auto x : ensemble.samples) {
        const double d = static_cast<double>(x) - mean;
        var += d * d;
      }
      var /= static_cast<double>(ensemble.samples.size() - 1);
      scale = std::sqrt(var);
      break;
    }
  }
  if (!(scale > 0.0)) throw_invalid("scaled_view: scale must be positive");

  std::vector<double> out;
  out.reserve(ensemble.samples.size());
  for (auto x : ensemble.samples) out.push_back((static_cast<double>(x) - center) / scale);
  return out;
}

double poly_beta_exponent(double s, double a_exp) {
  return (a_exp * (3.0 - s) + 1.0) / (2.0 * (a_exp + 1.0));
}

double poly_beta_B2(double s, double a_exp, double A, double tc, double v_mu) {
  const double num = 2.0 * tc * std::pow(v_mu, 3.0 - s) * std::pow(A, (2.0 - s) / (a_exp + 1.0)) *
                     std::pow(a_exp + 1.0, (a_exp * (3.0 - s) + 1.0) / (a_exp + 1.0));
  const double den = (2.0 - s) * (3.0 - s) * (a_exp * (3.0 - s) + 1.0);
  return num / den;
}

}  // namespace coolwalk
