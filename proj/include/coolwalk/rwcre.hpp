#pragma once

#include <cstdint>
#include <vector>

#include "coolwalk/cooling.hpp"
#include "coolwalk/env.hpp"

namespace coolwalk {

struct SimBudget {
  std::int64_t replicas = 1;
  std::int64_t n = 0;  // global time
  std::uint64_t master_seed = 1;
  int parallelism = 1;
};

// Total simulated steps (replicas * n) must stay within this cap; the
// COOLWALK_STEP_BUDGET environment variable overrides it.
std::int64_t step_budget();

struct Ensemble {
  std::vector<std::int64_t> samples;  // X_n per replica, indexed by replica
  std::int64_t n = 0;
};

// The cooled walk at time n: independent walk pieces of lengths T_1..T_ell
// plus the boundary piece of length n - tau(ell), each in a fresh
// environment, summed. Replica r uses the stream derived from
// (master_seed, r); results are identical for any thread count.
Ensemble simulate_rwcre(const EnvironmentLaw& law, const CoolingMap& map, const SimBudget& budget);

enum class Centering { EmpiricalMean, LinearSpeed };
enum class Scaling { NPowInvS, PolyBeta, EmpiricalSD };

struct ScaledViewSpec {
  Centering centering = Centering::EmpiricalMean;
  Scaling scaling = Scaling::NPowInvS;
  double s = 0;       // NPowInvS / PolyBeta
  double v_mu = 0;    // LinearSpeed
  double tc_hat = 0;  // PolyBeta
  double A = 0;       // PolyBeta: polynomial map prefactor
  double a_exp = 0;   // PolyBeta: polynomial map exponent
};

// (x - center) / scale per sample.
std::vector<double> scaled_view(const Ensemble& ensemble, const ScaledViewSpec& spec);

// Subcritical polynomial normalization: exponent beta = (a(3-s)+1)/(2(a+1)).
double poly_beta_exponent(double s, double a_exp);

// Squared prefactor for the B n^beta normalization:
//   B^2 = 2 tc v^{3-s} A^{(2-s)/(a+1)} (a+1)^{(a(3-s)+1)/(a+1)}
//         / ((2-s)(3-s)(a(3-s)+1)).
double poly_beta_B2(double s, double a_exp, double A, double tc, double v_mu);

}  // namespace coolwalk
