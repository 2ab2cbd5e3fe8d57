#pragma once

#include "coolwalk/rng.hpp"

namespace coolwalk {

// An s-canonical environment law from the Beta family: site probabilities
// omega ~ Beta(a, b) with a = s + b, so that for the odds ratio
// rho = (1-omega)/omega the moment <rho^t> = Gamma(a-t)Gamma(b+t)/(Gamma(a)Gamma(b))
// has its non-trivial root of <rho^t> = 1 exactly at t = s.
//
// Immutable after construction; freely shareable across threads. Sampling
// takes a caller-owned RandomStream.
class EnvironmentLaw {
 public:
  // Requires s in (1,2) and b > 0.
  static EnvironmentLaw beta(double s, double b);

  double s() const noexcept { return s_; }
  double beta_a() const noexcept { return a_; }
  double beta_b() const noexcept { return b_; }

  // <rho> = b / (a-1).
  double mean_rho() const noexcept { return mean_rho_; }

  // Limiting speed (1 - <rho>) / (1 + <rho>) = (s-1)/(s-1+2b) > 0.
  double speed() const noexcept { return speed_; }

  // <rho^t> in closed form; valid for t in (-b, a).
  double kappa(double t) const;

  // Same moment by adaptive quadrature over (0,1); the dual route used by the
  // analytics checks. Absolute tolerance ~1e-10.
  double kappa_quadrature(double t) const;

  // <log rho> = digamma(b) - digamma(a) < 0 (right transience).
  double mean_log_rho() const;

  // Same by quadrature.
  double mean_log_rho_quadrature() const;

  // One draw omega ~ Beta(a, b), strictly inside (0,1).
  double sample_omega(RandomStream& rng) const { return rng.beta(a_, b_); }

 private:
  EnvironmentLaw(double s, double b);

  double s_;
  double b_;
  double a_;
  double mean_rho_;
  double speed_;
};

}  // namespace coolwalk
