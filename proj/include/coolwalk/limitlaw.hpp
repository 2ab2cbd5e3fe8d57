#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <utility>
#include <variant>
#include <vector>

#include "coolwalk/rng.hpp"

namespace coolwalk {

// Levy density lambda(x) = c |x|^{-s-1} a(x) on the negative half-line, with
// a non-decreasing and continuous, a(0) = 1 and a(-inf) = 0. Three samplable
// shapes for a:
//   linear ramp        a(x) = (1 + x/r)_+
//   piecewise linear   a(x) = sum_i (g_i x + h_i)_+ with sum h_i = 1
//   tabulated g        a derived from a cooling-scale profile g via
//                      t^{s+1} lambda(-t) =
//                        tc v s g(inf) - tc v g(t/v) - tc (s-1) t I(t/v),
//                      I(x) = int_x^inf g(xi)/xi^2 dxi  (integration by parts
//                      of the jump-intensity representation)
class LambdaDescriptor {
 public:
  struct LinearRampA {
    double r;
  };
  struct PiecewiseLinearA {
    std::vector<std::pair<double, double>> pieces;  // (g_i, h_i)
  };
  struct TabulatedGA {
    std::vector<double> xs;  // strictly increasing, positive
    std::vector<double> gs;  // non-decreasing, g(inf) = gs.back() in [0,1]
    double tc;
    double v_mu;
  };
  using AForm = std::variant<LinearRampA, PiecewiseLinearA, TabulatedGA>;

  static LambdaDescriptor linear_ramp(double c, double s, double r);
  static LambdaDescriptor piecewise_linear(double c, double s,
                                           std::vector<std::pair<double, double>> pieces);

  double c() const noexcept { return c_; }
  double s() const noexcept { return s_; }
  const AForm& a_form() const noexcept { return a_; }

  // Tempering function a(x) for x <= 0.
  double a_at(double x) const;
  // lambda(-t) for t > 0.
  double density_neg(double t) const;
  // Smallest T with lambda(-t) = 0 for all t >= T (infinity when unbounded).
  double support() const noexcept { return support_; }

 private:
  friend LambdaDescriptor lambda_from_g(const std::vector<double>&, const std::vector<double>&,
                                        double, double, double);
  LambdaDescriptor(double c, double s, AForm a);

  double c_;
  double s_;
  AForm a_;
  double support_;
  // TabulatedGA: right-cumulative of g(xi)/xi^2 at grid points, plus g(inf).
  std::vector<double> g_tail_integral_;
  double g_inf_ = 0.0;
};

// Builds the tabulated-g descriptor; c = tc v s g(inf). Requires g
// non-decreasing with g(inf) = gs.back() in [0,1] and a flat tail
// (|gs[last] - gs[last-1]| <= 1e-3).
LambdaDescriptor lambda_from_g(const std::vector<double>& xs, const std::vector<double>& gs,
                               double tc, double v_mu, double s);

struct GaussianLaw {
  double sigma;
};
struct StableLaw {
  // CF exp[-b |u|^s (1 + i sgn(u) tan(s pi/2))]: mean zero, totally skewed to
  // the left for b > 0 (tan(s pi/2) < 0 on (1,2)).
  double s;
  double b;
};
struct TemperedStableLaw {
  LambdaDescriptor lambda;
};
struct MixtureLaw {
  // a1 * N(0,1) + a2 * W_lambda + a3 * S, components independent.
  double a1, a2, a3;
  LambdaDescriptor lambda;
  StableLaw stable;
};

// Immutable law with characteristic function, CDF by inversion, and a direct
// sampler. Internal tables (inversion grid, jump quantiles) are built lazily
// and shared read-only afterwards.
class LimitLaw {
 public:
  using Variant = std::variant<GaussianLaw, StableLaw, TemperedStableLaw, MixtureLaw>;

  static LimitLaw gaussian(double sigma);
  static LimitLaw stable(double s, double b);
  static LimitLaw tempered(LambdaDescriptor lambda);
  static LimitLaw mixture(double a1, double a2, double a3, LambdaDescriptor lambda,
                          StableLaw stable);

  const Variant& variant() const;

  std::complex<double> cf(double u) const;

  // CDF via characteristic-function inversion: a fixed-grid Filon integration
  // of the density anchored by direct Gil-Pelaez evaluations, monotone by
  // construction. Absolute accuracy ~1e-6 for closed-form CFs, ~1e-4 when the
  // CF itself is computed by quadrature.
  double cdf(double x) const;

  double sample(RandomStream& rng) const;

  // Deterministic bulk sampling: draw i uses the stream derived from
  // (master_seed, i), so the output is independent of the thread count.
  std::vector<double> sample_many(std::uint64_t master_seed, std::size_t count, int threads) const;

  // Small-jump truncation for the tempered sampler (compensated compound
  // Poisson below this cut is replaced by its matching Gaussian). Default
  // 1e-3 * c^{1/s}. Must be called before the first sample.
  void set_small_jump_cut(double epsilon);

 private:
  struct Impl;
  explicit LimitLaw(Variant v);
  std::shared_ptr<Impl> impl_;
};

// Scale of the stable law matched by a linear-ramp tempered law as r -> inf:
// b = -c Gamma(-s) cos(pi s / 2).
double stable_b_from_ramp_c(double c, double s);

}  // namespace coolwalk
