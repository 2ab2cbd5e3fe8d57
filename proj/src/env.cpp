#include "coolwalk/env.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <cmath>

#include "coolwalk/errors.hpp"

namespace coolwalk {

EnvironmentLaw EnvironmentLaw::beta(double s, double b) { return EnvironmentLaw(s, b); }

EnvironmentLaw::EnvironmentLaw(double s, double b) : s_(s), b_(b), a_(s + b) {
  if (!(s > 1.0) || !(s < 2.0)) throw_invalid("environment: s must lie in (1,2)");
  if (!(b > 0.0)) throw_invalid("environment: b must be positive");
  mean_rho_ = b_ / (a_ - 1.0);
  speed_ = (1.0 - mean_rho_) / (1.0 + mean_rho_);
}

double EnvironmentLaw::kappa(double t) const {
  if (!(t > -b_) || !(t < a_)) throw_invalid("kappa: t outside (-b, a)");
  // Gamma(a-t)Gamma(b+t) / (Gamma(a)Gamma(b)), evaluated in log space.
  return std::exp(std::lgamma(a_ - t) + std::lgamma(b_ + t) - std::lgamma(a_) - std::lgamma(b_));
}

namespace {

// Beta(a,b) expectation of f(omega); tanh-sinh absorbs the endpoint
// singularities of the density and of rho-powers.
template <typename F>
double beta_expectation(double a, double b, F&& f) {
  const double log_norm = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
  boost::math::quadrature::tanh_sinh<double> integrator;
  auto integrand = [&](double w, double wc) {
    // wc = 1-w supplied by tanh_sinh near the right endpoint.
    double one_minus_w = wc > 0 ? wc : 1.0 - w;
    double log_density = log_norm + (a - 1.0) * std::log(w) + (b - 1.0) * std::log(one_minus_w);
    return f(w, one_minus_w) * std::exp(log_density);
  };
  return integrator.integrate(integrand, 0.0, 1.0, 1e-12);
}

}  // namespace

double EnvironmentLaw::kappa_quadrature(double t) const {
  if (!(t > -b_) || !(t < a_)) throw_invalid("kappa: t outside (-b, a)");
  return beta_expectation(a_, b_, [t](double w, double one_minus_w) {
    return std::exp(t * (std::log(one_minus_w) - std::log(w)));
  });
}

double EnvironmentLaw::mean_log_rho() const {
  return boost::math::digamma(b_) - boost::math::digamma(a_);
}

double EnvironmentLaw::mean_log_rho_quadrature() const {
  return beta_expectation(a_, b_, [](double w, double one_minus_w) {
    return std::log(one_minus_w) - std::log(w);
  });
}

}  // namespace coolwalk
