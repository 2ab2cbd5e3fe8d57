#pragma once

// Characteristic-function inversion on a fixed uniform u-grid.
//
// The density is recovered by Filon-type integration: the CF is interpolated
// linearly between grid nodes and each segment's integral against e^{-iux} is
// evaluated in closed form, so accuracy is independent of how fast e^{-iux}
// oscillates (i.e. of |x|). CDF values come from integrating the density
// between direct Gil-Pelaez anchor evaluations.

#include <complex>
#include <functional>
#include <vector>

namespace coolwalk::inversion {

using CfFunction = std::function<std::complex<double>(double)>;

struct CfGrid {
  double du = 0;
  std::vector<std::complex<double>> phi;  // phi[j] = cf(j * du)
  double u_max() const { return du * static_cast<double>(phi.size() - 1); }
};

// Tabulates the CF on [0, u_max] where u_max is found by doubling until
// |cf| < tail_tolerance (capped).
CfGrid build_cf_grid(const CfFunction& cf, int nodes, double tail_tolerance = 1e-14);

// (1/pi) Re int_0^{u_max} e^{-iux} phi(u) du.
double filon_density(const CfGrid& grid, double x);

// Direct Gil-Pelaez CDF at one point, using the tabulated CF:
// 1/2 - (1/pi) int Im[e^{-iux} phi(u)]/u du, integrated on half-period panels.
double gil_pelaez_cdf(const CfGrid& grid, double x);

class CdfTable {
 public:
  // heavy_tail_exponent: stable index used for the left-tail extrapolation
  // beyond the table (0 disables power extrapolation).
  CdfTable(const CfFunction& cf, int nodes, double heavy_tail_exponent);

  double cdf(double x) const;

 private:
  std::vector<double> xs_;
  std::vector<double> fs_;
  std::vector<double> slopes_;  // monotone cubic interpolation
  double tail_exponent_;
  double scale_;
};

}  // namespace coolwalk::inversion
