#include "inversion.hpp"

#include <algorithm>
#include <cmath>

#include "coolwalk/errors.hpp"

namespace coolwalk::inversion {

namespace {

constexpr double kPi = 3.14159265358979323846;

// I0 = int_0^h e^{-ivx} dv and I1 = int_0^h (v/h) e^{-ivx} dv.
void segment_moments(double h, double x, std::complex<double>& i0, std::complex<double>& i1) {
  const double theta = h * x;
  const std::complex<double> mi(0.0, -1.0);
  if (std::fabs(theta) < 1e-3) {
    // Series in (-i theta); fifth-order truncation is ~1e-18 relative here.
    const std::complex<double> z = mi * theta;
    const std::complex<double> z2 = z * z;
    const std::complex<double> z3 = z2 * z;
    const std::complex<double> z4 = z2 * z2;
    i0 = h * (1.0 + z / 2.0 + z2 / 6.0 + z3 / 24.0 + z4 / 120.0);
    i1 = h * (0.5 + z / 3.0 + z2 / 8.0 + z3 / 30.0 + z4 / 144.0);
    return;
  }
  const std::complex<double> e = std::exp(mi * theta);
  const std::complex<double> ix(0.0, x);
  i0 = (1.0 - e) / ix;
  // int_0^h v e^{-ivx} dv = -(h/(ix)) e^{-i theta} + (e^{-i theta} - 1)/x^2.
  i1 = (-(h / ix) * e + (e - 1.0) / (x * x)) / h;
}

// 15-point Gauss-Legendre on [-1, 1].
constexpr double kGlNodes[15] = {
    -0.9879925180204854, -0.9372733924007060, -0.8482065834104272, -0.7244177313601700,
    -0.5709721726085388, -0.3941513470775634, -0.2011940939974345, 0.0,
    0.2011940939974345,  0.3941513470775634,  0.5709721726085388,  0.7244177313601700,
    0.8482065834104272,  0.9372733924007060,  0.9879925180204854};
constexpr double kGlWeights[15] = {
    0.0307532419961173, 0.0703660474881081, 0.1071592204671719, 0.1395706779261543,
    0.1662692058169939, 0.1861610000155622, 0.1984314853271116, 0.2025782419255613,
    0.1984314853271116, 0.1861610000155622, 0.1662692058169939, 0.1395706779261543,
    0.1071592204671719, 0.0703660474881081, 0.0307532419961173};

}  // namespace

CfGrid build_cf_grid(const CfFunction& cf, int nodes, double tail_tolerance) {
  double u_max = 1.0;
  for (int iter = 0; iter < 64; ++iter) {
    if (std::abs(cf(u_max)) < tail_tolerance) break;
    u_max *= 2.0;
    if (u_max > 1e8) throw_numeric("cf inversion: |cf| does not decay (u_max cap hit)");
  }
  CfGrid grid;
  grid.du = u_max / static_cast<double>(nodes);
  grid.phi.resize(static_cast<std::size_t>(nodes) + 1);
  grid.phi[0] = 1.0;
  for (int j = 1; j <= nodes; ++j) {
    const std::complex<double> value = cf(grid.du * j);
    if (!std::isfinite(value.real()) || !std::isfinite(value.imag())) {
      throw_numeric("cf inversion: non-finite characteristic function value");
    }
    grid.phi[static_cast<std::size_t>(j)] = value;
  }
  return grid;
}

double filon_density(const CfGrid& grid, double x) {
  const double h = grid.du;
  std::complex<double> i0, i1;
  segment_moments(h, x, i0, i1);
  const std::complex<double> rot = std::exp(std::complex<double>(0.0, -h * x));
  std::complex<double> phase(1.0, 0.0);
  std::complex<double> acc(0.0, 0.0);
  const std::size_t segments = grid.phi.size() - 1;
  for (std::size_t j = 0; j < segments; ++j) {
    const std::complex<double> c0 = grid.phi[j];
    const std::complex<double> dc = grid.phi[j + 1] - c0;
    acc += phase * (c0 * i0 + dc * i1);
    phase *= rot;
    if ((j & 4095u) == 4095u) {
      // Rotation drift guard: recompute the phase exactly.
      phase = std::exp(std::complex<double>(0.0, -h * x * static_cast<double>(j + 1)));
    }
  }
  return acc.real() / kPi;
}

namespace {

// Linear interpolation of the tabulated CF.
std::complex<double> interp_phi(const CfGrid& grid, double u) {
  const double pos = u / grid.du;
  const std::size_t j = std::min<std::size_t>(static_cast<std::size_t>(pos), grid.phi.size() - 2);
  const double frac = pos - static_cast<double>(j);
  return grid.phi[j] * (1.0 - frac) + grid.phi[j + 1] * frac;
}

}  // namespace

double gil_pelaez_cdf(const CfGrid& grid, double x) {
  const double u_max = grid.u_max();
  // Panels of at most half an oscillation period.
  const double panel = std::min(u_max / 64.0, kPi / std::max(1.0, std::fabs(x)));
  const std::int64_t n_panels = static_cast<std::int64_t>(std::ceil(u_max / panel));
  double integral = 0.0;
  for (std::int64_t p = 0; p < n_panels; ++p) {
    const double a = u_max * static_cast<double>(p) / static_cast<double>(n_panels);
    const double b = u_max * static_cast<double>(p + 1) / static_cast<double>(n_panels);
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double acc = 0.0;
    for (int g = 0; g < 15; ++g) {
      const double u = mid + half * kGlNodes[g];
      const std::complex<double> e = std::exp(std::complex<double>(0.0, -u * x));
      acc += kGlWeights[g] * (e * interp_phi(grid, u)).imag() / u;
    }
    integral += acc * half;
  }
  return 0.5 - integral / kPi;
}

CdfTable::CdfTable(const CfFunction& cf, int nodes, double heavy_tail_exponent)
    : tail_exponent_(heavy_tail_exponent) {
  const CfGrid grid = build_cf_grid(cf, nodes);

  // Width heuristic from the CF half-decay point.
  double u_half = grid.du;
  for (std::size_t j = 1; j < grid.phi.size(); ++j) {
    if (std::abs(grid.phi[j]) < 0.5) {
      u_half = grid.du * static_cast<double>(j);
      break;
    }
  }
  scale_ = 2.0 / u_half;

  auto density = [&](double x) { return filon_density(grid, x); };

  double peak = 0.0;
  for (int i = -24; i <= 24; ++i) peak = std::max(peak, density(scale_ * 0.5 * i));
  if (!(peak > 0.0)) throw_numeric("cf inversion: could not locate the density bulk");

  // Bulk edges: walk out until the density is negligible.
  double x_hi = 4.0 * scale_;
  while (std::fabs(density(x_hi)) > 1e-12 * peak && x_hi < 1e7 * scale_) x_hi *= 1.4;
  double x_lo = -4.0 * scale_;
  while (std::fabs(density(x_lo)) > 1e-7 * peak && x_lo > -1e7 * scale_) x_lo *= 1.4;

  // Left anchor: extend until the remaining tail mass is below ~1e-6.
  double x_anchor = x_lo;
  double f_anchor = gil_pelaez_cdf(grid, x_anchor);
  for (int iter = 0; iter < 40 && f_anchor > 1e-6; ++iter) {
    x_anchor *= 2.0;
    f_anchor = gil_pelaez_cdf(grid, x_anchor);
  }
  f_anchor = std::clamp(f_anchor, 0.0, 1.0);

  // Grid: uniform across the bulk plus a geometric left-tail extension.
  const int bulk_points = 4096;
  xs_.clear();
  if (x_anchor < x_lo) {
    const int tail_points = 512;
    for (int i = 0; i < tail_points; ++i) {
      const double t = static_cast<double>(i) / static_cast<double>(tail_points);
      xs_.push_back(-std::fabs(x_anchor) * std::pow(std::fabs(x_lo) / std::fabs(x_anchor), t));
    }
  }
  for (int i = 0; i <= bulk_points; ++i) {
    xs_.push_back(x_lo + (x_hi - x_lo) * static_cast<double>(i) / bulk_points);
  }

  // Cumulative Simpson between nodes, anchored on the left.
  fs_.assign(xs_.size(), 0.0);
  fs_[0] = f_anchor;
  double prev_density = density(xs_[0]);
  for (std::size_t i = 1; i < xs_.size(); ++i) {
    const double left = xs_[i - 1];
    const double right = xs_[i];
    const double fm = density(0.5 * (left + right));
    const double fr = density(right);
    fs_[i] = fs_[i - 1] + (right - left) * (prev_density + 4.0 * fm + fr) / 6.0;
    prev_density = fr;
  }

  // Match the direct Gil-Pelaez value at the right end, then force
  // monotonicity and clamp.
  const double f_right = std::clamp(gil_pelaez_cdf(grid, xs_.back()), 0.0, 1.0);
  const double span_cum = fs_.back() - fs_.front();
  const double span_target = f_right - f_anchor;
  if (span_cum > 0 && span_target > 0) {
    const double factor = span_target / span_cum;
    for (std::size_t i = 0; i < fs_.size(); ++i) {
      fs_[i] = f_anchor + (fs_[i] - f_anchor) * factor;
    }
  }
  double running = 0.0;
  for (auto& f : fs_) {
    running = std::max(running, std::clamp(f, 0.0, 1.0));
    f = running;
  }

  // Fritsch-Carlson monotone cubic slopes.
  const std::size_t n = xs_.size();
  slopes_.assign(n, 0.0);
  std::vector<double> secant(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    secant[i] = (fs_[i + 1] - fs_[i]) / (xs_[i + 1] - xs_[i]);
  }
  slopes_[0] = secant[0];
  slopes_[n - 1] = secant[n - 2];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    slopes_[i] = (secant[i - 1] * secant[i] <= 0.0) ? 0.0 : 0.5 * (secant[i - 1] + secant[i]);
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (secant[i] == 0.0) {
      slopes_[i] = slopes_[i + 1] = 0.0;
      continue;
    }
    const double alpha = slopes_[i] / secant[i];
    const double beta = slopes_[i + 1] / secant[i];
    const double norm = alpha * alpha + beta * beta;
    if (norm > 9.0) {
      const double tau = 3.0 / std::sqrt(norm);
      slopes_[i] = tau * alpha * secant[i];
      slopes_[i + 1] = tau * beta * secant[i];
    }
  }
}

double CdfTable::cdf(double x) const {
  if (x <= xs_.front()) {
    if (tail_exponent_ > 0.0 && x < 0.0 && xs_.front() < 0.0) {
      return fs_.front() * std::pow(xs_.front() / x, tail_exponent_);
    }
    return fs_.front() * std::exp((x - xs_.front()) / scale_);
  }
  if (x >= xs_.back()) {
    return 1.0 - (1.0 - fs_.back()) * std::exp(-(x - xs_.back()) / scale_);
  }
  const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - xs_.begin()) - 1;
  const double h = xs_[i + 1] - xs_[i];
  const double t = (x - xs_[i]) / h;
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double h00 = 2 * t3 - 3 * t2 + 1;
  const double h10 = t3 - 2 * t2 + t;
  const double h01 = -2 * t3 + 3 * t2;
  const double h11 = t3 - t2;
  const double value =
      h00 * fs_[i] + h10 * h * slopes_[i] + h01 * fs_[i + 1] + h11 * h * slopes_[i + 1];
  return std::clamp(value, 0.0, 1.0);
}

}  // namespace coolwalk::inversion
