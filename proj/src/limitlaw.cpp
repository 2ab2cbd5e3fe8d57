#include "coolwalk/limitlaw.hpp"

#include <algorithm>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <mutex>

#include "coolwalk/errors.hpp"
#include "coolwalk/parallel.hpp"
#include "inversion.hpp"

namespace coolwalk {

namespace {

constexpr double kPi = 3.14159265358979323846;

// 15-point Gauss-Legendre on [-1,1]; used for the panelled CF integrals.
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

template <typename F>
double gl15(const F& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double acc = 0.0;
  for (int g = 0; g < 15; ++g) acc += kGlWeights[g] * f(mid + half * kGlNodes[g]);
  return acc * half;
}

// ut - sin(ut) without cancellation for small arguments.
double t_minus_sin(double y) {
  if (std::fabs(y) < 0.1) {
    const double y2 = y * y;
    return y * y2 / 6.0 * (1.0 - y2 / 20.0 * (1.0 - y2 / 42.0));
  }
  return y - std::sin(y);
}

}  // namespace

// --- LambdaDescriptor ---------------------------------------------------

LambdaDescriptor::LambdaDescriptor(double c, double s, AForm a)
    : c_(c), s_(s), a_(std::move(a)) {
  if (!(c_ > 0.0)) throw_invalid("levy density: c must be positive");
  if (!(s_ > 1.0) || !(s_ < 2.0)) throw_invalid("levy density: s must lie in (1,2)");
  support_ = 0.0;
  if (const auto* ramp = std::get_if<LinearRampA>(&a_)) {
    if (!(ramp->r > 0.0)) throw_invalid("levy density: ramp scale r must be positive");
    support_ = ramp->r;
  } else if (const auto* pw = std::get_if<PiecewiseLinearA>(&a_)) {
    if (pw->pieces.empty()) throw_invalid("levy density: piecewise a needs pieces");
    double h_sum = 0.0;
    for (const auto& [g, h] : pw->pieces) {
      if (!(g > 0.0) || !(h > 0.0)) throw_invalid("levy density: pieces need g,h > 0");
      h_sum += h;
      support_ = std::max(support_, h / g);
    }
    if (std::fabs(h_sum - 1.0) > 1e-9) throw_invalid("levy density: piece offsets must sum to 1");
  }
  // TabulatedGA is finalized by lambda_from_g.
}

LambdaDescriptor LambdaDescriptor::linear_ramp(double c, double s, double r) {
  return LambdaDescriptor(c, s, LinearRampA{r});
}

LambdaDescriptor LambdaDescriptor::piecewise_linear(double c, double s,
                                                    std::vector<std::pair<double, double>> pieces) {
  return LambdaDescriptor(c, s, PiecewiseLinearA{std::move(pieces)});
}

LambdaDescriptor lambda_from_g(const std::vector<double>& xs, const std::vector<double>& gs,
                               double tc, double v_mu, double s) {
  if (xs.size() != gs.size() || xs.size() < 2) {
    throw_invalid("lambda_from_g: need matching x/g arrays with at least two points");
  }
  if (!(tc > 0.0) || !(v_mu > 0.0)) throw_invalid("lambda_from_g: tc and v_mu must be positive");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0)) throw_invalid("lambda_from_g: grid must be positive");
    if (i > 0 && !(xs[i] > xs[i - 1])) throw_invalid("lambda_from_g: grid must increase");
    if (gs[i] < -1e-12 || (i > 0 && gs[i] < gs[i - 1] - 1e-12)) {
      throw_invalid("lambda_from_g: g must be non-negative and non-decreasing");
    }
  }
  const double g_inf = gs.back();
  if (g_inf > 1.0 + 1e-9) throw_invalid("lambda_from_g: g(inf) must lie in [0,1]");
  if (std::fabs(gs.back() - gs[gs.size() - 2]) > 1e-3) {
    throw_invalid("lambda_from_g: g is not flat at the end of the grid (cannot read g(inf))");
  }
  if (!(g_inf > 0.0)) {
    // g identically ~0: the tempered component vanishes. Callers handle this
    // branch (pure stable limit); there is no density to describe.
    throw_invalid("lambda_from_g: g(inf) = 0 gives a vanishing levy density");
  }

  LambdaDescriptor::TabulatedGA tab{xs, gs, tc, v_mu};
  LambdaDescriptor desc(tc * v_mu * s * g_inf, s, std::move(tab));
  desc.g_inf_ = g_inf;

  // Right-cumulative of g(xi)/xi^2 over the piecewise-linear interpolant with
  // the segment integrals taken exactly: int (alpha + beta xi)/xi^2 dxi =
  // -alpha/xi + beta log(xi). An implicit (0,0) anchor precedes the grid.
  const auto& txs = std::get<LambdaDescriptor::TabulatedGA>(desc.a_form()).xs;
  const auto& tgs = std::get<LambdaDescriptor::TabulatedGA>(desc.a_form()).gs;
  const std::size_t n = txs.size();
  desc.g_tail_integral_.assign(n, 0.0);
  // Tail beyond the grid: g == g_inf, integral g_inf / x.
  desc.g_tail_integral_[n - 1] = g_inf / txs[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) {
    const double beta = (tgs[i + 1] - tgs[i]) / (txs[i + 1] - txs[i]);
    const double alpha = tgs[i] - beta * txs[i];
    const double piece = (-alpha / txs[i + 1] + beta * std::log(txs[i + 1])) -
                         (-alpha / txs[i] + beta * std::log(txs[i]));
    desc.g_tail_integral_[i] = desc.g_tail_integral_[i + 1] + piece;
  }

  // Support: the profile goes exactly flat at x_flat, where the tempering
  // function hits zero.
  std::size_t flat = n - 1;
  while (flat > 0 && tgs[flat - 1] == tgs[n - 1]) --flat;
  desc.support_ = v_mu * txs[flat];
  return desc;
}

double LambdaDescriptor::a_at(double x) const {
  if (x > 0.0) throw_invalid("tempering function: defined for x <= 0");
  const double t = -x;
  if (const auto* ramp = std::get_if<LinearRampA>(&a_)) {
    return std::max(0.0, 1.0 - t / ramp->r);
  }
  if (const auto* pw = std::get_if<PiecewiseLinearA>(&a_)) {
    double acc = 0.0;
    for (const auto& [g, h] : pw->pieces) acc += std::max(0.0, h - g * t);
    return acc;
  }
  const auto& tab = std::get<TabulatedGA>(a_);
  if (t == 0.0) return 1.0;
  if (t >= support_) return 0.0;
  const double xq = t / tab.v_mu;
  // g(xq) and I(xq) = int_xq^inf g/xi^2 from the tabulation.
  double g_val, tail;
  const auto& txs = tab.xs;
  const auto& tgs = tab.gs;
  if (xq >= txs.back()) {
    g_val = g_inf_;
    tail = g_inf_ / xq;
  } else if (xq <= txs.front()) {
    const double beta = tgs.front() / txs.front();  // linear from the (0,0) anchor
    g_val = beta * xq;
    tail = g_tail_integral_.front() + beta * std::log(txs.front() / xq);
  } else {
    const auto it = std::upper_bound(txs.begin(), txs.end(), xq);
    const std::size_t i = static_cast<std::size_t>(it - txs.begin()) - 1;
    const double beta = (tgs[i + 1] - tgs[i]) / (txs[i + 1] - txs[i]);
    const double alpha = tgs[i] - beta * txs[i];
    g_val = alpha + beta * xq;
    const double partial = (-alpha / txs[i + 1] + beta * std::log(txs[i + 1])) -
                           (-alpha / xq + beta * std::log(xq));
    tail = g_tail_integral_[i + 1] + partial;
  }
  const double tvs = tab.tc * tab.v_mu * s_;
  const double value = tvs * g_inf_ - tab.tc * tab.v_mu * g_val - tab.tc * (s_ - 1.0) * t * tail;
  return std::max(0.0, value / c_);
}

double LambdaDescriptor::density_neg(double t) const {
  if (!(t > 0.0)) throw_invalid("levy density: defined for t > 0");
  if (support_ > 0.0 && t >= support_) return 0.0;
  return c_ * std::pow(t, -s_ - 1.0) * a_at(-t);
}

double stable_b_from_ramp_c(double c, double s) {
  return -c * std::tgamma(-s) * std::cos(kPi * s / 2.0);
}

// --- characteristic functions --------------------------------------------

namespace {

std::complex<double> gaussian_exponent(double sigma, double u) {
  return {-0.5 * sigma * sigma * u * u, 0.0};
}

std::complex<double> stable_exponent(const StableLaw& law, double u) {
  if (u == 0.0) return {0.0, 0.0};
  const double au = std::fabs(u);
  const double mag = law.b * std::pow(au, law.s);
  const double skew = std::tan(law.s * kPi / 2.0) * (u > 0 ? 1.0 : -1.0);
  return {-mag, -mag * skew};
}

// int_0^T (e^{-iut} - 1 + iut) lambda(-t) dt for u >= 0, by a compensated
// tanh-sinh piece near zero plus half-period panels across the oscillatory
// range. Real part uses cos(ut)-1 = -2 sin^2(ut/2).
std::complex<double> tempered_exponent_nonneg(const LambdaDescriptor& lambda, double u) {
  if (u == 0.0) return {0.0, 0.0};
  double t_max = lambda.support();
  if (!(t_max > 0.0) || !std::isfinite(t_max)) {
    // Unbounded tempering support: truncate where the density no longer
    // contributes at double precision.
    t_max = std::pow(lambda.c() * 1e18, 1.0 / lambda.s());
  }
  const double t_break = std::min(t_max, 1.0 / u);

  static thread_local boost::math::quadrature::tanh_sinh<double> ts(12);
  auto compensated_re = [&](double t) {
    if (t <= 0.0) return 0.0;
    const double sn = std::sin(0.5 * u * t);
    return -2.0 * sn * sn * lambda.density_neg(t);
  };
  auto compensated_im = [&](double t) {
    if (t <= 0.0) return 0.0;
    return t_minus_sin(u * t) * lambda.density_neg(t);
  };
  double re = ts.integrate(compensated_re, 0.0, t_break, 1e-10);
  double im = ts.integrate(compensated_im, 0.0, t_break, 1e-10);

  if (t_break < t_max) {
    // Oscillatory remainder, split as (cos - 1) and (ut - sin).
    auto dens = [&](double t) { return lambda.density_neg(t); };
    const double period = kPi / u;
    double lo = t_break;
    double cos_part = 0.0, sin_part = 0.0, mass = 0.0, first_moment = 0.0;
    while (lo < t_max) {
      const double hi = std::min(t_max, lo + period);
      cos_part += gl15([&](double t) { return std::cos(u * t) * dens(t); }, lo, hi);
      sin_part += gl15([&](double t) { return std::sin(u * t) * dens(t); }, lo, hi);
      mass += gl15(dens, lo, hi);
      first_moment += gl15([&](double t) { return t * dens(t); }, lo, hi);
      lo = hi;
    }
    re += cos_part - mass;
    im += u * first_moment - sin_part;
  }
  return {re, im};
}

std::complex<double> tempered_exponent(const LambdaDescriptor& lambda, double u) {
  if (u >= 0.0) return tempered_exponent_nonneg(lambda, u);
  return std::conj(tempered_exponent_nonneg(lambda, -u));
}

}  // namespace

// --- tempered sampler -----------------------------------------------------

namespace {

// Compensated compound Poisson with the small-jump remainder replaced by its
// matching Gaussian. Jumps above the cut are drawn from a quantile table over
// a dense log grid; the top tail is inverted segment-exactly.
struct TemperedSampler {
  double lambda_total = 0.0;  // Poisson intensity of jumps below -epsilon
  double drift = 0.0;         // int_{t>eps} t lambda(-t) dt (compensator)
  double sigma_small = 0.0;   // sqrt(int_{t<eps} t^2 lambda(-t) dt)
  double u_split = 1.0;
  std::vector<double> quantile;  // jump size at u = i/M * u_split
  std::vector<double> knot_t, knot_cum;

  void build(const LambdaDescriptor& lambda, double epsilon) {
    double t_max = lambda.support();
    if (!(t_max > 0.0) || !std::isfinite(t_max)) {
      t_max = std::pow(lambda.c() * 1e18, 1.0 / lambda.s());
    }
    if (!(epsilon > 0.0) || epsilon >= t_max) {
      throw_invalid("tempered sampler: small-jump cut outside the density support");
    }
    const int knots = 16384;
    knot_t.resize(knots + 1);
    knot_cum.resize(knots + 1);
    const double ratio = t_max / epsilon;
    double drift_acc = 0.0;
    knot_t[0] = epsilon;
    knot_cum[0] = 0.0;
    auto dens = [&](double t) { return lambda.density_neg(t); };
    for (int i = 1; i <= knots; ++i) {
      const double t0 = knot_t[i - 1];
      const double t1 = epsilon * std::pow(ratio, static_cast<double>(i) / knots);
      knot_t[i] = t1;
      knot_cum[i] = knot_cum[i - 1] + gl15(dens, t0, t1);
      drift_acc += gl15([&](double t) { return t * dens(t); }, t0, t1);
    }
    lambda_total = knot_cum.back();
    drift = drift_acc;

    // Small-jump variance: analytic head (a ~ 1 near zero) plus quadrature.
    const double head = epsilon * 1e-6;
    double var = lambda.c() * std::pow(head, 2.0 - lambda.s()) / (2.0 - lambda.s());
    var += ts_small().integrate([&](double t) { return t * t * dens(t); }, head, epsilon, 1e-10);
    sigma_small = std::sqrt(std::max(0.0, var));

    // Quantile table for the bulk; the top 2^-8 of mass is solved exactly.
    u_split = 1.0 - 1.0 / 256.0;
    const int table = 65536;
    quantile.resize(table + 1);
    std::size_t seg = 0;
    for (int i = 0; i <= table; ++i) {
      const double target = lambda_total * u_split * static_cast<double>(i) / table;
      while (seg + 1 < knot_cum.size() && knot_cum[seg + 1] < target) ++seg;
      quantile[i] = invert_segment(seg, target);
    }
  }

  static boost::math::quadrature::tanh_sinh<double>& ts_small() {
    static thread_local boost::math::quadrature::tanh_sinh<double> ts(12);
    return ts;
  }

  // Solve cum(t) = target inside knot segment `seg` with the density treated
  // as linear across the segment (the knots are dense enough that the
  // quadratic solve is accurate to ~1e-7 relative).
  double invert_segment(std::size_t seg, double target) const {
    const double t0 = knot_t[seg];
    const double t1 = knot_t[seg + 1];
    const double c0 = knot_cum[seg];
    const double c1 = knot_cum[seg + 1];
    if (c1 <= c0) return t0;
    const double frac = (target - c0) / (c1 - c0);
    return t0 + (t1 - t0) * std::clamp(frac, 0.0, 1.0);
  }

  double draw_jump(RandomStream& rng) const {
    const double u = rng.uniform();
    if (u <= u_split) {
      const double pos = u / u_split * (quantile.size() - 1);
      const std::size_t j = std::min<std::size_t>(static_cast<std::size_t>(pos),
                                                  quantile.size() - 2);
      const double frac = pos - static_cast<double>(j);
      return quantile[j] * (1.0 - frac) + quantile[j + 1] * frac;
    }
    const double target = lambda_total * u;
    auto it = std::upper_bound(knot_cum.begin(), knot_cum.end(), target);
    std::size_t seg = std::min<std::size_t>(
        static_cast<std::size_t>(it - knot_cum.begin()), knot_cum.size() - 1);
    seg = seg > 0 ? seg - 1 : 0;
    return invert_segment(seg, target);
  }

  double sample(RandomStream& rng) const {
    const std::int64_t n = rng.poisson(lambda_total);
    double sum = 0.0;
    for (std::int64_t i = 0; i < n; ++i) sum += draw_jump(rng);
    return -sum + drift + sigma_small * rng.normal();
  }
};

double sample_stable(const StableLaw& law, RandomStream& rng) {
  // Chambers-Mallows-Stuck for total left skew (beta = -1), alpha in (1,2).
  const double alpha = law.s;
  const double beta = -1.0;
  const double tan_half = std::tan(alpha * kPi / 2.0);
  const double theta0 = std::atan(beta * tan_half) / alpha;
  const double prefactor = std::pow(1.0 + beta * beta * tan_half * tan_half, 0.5 / alpha);
  const double v = kPi * (rng.uniform() - 0.5);
  double w = rng.exponential();
  while (w == 0.0) w = rng.exponential();
  const double y = prefactor * std::sin(alpha * (v + theta0)) /
                   std::pow(std::cos(v), 1.0 / alpha) *
                   std::pow(std::cos(v - alpha * (v + theta0)) / w, (1.0 - alpha) / alpha);
  return std::pow(law.b, 1.0 / alpha) * y;
}

}  // namespace

// --- LimitLaw --------------------------------------------------------------

struct LimitLaw::Impl {
  Variant variant;
  double small_jump_cut = 0.0;  // 0: default 1e-3 c^{1/s}

  std::mutex mutex;
  std::unique_ptr<inversion::CdfTable> cdf_table;
  std::unique_ptr<TemperedSampler> tempered_sampler;  // for TemperedStableLaw
  std::unique_ptr<TemperedSampler> mixture_w_sampler; // for MixtureLaw

  std::complex<double> cf(double u) const {
    if (const auto* g = std::get_if<GaussianLaw>(&variant)) {
      return std::exp(gaussian_exponent(g->sigma, u));
    }
    if (const auto* st = std::get_if<StableLaw>(&variant)) {
      return std::exp(stable_exponent(*st, u));
    }
    if (const auto* tp = std::get_if<TemperedStableLaw>(&variant)) {
      return std::exp(tempered_exponent(tp->lambda, u));
    }
    const auto& mix = std::get<MixtureLaw>(variant);
    std::complex<double> e = gaussian_exponent(mix.a1, u);  // a1 * N(0,1)
    if (mix.a2 > 0.0) e += tempered_exponent(mix.lambda, mix.a2 * u);
    if (mix.a3 > 0.0) e += stable_exponent(mix.stable, mix.a3 * u);
    return std::exp(e);
  }

  double heavy_tail_exponent() const {
    if (const auto* st = std::get_if<StableLaw>(&variant)) return st->s;
    if (const auto* tp = std::get_if<TemperedStableLaw>(&variant)) return tp->lambda.s();
    if (const auto* mix = std::get_if<MixtureLaw>(&variant)) {
      if (mix->a3 > 0.0) return mix->stable.s;
      if (mix->a2 > 0.0) return mix->lambda.s();
    }
    return 0.0;
  }

  bool closed_form_cf() const {
    if (std::holds_alternative<GaussianLaw>(variant) || std::holds_alternative<StableLaw>(variant))
      return true;
    if (const auto* mix = std::get_if<MixtureLaw>(&variant)) return mix->a2 == 0.0;
    return false;
  }

  const inversion::CdfTable& table() {
    std::lock_guard<std::mutex> lock(mutex);
    if (!cdf_table) {
      const int nodes = closed_form_cf() ? 32768 : 8192;
      cdf_table = std::make_unique<inversion::CdfTable>(
          [this](double u) { return cf(u); }, nodes, heavy_tail_exponent());
    }
    return *cdf_table;
  }

  const TemperedSampler& sampler_for(const LambdaDescriptor& lambda,
                                     std::unique_ptr<TemperedSampler>& slot) {
    std::lock_guard<std::mutex> lock(mutex);
    if (!slot) {
      double eps = small_jump_cut;
      if (!(eps > 0.0)) eps = 1e-3 * std::pow(lambda.c(), 1.0 / lambda.s());
      auto built = std::make_unique<TemperedSampler>();
      built->build(lambda, eps);
      slot = std::move(built);
    }
    return *slot;
  }

  double sample(RandomStream& rng) {
    if (const auto* g = std::get_if<GaussianLaw>(&variant)) return g->sigma * rng.normal();
    if (const auto* st = std::get_if<StableLaw>(&variant)) return sample_stable(*st, rng);
    if (const auto* tp = std::get_if<TemperedStableLaw>(&variant)) {
      return sampler_for(tp->lambda, tempered_sampler).sample(rng);
    }
    const auto& mix = std::get<MixtureLaw>(variant);
    double x = mix.a1 * rng.normal();
    if (mix.a2 > 0.0) x += mix.a2 * sampler_for(mix.lambda, mixture_w_sampler).sample(rng);
    if (mix.a3 > 0.0) x += mix.a3 * sample_stable(mix.stable, rng);
    return x;
  }
};

LimitLaw::LimitLaw(Variant v) : impl_(std::make_shared<Impl>()) { impl_->variant = std::move(v); }

LimitLaw LimitLaw::gaussian(double sigma) {
  if (!(sigma > 0.0)) throw_invalid("gaussian law: sigma must be positive");
  return LimitLaw(GaussianLaw{sigma});
}

LimitLaw LimitLaw::stable(double s, double b) {
  if (!(s > 1.0) || !(s < 2.0)) throw_invalid("stable law: s must lie in (1,2)");
  if (!(b > 0.0)) throw_invalid("stable law: b must be positive");
  return LimitLaw(StableLaw{s, b});
}

LimitLaw LimitLaw::tempered(LambdaDescriptor lambda) {
  return LimitLaw(TemperedStableLaw{std::move(lambda)});
}

LimitLaw LimitLaw::mixture(double a1, double a2, double a3, LambdaDescriptor lambda,
                           StableLaw stable) {
  if (a1 < 0.0 || a2 < 0.0 || a3 < 0.0 || (a1 == 0.0 && a2 == 0.0 && a3 == 0.0)) {
    throw_invalid("mixture law: coefficients must be non-negative and not all zero");
  }
  if (!(stable.s > 1.0) || !(stable.s < 2.0) || !(stable.b > 0.0)) {
    throw_invalid("mixture law: invalid stable component");
  }
  return LimitLaw(MixtureLaw{a1, a2, a3, std::move(lambda), stable});
}

const LimitLaw::Variant& LimitLaw::variant() const { return impl_->variant; }

std::complex<double> LimitLaw::cf(double u) const { return impl_->cf(u); }

double LimitLaw::cdf(double x) const { return impl_->table().cdf(x); }

double LimitLaw::sample(RandomStream& rng) const { return impl_->sample(rng); }

std::vector<double> LimitLaw::sample_many(std::uint64_t master_seed, std::size_t count,
                                          int threads) const {
  std::vector<double> out(count);
  // Force one-time table builds before the workers share them.
  {
    RandomStream warmup(master_seed);
    if (count > 0) impl_->sample(warmup);
  }
  parallel_for(threads, static_cast<std::int64_t>(count),
               [&](std::int64_t begin, std::int64_t end) {
                 for (std::int64_t i = begin; i < end; ++i) {
                   RandomStream rng =
                       RandomStream::substream(master_seed, static_cast<std::uint64_t>(i));
                   out[static_cast<std::size_t>(i)] = impl_->sample(rng);
                 }
               });
  return out;
}

void LimitLaw::set_small_jump_cut(double epsilon) {
  if (!(epsilon > 0.0)) throw_invalid("small-jump cut must be positive");
  std::lock_guard<std::mutex> lock(impl_->mutex);
  if (impl_->tempered_sampler || impl_->mixture_w_sampler) {
    throw_invalid("small-jump cut must be set before sampling");
  }
  impl_->small_jump_cut = epsilon;
}

}  // namespace coolwalk
