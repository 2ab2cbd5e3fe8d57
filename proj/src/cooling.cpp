#include "coolwalk/cooling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "coolwalk/errors.hpp"

namespace coolwalk {

namespace {

constexpr std::int64_t kIncrementCap = std::int64_t{1} << 62;

std::int64_t checked_round(double value, const char* what) {
  if (!(value < static_cast<double>(kIncrementCap))) {
    throw_budget(std::string(what) + ": increment exceeds the integer budget");
  }
  return static_cast<std::int64_t>(std::llround(value));
}

// Sequential generator over a map's increments. Interweavings need the
// selection history, so generation is stateful even though maps are pure.
class Generator {
 public:
  explicit Generator(const CoolingMap& map) : map_(map) {
    if (const auto* iw = std::get_if<InterweaveSpec>(&map.spec())) {
      for (const auto& c : iw->components) subs_.emplace_back(c);
      counts_.assign(iw->components.size(), 0);
      if (const auto* prop = std::get_if<ProportionalRule>(&iw->selection)) {
        theta_ = prop->theta;
        double used = 0.0;
        for (std::size_t i = 0; i + 1 < theta_.size(); ++i) used += theta_[i];
        theta_.back() = 1.0 - used;  // remainder to last
      }
    }
  }

  std::int64_t next() {
    ++k_;
    return increment_for(k_);
  }

 private:
  std::int64_t increment_for(std::int64_t k) {
    const auto& spec = map_.spec();
    if (const auto* ex = std::get_if<ExplicitSpec>(&spec)) {
      if (k > static_cast<std::int64_t>(ex->increments.size())) {
        throw_invalid("explicit cooling map exhausted at k=" + std::to_string(k));
      }
      return ex->increments[static_cast<std::size_t>(k - 1)];
    }
    if (const auto* poly = std::get_if<PolynomialSpec>(&spec)) {
      double v = poly->A * std::pow(static_cast<double>(k), poly->a_exp);
      return std::max<std::int64_t>(1, checked_round(v, "polynomial map"));
    }
    if (const auto* sg = std::get_if<SparseGeometricSpec>(&spec)) {
      if ((k & (k - 1)) == 0 && k >= 2) {
        int j = 0;
        for (std::int64_t v = k; v > 1; v >>= 1) ++j;
        double t = std::floor(std::pow(sg->r, static_cast<double>(j)));
        return std::max<std::int64_t>(1, checked_round(t, "sparse geometric map"));
      }
      return 1;
    }
    if (const auto* dy = std::get_if<DyadicExoticSpec>(&spec)) {
      // Block j holds k in (n_{j-1}, n_j], n_j = 2^{2^j}; j=0 covers k <= 2.
      int j = 0;
      double nj = 2.0;
      while (static_cast<double>(k) > nj) {
        ++j;
        if (j > 5) throw_budget("dyadic exotic map: block index exceeds the integer budget");
        nj = std::pow(2.0, std::pow(2.0, j));
      }
      const double expo = (2.0 - dy->s) / (dy->s - 1.0);
      double t = std::ceil(static_cast<double>(k) * std::pow(nj, expo));
      return std::max<std::int64_t>(1, checked_round(t, "dyadic exotic map"));
    }
    const auto& iw = std::get<InterweaveSpec>(spec);
    const std::size_t i = select(iw, k);
    ++counts_[i];
    return subs_[i].next();
  }

  std::size_t select(const InterweaveSpec& iw, std::int64_t k) {
    if (std::holds_alternative<ProportionalRule>(iw.selection)) {
      std::size_t best = 0;
      double best_deficit = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < counts_.size(); ++i) {
        double deficit = theta_[i] * static_cast<double>(k) - static_cast<double>(counts_[i]);
        if (deficit > best_deficit + 1e-12) {
          best_deficit = deficit;
          best = i;
        }
      }
      return best;
    }
    const auto& rule = std::get<PowerSkewedRule>(iw.selection);
    for (std::size_t i = 0; i + 1 < counts_.size(); ++i) {
      double target = rule.theta[i] * std::pow(static_cast<double>(k), rule.gamma[i]);
      if (static_cast<double>(counts_[i]) < target) return i;
    }
    return counts_.size() - 1;
  }

  CoolingMap map_;
  std::int64_t k_ = 0;
  std::vector<Generator> subs_;
  std::vector<std::int64_t> counts_;
  std::vector<double> theta_;
};

}  // namespace

CoolingMap::CoolingMap(Spec spec) : spec_(std::make_shared<const Spec>(std::move(spec))) {}

CoolingMap CoolingMap::explicit_list(std::vector<std::int64_t> increments) {
  if (increments.empty()) throw_invalid("explicit cooling map: empty increment list");
  for (auto t : increments) {
    if (t < 1) throw_invalid("explicit cooling map: increments must be >= 1");
  }
  return CoolingMap(ExplicitSpec{std::move(increments)});
}

CoolingMap CoolingMap::polynomial(double A, double a_exp) {
  if (!(A > 0.0)) throw_invalid("polynomial cooling map: A must be positive");
  if (!(a_exp > 0.0)) throw_invalid("polynomial cooling map: exponent must be positive");
  return CoolingMap(PolynomialSpec{A, a_exp});
}

CoolingMap CoolingMap::sparse_geometric(double r) {
  if (!(r > 1.0)) throw_invalid("sparse geometric cooling map: r must exceed 1");
  return CoolingMap(SparseGeometricSpec{r});
}

CoolingMap CoolingMap::dyadic_exotic(double s) {
  if (!(s > 1.0) || !(s < 2.0)) throw_invalid("dyadic exotic cooling map: s must lie in (1,2)");
  return CoolingMap(DyadicExoticSpec{s});
}

CoolingMap CoolingMap::interweave(std::vector<CoolingMap> components, SelectionRule selection) {
  if (components.size() < 1) throw_invalid("interweave: needs at least one component");
  if (const auto* prop = std::get_if<ProportionalRule>(&selection)) {
    if (prop->theta.size() != components.size()) {
      throw_invalid("interweave: theta length must match component count");
    }
    double sum = 0.0;
    for (double t : prop->theta) {
      if (!(t > 0.0)) throw_invalid("interweave: theta entries must be positive");
      sum += t;
    }
    if (sum > 1.0 + 1e-9) throw_invalid("interweave: theta entries must sum to at most 1");
  } else {
    const auto& rule = std::get<PowerSkewedRule>(selection);
    if (rule.theta.size() != components.size() || rule.gamma.size() != components.size()) {
      throw_invalid("interweave: power-skewed rule needs theta and gamma per component");
    }
    for (std::size_t i = 0; i + 1 < rule.gamma.size(); ++i) {
      if (!(rule.theta[i] > 0.0) || !(rule.gamma[i] > 0.0) || rule.gamma[i] > 1.0) {
        throw_invalid("interweave: power-skewed targets need theta>0 and gamma in (0,1]");
      }
    }
  }
  return CoolingMap(InterweaveSpec{std::move(components), std::move(selection)});
}

std::int64_t CoolingMap::max_length() const {
  if (const auto* ex = std::get_if<ExplicitSpec>(&*spec_)) {
    return static_cast<std::int64_t>(ex->increments.size());
  }
  return std::numeric_limits<std::int64_t>::max();
}

CoolingMap finmix_map(const std::vector<std::pair<double, double>>& gh_pairs, double s,
                      double v_mu) {
  if (gh_pairs.empty()) throw_invalid("finmix: needs at least one (g,h) piece");
  if (!(s > 1.0) || !(s < 2.0)) throw_invalid("finmix: s must lie in (1,2)");
  if (!(v_mu > 0.0)) throw_invalid("finmix: v_mu must be positive");
  double g_sum = 0.0, h_sum = 0.0;
  for (const auto& [g, h] : gh_pairs) {
    if (!(g > 0.0) || !(h > 0.0)) throw_invalid("finmix: g_i and h_i must be positive");
    g_sum += g;
    h_sum += h;
  }
  if (std::fabs(h_sum - 1.0) > 1e-9) throw_invalid("finmix: h_i must sum to 1");

  const double crit = 1.0 / (s - 1.0);
  const double front = std::pow((s - 1.0) / s, crit);
  std::vector<CoolingMap> components;
  std::vector<double> theta;
  for (const auto& [g, h] : gh_pairs) {
    const double A = front * h / (std::pow(v_mu, s * crit) * std::pow(g, s * crit));
    components.push_back(CoolingMap::polynomial(A, crit));
    theta.push_back(g / g_sum);
  }
  return CoolingMap::interweave(std::move(components), ProportionalRule{std::move(theta)});
}

CoolingPrefix::CoolingPrefix(const CoolingMap& map, std::int64_t n) {
  if (n < 1) throw_invalid("cooling prefix: n must be >= 1");
  if (n > map.max_length()) throw_invalid("cooling prefix: n exceeds the map's length");
  t_.reserve(static_cast<std::size_t>(n));
  tau_.reserve(static_cast<std::size_t>(n) + 1);
  tau_.push_back(0);
  Generator gen(map);
  std::int64_t total = 0;
  for (std::int64_t k = 0; k < n; ++k) {
    const std::int64_t inc = gen.next();
    if (total > kIncrementCap - inc) throw_budget("cooling prefix: tau exceeds the integer budget");
    total += inc;
    t_.push_back(inc);
    tau_.push_back(total);
  }
}

CoolingPrefix::Location CoolingPrefix::locate(std::int64_t m) const {
  if (m < 0 || m > tau_.back()) throw_invalid("locate: m outside [0, tau(n)]");
  auto it = std::upper_bound(tau_.begin(), tau_.end(), m);
  const std::int64_t ell = static_cast<std::int64_t>(it - tau_.begin()) - 1;
  return Location{ell, m - tau_[static_cast<std::size_t>(ell)]};
}

std::vector<double> empirical_g(const CoolingPrefix& prefix, const std::vector<double>& x_grid,
                                double s) {
  if (prefix.size() < 1) throw_invalid("empirical_g: empty prefix");
  std::vector<double> sorted(prefix.increments().begin(), prefix.increments().end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> cumulative(sorted.size() + 1, 0.0);
  for (std::size_t i = 0; i < sorted.size(); ++i) cumulative[i + 1] = cumulative[i] + sorted[i];

  const double tau_n = static_cast<double>(prefix.tau(prefix.size()));
  const double scale = std::pow(tau_n, 1.0 / s);
  std::vector<double> out;
  out.reserve(x_grid.size());
  for (double x : x_grid) {
    if (!(x > 0.0)) throw_invalid("empirical_g: grid points must be positive");
    auto it = std::lower_bound(sorted.begin(), sorted.end(), x * scale);
    out.push_back(cumulative[static_cast<std::size_t>(it - sorted.begin())] / tau_n);
  }
  return out;
}

namespace {

// Log-log least-squares slope; pairs with non-positive y are skipped.
// Returns {slope, number of usable points}.
std::pair<double, int> loglog_slope(const std::vector<std::int64_t>& ns,
                                    const std::vector<double>& ys) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (!(ys[i] > 0.0)) continue;
    const double x = std::log(static_cast<double>(ns[i]));
    const double y = std::log(ys[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m < 2) return {0.0, m};
  const double denom = m * sxx - sx * sx;
  return {(m * sxy - sx * sy) / denom, m};
}

}  // namespace

const char* to_string(ConditionVerdict v) {
  switch (v) {
    case ConditionVerdict::GaussianCondition: return "gaussian";
    case ConditionVerdict::S1Condition: return "s1";
    case ConditionVerdict::S2Condition: return "s2";
    default: return "none";
  }
}

ConditionReport check_conditions(const CoolingMap& map, const std::vector<std::int64_t>& n_grid,
                                 double s, const ConditionOptions& options) {
  if (n_grid.empty()) throw_invalid("check_conditions: empty n grid");
  for (std::size_t i = 1; i < n_grid.size(); ++i) {
    if (n_grid[i] <= n_grid[i - 1]) throw_invalid("check_conditions: n grid must increase");
  }
  const std::int64_t n_max = n_grid.back();
  CoolingPrefix prefix(map, n_max);

  ConditionReport report;
  report.m_thresholds = options.m_thresholds;

  double sum_pow_3ms = 0.0;   // sum T_k^{3-s}
  double sum_pow_inv_s = 0.0; // sum T_k^{1/s}
  std::vector<double> sum_small(options.m_thresholds.size(), 0.0);
  std::int64_t max_t = 0;
  double max_s2_numerator = 0.0;
  std::size_t next_grid = 0;

  for (std::int64_t k = 1; k <= n_max; ++k) {
    const std::int64_t t = prefix.increment(k);
    const double td = static_cast<double>(t);
    sum_pow_3ms += std::pow(td, 3.0 - s);
    const double t_inv_s = std::pow(td, 1.0 / s);
    sum_pow_inv_s += t_inv_s;
    for (std::size_t j = 0; j < options.m_thresholds.size(); ++j) {
      if (t < options.m_thresholds[j]) sum_small[j] += t_inv_s;
    }
    max_t = std::max(max_t, t);
    if (t > 1) {
      max_s2_numerator = std::max(max_s2_numerator, td * std::pow(std::log(td), 4.0 * s));
    } else {
      max_s2_numerator = std::max(max_s2_numerator, 0.0);
    }
    if (next_grid < n_grid.size() && k == n_grid[next_grid]) {
      const double tau = static_cast<double>(prefix.tau(k));
      ConditionRow row;
      row.n = k;
      row.gauss_stat = static_cast<double>(max_t) / std::sqrt(sum_pow_3ms);
      row.s1_sum = sum_pow_inv_s / std::pow(tau, 1.0 / s);
      for (double v : sum_small) row.s1_small.push_back(v / std::pow(tau, 1.0 / s));
      row.s2_stat = max_s2_numerator / tau;
      report.rows.push_back(std::move(row));
      ++next_grid;
    }
  }

  std::vector<double> gauss_ys, s1_ys, s2_ys;
  for (const auto& row : report.rows) {
    gauss_ys.push_back(row.gauss_stat);
    s1_ys.push_back(row.s1_sum);
    s2_ys.push_back(row.s2_stat);
  }
  const double band = options.slope_dead_band;
  report.gauss_slope = loglog_slope(n_grid, gauss_ys).first;
  report.s1_sum_slope = loglog_slope(n_grid, s1_ys).first;
  report.s2_slope = loglog_slope(n_grid, s2_ys).first;

  report.gauss_holds = report.gauss_slope < -band;
  report.s2_holds = report.s2_slope < -band;
  bool small_vanish = true;
  for (std::size_t j = 0; j < options.m_thresholds.size(); ++j) {
    std::vector<double> ys;
    for (const auto& row : report.rows) ys.push_back(row.s1_small[j]);
    auto [slope, usable] = loglog_slope(n_grid, ys);
    report.s1_small_slopes.push_back(usable < 2 ? -std::numeric_limits<double>::infinity()
                                                : slope);
    // An identically (near-)zero restricted sum vanishes trivially.
    if (usable >= 2 && !(slope < -band)) small_vanish = false;
  }
  report.s1_holds = (report.s1_sum_slope < band) && small_vanish;

  if (report.gauss_holds) {
    report.verdict = ConditionVerdict::GaussianCondition;
  } else if (report.s1_holds) {
    report.verdict = ConditionVerdict::S1Condition;
  } else if (report.s2_holds) {
    report.verdict = ConditionVerdict::S2Condition;
  } else {
    report.verdict = ConditionVerdict::None;
  }

  report.g_x_grid = options.g_x_grid;
  report.g_values = empirical_g(prefix, report.g_x_grid, s);
  report.g_sup = report.g_values.empty() ? 0.0
                                         : *std::max_element(report.g_values.begin(),
                                                             report.g_values.end());
  return report;
}

}  // namespace coolwalk
