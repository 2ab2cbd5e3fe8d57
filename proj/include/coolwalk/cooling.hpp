#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace coolwalk {

class CoolingMap;

// Deterministic rules selecting which component map supplies the next
// increment of an interweaving.
struct ProportionalRule {
  // Target M_{n,i} ~ theta_i * n; theta_i > 0, sum <= 1, remainder to last.
  std::vector<double> theta;
};
struct PowerSkewedRule {
  // Target M_{n,i} ~ theta_i * n^{gamma_i} for i < last; the last component
  // absorbs the remaining steps. Greedy: pick the first component behind its
  // target.
  std::vector<double> theta;
  std::vector<double> gamma;
};
using SelectionRule = std::variant<ProportionalRule, PowerSkewedRule>;

struct ExplicitSpec {
  std::vector<std::int64_t> increments;
};
struct PolynomialSpec {
  double A;
  double a_exp;  // T_k = max(1, round(A * k^a_exp))
};
struct SparseGeometricSpec {
  double r;  // T_{2^j} = floor(r^j), T_k = 1 otherwise
};
struct DyadicExoticSpec {
  // T_k = ceil(k * n_j^{(2-s)/(s-1)}) for n_{j-1} < k <= n_j, n_j = 2^{2^j}.
  double s;
};
struct InterweaveSpec {
  std::vector<CoolingMap> components;
  SelectionRule selection;
};

// A cooling increment sequence T_1, T_2, ... (all integers >= 1). Maps are
// pure: the prefix generated for a given map is deterministic and
// prefix-consistent. Immutable and cheap to copy.
class CoolingMap {
 public:
  using Spec = std::variant<ExplicitSpec, PolynomialSpec, SparseGeometricSpec, DyadicExoticSpec,
                            InterweaveSpec>;

  static CoolingMap explicit_list(std::vector<std::int64_t> increments);
  static CoolingMap polynomial(double A, double a_exp);
  static CoolingMap sparse_geometric(double r);
  static CoolingMap dyadic_exotic(double s);
  static CoolingMap interweave(std::vector<CoolingMap> components, SelectionRule selection);

  const Spec& spec() const { return *spec_; }

  // Longest prefix this map can generate (INT64_MAX when unbounded).
  std::int64_t max_length() const;

 private:
  explicit CoolingMap(Spec spec);
  std::shared_ptr<const Spec> spec_;
};

// Critical-polynomial interweaving realizing a piecewise-linear tempering
// function a(x) = sum_i (g_i x + h_i)_+ : one critical map per piece with
//   theta_i = g_i / sum_j g_j,
//   A_i = ((s-1)/s)^{1/(s-1)} h_i / (v^{s/(s-1)} g_i^{s/(s-1)}).
// Requires g_i, h_i > 0 and sum h_i = 1.
CoolingMap finmix_map(const std::vector<std::pair<double, double>>& gh_pairs, double s,
                      double v_mu);

// Materialized prefix T_1..T_n with cumulative sums tau(0..n).
class CoolingPrefix {
 public:
  CoolingPrefix(const CoolingMap& map, std::int64_t n);

  std::int64_t size() const { return static_cast<std::int64_t>(t_.size()); }
  std::int64_t increment(std::int64_t k) const { return t_[static_cast<std::size_t>(k - 1)]; }  // 1-based
  std::int64_t tau(std::int64_t k) const { return tau_[static_cast<std::size_t>(k)]; }          // tau(0)=0
  const std::vector<std::int64_t>& increments() const { return t_; }

  struct Location {
    std::int64_t ell;    // completed pieces by time m
    std::int64_t t_bar;  // m - tau(ell)
  };
  // Requires 0 <= m <= tau(n). O(log n).
  Location locate(std::int64_t m) const;

 private:
  std::vector<std::int64_t> t_;
  std::vector<std::int64_t> tau_;
};

// Mass fraction of increments below scale x * tau(n)^{1/s}:
//   sum_{k<=n} T_k 1{T_k < x tau(n)^{1/s}} / tau(n)  per grid point x.
// Values lie in [0,1] and are non-decreasing in x.
std::vector<double> empirical_g(const CoolingPrefix& prefix, const std::vector<double>& x_grid,
                                double s);

// Finite-n diagnostics for the regularity conditions deciding which limit
// family a map produces. Verdicts are trend-based diagnostics, not proofs.
enum class ConditionVerdict { GaussianCondition, S1Condition, S2Condition, None };

struct ConditionRow {
  std::int64_t n;
  double gauss_stat;            // sup_{k<=n} T_k / (sum T_k^{3-s})^{1/2}
  double s1_sum;                // sum T_k^{1/s} / tau(n)^{1/s}
  std::vector<double> s1_small; // same restricted to T_k < m, per configured m
  double s2_stat;               // max_{k<=n} T_k (log T_k)^{4s} / tau(n)
};

struct ConditionReport {
  std::vector<std::int64_t> m_thresholds;
  std::vector<ConditionRow> rows;
  double gauss_slope;
  double s1_sum_slope;
  std::vector<double> s1_small_slopes;
  double s2_slope;
  bool gauss_holds;
  bool s1_holds;
  bool s2_holds;
  ConditionVerdict verdict;
  // Empirical g at the largest grid n, on a fixed x-grid; g_sup distinguishes
  // a vanishing g (pure stable) from a non-trivial tempered component.
  std::vector<double> g_x_grid;
  std::vector<double> g_values;
  double g_sup;
};

struct ConditionOptions {
  std::vector<std::int64_t> m_thresholds = {2, 8, 32};
  double slope_dead_band = 0.05;
  std::vector<double> g_x_grid = {0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
};

ConditionReport check_conditions(const CoolingMap& map, const std::vector<std::int64_t>& n_grid,
                                 double s, const ConditionOptions& options = {});

const char* to_string(ConditionVerdict v);

}  // namespace coolwalk
