#pragma once

// Measurement-matrix certification: mutual coherence and its Welch lower
// bound, spark and the null space order it implies, restricted isometry
// constants, and the measurement-count bound.

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cskit/combinatorics.hpp"
#include "cskit/errors.hpp"
#include "cskit/model.hpp"
#include "cskit/random.hpp"

namespace cskit {

inline constexpr double kRankTolerance = 1e-10;
inline constexpr std::uint64_t kDefaultRipBudget = 1'000'000;
inline constexpr std::uint64_t kDefaultRipSamples = 10'000;

// Max |<a_i, a_j>| over distinct columns after normalizing each column.
inline double coherence(const MeasurementMatrix& a) {
  if (a.n() < 2) throw InvalidArgument("coherence: need at least two columns");
  Matrix cols = a.entries();
  for (Eigen::Index j = 0; j < cols.cols(); ++j) {
    const double norm = cols.col(j).norm();
    if (norm == 0.0)
      throw DegenerateMatrix("coherence: column " + std::to_string(j) + " is zero");
    cols.col(j) /= norm;
  }
  const Matrix gram = cols.transpose() * cols;
  double mu = 0.0;
  for (Eigen::Index j = 1; j < gram.cols(); ++j)
    for (Eigen::Index i = 0; i < j; ++i) mu = std::max(mu, std::abs(gram(i, j)));
  return std::clamp(mu, 0.0, 1.0);
}

// sqrt((n - m) / (m (n - 1))), attained only by equiangular tight frames.
inline double welch_bound(int m, int n) {
  if (n < 2) throw InvalidArgument("welch_bound: n must be at least 2");
  if (m < 1 || m > n) throw InvalidArgument("welch_bound: m must lie in [1, n]");
  return std::sqrt(static_cast<double>(n - m) / (static_cast<double>(m) * (n - 1)));
}

class SparkResult {
 public:
  static SparkResult exact(int value) { return SparkResult(value, true); }
  static SparkResult greater_than(int cap) { return SparkResult(cap, false); }

  bool is_exact() const noexcept { return exact_; }
  // The exact spark, or the cap when only a lower bound is known.
  int value() const noexcept { return value_; }
  // Smallest value consistent with the result.
  int lower_bound() const noexcept { return exact_ ? value_ : value_ + 1; }

  friend bool operator==(const SparkResult&, const SparkResult&) = default;

 private:
  SparkResult(int value, bool exact) : value_(value), exact_(exact) {}
  int value_;
  bool exact_;
};

namespace detail {

inline Matrix select_columns(const Matrix& a, const std::vector<int>& cols) {
  Matrix sub(a.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) sub.col(static_cast<Eigen::Index>(j)) = a.col(cols[j]);
  return sub;
}

inline double spectral_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()(0);
}

// True when the columns are linearly dependent at the given absolute
// singular-value threshold.
inline bool columns_dependent(const Matrix& sub, double zero_threshold) {
  if (sub.cols() > sub.rows()) return true;
  Eigen::JacobiSVD<Matrix> svd(sub);
  const auto& sv = svd.singularValues();
  return sv(sv.size() - 1) <= zero_threshold;
}

}  // namespace detail

// Smallest number of linearly dependent columns, searched exhaustively over
// subsets of size 1..cap. A singular value counts as zero below
// 1e-10 * sigma_max(A).
inline SparkResult spark(const MeasurementMatrix& a, int cap) {
  const int limit = std::min(a.m() + 1, a.n());
  if (cap < 1 || cap > limit)
    throw InvalidArgument("spark: cap must lie in [1, min(m + 1, n)] = [1, " +
                          std::to_string(limit) + "], got " + std::to_string(cap));
  const Matrix& entries = a.entries();
  const double threshold = kRankTolerance * detail::spectral_norm(entries);
  for (int size = 1; size <= cap; ++size) {
    if (size > a.m()) return SparkResult::exact(size);
    Combinations subsets(a.n(), size);
    do {
      if (detail::columns_dependent(detail::select_columns(entries, subsets.current()), threshold))
        return SparkResult::exact(size);
    } while (subsets.next());
  }
  return SparkResult::greater_than(cap);
}

// Largest k with 2k < spark. A truncated spark search is treated as
// spark >= cap + 1.
inline int nsp_order(const SparkResult& s) { return (s.lower_bound() - 1) / 2; }

inline int nsp_order(const MeasurementMatrix& a, int cap) { return nsp_order(spark(a, cap)); }

// A dependent column subset of minimum size, when one exists within the cap.
// Used to construct explicit measurement collisions.
inline std::optional<std::vector<int>> smallest_dependent_subset(const MeasurementMatrix& a,
                                                                 int cap) {
  const Matrix& entries = a.entries();
  const double threshold = kRankTolerance * detail::spectral_norm(entries);
  for (int size = 1; size <= std::min(cap, a.n()); ++size) {
    Combinations subsets(a.n(), size);
    do {
      if (detail::columns_dependent(detail::select_columns(entries, subsets.current()), threshold))
        return subsets.current();
    } while (subsets.next());
  }
  return std::nullopt;
}

enum class RipMethod { Exhaustive, MonteCarlo };

struct RipEstimate {
  int k = 0;
  double delta = 0.0;
  RipMethod method = RipMethod::Exhaustive;
  std::uint64_t trials = 0;  // sampled supports for MonteCarlo, total for Exhaustive
  bool is_exact = true;
};

struct RipOptions {
  RipMethod method = RipMethod::Exhaustive;
  std::uint64_t budget = kDefaultRipBudget;
  std::uint64_t samples = kDefaultRipSamples;
  std::uint64_t seed = 0;
};

namespace detail {

// max(lambda_max - 1, 1 - lambda_min) of the Gram matrix of the columns,
// i.e. the worst singular-value defect of A_S. Columns beyond the row count
// make the Gram singular, which yields a defect of at least 1.
inline double isometry_defect(const Matrix& a, const std::vector<int>& support) {
  const Matrix sub = select_columns(a, support);
  const Matrix gram = sub.transpose() * sub;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
  const auto& ev = eig.eigenvalues();
  const double lo = std::max(ev(0), 0.0);
  const double hi = ev(ev.size() - 1);
  return std::max(hi - 1.0, 1.0 - lo);
}

}  // namespace detail

// Restricted isometry constant of order k. Exhaustive maximizes over all
// C(n, k) supports; MonteCarlo over `samples` supports drawn from
// derive_seed(seed, {i}), giving a lower bound on the true constant.
inline RipEstimate rip_constant(const MeasurementMatrix& a, int k, const RipOptions& opts = {}) {
  if (k < 1 || k > a.n())
    throw InvalidArgument("rip_constant: order k must lie in [1, n], got " + std::to_string(k));
  RipEstimate est;
  est.k = k;
  est.method = opts.method;
  const Matrix& entries = a.entries();
  if (opts.method == RipMethod::Exhaustive) {
    const std::uint64_t total = binomial(static_cast<std::uint64_t>(a.n()), static_cast<std::uint64_t>(k));
    if (total > opts.budget)
      throw BudgetExceeded("rip_constant: exhaustive search over C(" + std::to_string(a.n()) +
                               ", " + std::to_string(k) + ") supports",
                           total, opts.budget);
    Combinations supports(a.n(), k);
    do {
      est.delta = std::max(est.delta, detail::isometry_defect(entries, supports.current()));
    } while (supports.next());
    est.trials = total;
    est.is_exact = true;
  } else {
    if (opts.samples == 0) throw InvalidArgument("rip_constant: MonteCarlo needs at least one sample");
    for (std::uint64_t i = 0; i < opts.samples; ++i) {
      Rng rng(derive_seed(opts.seed, {i}));
      const auto support = random_subset(a.n(), k, rng);
      est.delta = std::max(est.delta, detail::isometry_defect(entries, support));
    }
    est.trials = opts.samples;
    est.is_exact = false;
  }
  return est;
}

// NSP constant implied by a RIP constant of order 2k:
// C = 2 delta / (1 - (1 + sqrt 2) delta), valid for 0 < delta < sqrt 2 - 1.
inline double rip_to_nsp_constant(double delta2k) {
  constexpr double kLimit = std::numbers::sqrt2 - 1.0;
  if (!(delta2k > 0.0 && delta2k < kLimit))
    throw InvalidArgument("rip_to_nsp_constant: delta_2k must lie in (0, sqrt(2) - 1)");
  return 2.0 * delta2k / (1.0 - (1.0 + std::numbers::sqrt2) * delta2k);
}

// min(n, max(ceil(c s ln(n / s)), 2 s)).
inline int measurement_bound(int n, int s, double c = 2.0) {
  if (n < 1 || s < 1 || s > n) throw InvalidArgument("measurement_bound: need 1 <= s <= n");
  if (!(c > 0.0)) throw InvalidArgument("measurement_bound: c must be positive");
  const double raw = std::ceil(c * s * std::log(static_cast<double>(n) / s));
  const int bound = std::max(static_cast<int>(raw), 2 * s);
  return std::min(n, bound);
}

struct CertificationReport {
  double coherence = 0.0;
  double welch_bound = 0.0;
  SparkResult spark = SparkResult::greater_than(1);
  int nsp_order = 0;
  std::vector<RipEstimate> rip;
  int min_measurements = 1;
};

struct CertifyOptions {
  // 0 picks the largest cap whose subset enumeration stays within spark_budget.
  int spark_cap = 0;
  std::uint64_t spark_budget = 1'000'000;
  std::vector<int> rip_orders = {1, 2};
  // Exhaustive when within rip.budget, otherwise MonteCarlo.
  RipOptions rip;
  // Sparsity for the measurement bound; 0 uses max(1, nsp_order).
  int sparsity = 0;
  double bound_constant = 2.0;
};

// Largest cap <= min(m + 1, n) whose total subset count fits the budget.
inline int affordable_spark_cap(int m, int n, std::uint64_t budget) {
  const int limit = std::min(m + 1, n);
  std::uint64_t total = 0;
  int cap = 0;
  for (int size = 1; size <= limit; ++size) {
    // Sizes above m need no rank test.
    const std::uint64_t cost = size > m ? 0 : binomial(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(size));
    total = saturating_add(total, cost);
    if (total > budget) break;
    cap = size;
  }
  return std::max(cap, 1);
}

inline CertificationReport certify(const MeasurementMatrix& a, const CertifyOptions& opts = {}) {
  CertificationReport report;
  report.coherence = coherence(a);
  report.welch_bound = welch_bound(a.m(), a.n());
  const int cap = opts.spark_cap > 0 ? opts.spark_cap : affordable_spark_cap(a.m(), a.n(), opts.spark_budget);
  report.spark = spark(a, cap);
  report.nsp_order = nsp_order(report.spark);
  for (int k : opts.rip_orders) {
    if (k < 1 || k > a.n()) continue;
    RipOptions ro = opts.rip;
    if (ro.method == RipMethod::Exhaustive &&
        binomial(static_cast<std::uint64_t>(a.n()), static_cast<std::uint64_t>(k)) > ro.budget)
      ro.method = RipMethod::MonteCarlo;
    report.rip.push_back(rip_constant(a, k, ro));
  }
  const int s = opts.sparsity > 0 ? opts.sparsity : std::max(1, report.nsp_order);
  report.min_measurements = measurement_bound(a.n(), std::min(s, a.n()), opts.bound_constant);
  return report;
}

inline nlohmann::json to_json(const SparkResult& s) {
  if (s.is_exact()) return {{"exact", true}, {"value", s.value()}};
  return {{"exact", false}, {"greater_than", s.value()}};
}

inline nlohmann::json to_json(const RipEstimate& r) {
  return {{"k", r.k},
          {"delta", r.delta},
          {"method", r.method == RipMethod::Exhaustive ? "exhaustive" : "monte_carlo"},
          {"trials", r.trials},
          {"exact", r.is_exact}};
}

inline nlohmann::json to_json(const CertificationReport& r) {
  nlohmann::json rip = nlohmann::json::array();
  for (const auto& e : r.rip) rip.push_back(to_json(e));
  return {{"coherence", r.coherence},
          {"welch_bound", r.welch_bound},
          {"spark", to_json(r.spark)},
          {"nsp_order", r.nsp_order},
          {"rip", std::move(rip)},
          {"min_measurements", r.min_measurements}};
}

}  // namespace cskit
