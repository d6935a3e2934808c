#pragma once

// Per-trial quality metrics for a recovered signal, and the registry that
// classifies each metric by the sensing process it evaluates.

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "cskit/errors.hpp"
#include "cskit/model.hpp"

namespace cskit {

// A metric value or one of the markers for a non-finite outcome.
class MetricValue {
 public:
  enum class State { Finite, Infinite, Undefined };

  static MetricValue finite(double v) { return MetricValue(State::Finite, v); }
  static MetricValue infinite() { return MetricValue(State::Infinite, std::numeric_limits<double>::infinity()); }
  static MetricValue undefined() { return MetricValue(State::Undefined, std::numeric_limits<double>::quiet_NaN()); }

  State state() const noexcept { return state_; }
  bool is_finite() const noexcept { return state_ == State::Finite; }
  bool is_infinite() const noexcept { return state_ == State::Infinite; }
  bool is_undefined() const noexcept { return state_ == State::Undefined; }
  // +inf for Infinite, NaN for Undefined.
  double value() const noexcept { return value_; }

  friend bool operator==(const MetricValue& a, const MetricValue& b) {
    return a.state_ == b.state_ && (a.state_ != State::Finite || a.value_ == b.value_);
  }

 private:
  MetricValue(State s, double v) : state_(s), value_(v) {}
  State state_;
  double value_;
};

namespace detail {
inline void check_same_length(const Vector& x, const Vector& x_hat, const char* who) {
  if (x.size() != x_hat.size())
    throw InvalidArgument(std::string(who) + ": vectors differ in length (" + std::to_string(x.size()) +
                          " vs " + std::to_string(x_hat.size()) + ")");
}
}  // namespace detail

// ||x - x_hat|| / ||x||.
inline double recovery_error(const Vector& x, const Vector& x_hat) {
  detail::check_same_length(x, x_hat, "recovery_error");
  const double nx = x.norm();
  if (nx == 0.0) throw UndefinedMetric("recovery_error: original signal has zero norm");
  return (x - x_hat).norm() / nx;
}

inline double mse(const Vector& x, const Vector& x_hat) {
  detail::check_same_length(x, x_hat, "mse");
  if (x.size() == 0) throw InvalidArgument("mse: empty vectors");
  return (x - x_hat).squaredNorm() / static_cast<double>(x.size());
}

// Product-moment correlation, evaluated on centered data.
inline double correlation(const Vector& x, const Vector& x_hat) {
  detail::check_same_length(x, x_hat, "correlation");
  if (x.size() < 2) throw InvalidArgument("correlation: need at least two samples");
  const Vector cx = x.array() - x.mean();
  const Vector cy = x_hat.array() - x_hat.mean();
  const double vx = cx.squaredNorm();
  const double vy = cy.squaredNorm();
  if (vx == 0.0 || vy == 0.0) throw UndefinedMetric("correlation: a constant vector has zero variance");
  return std::clamp(cx.dot(cy) / (std::sqrt(vx) * std::sqrt(vy)), -1.0, 1.0);
}

// Population covariance, mean of the product of centered components.
inline double covariance(const Vector& x, const Vector& x_hat) {
  detail::check_same_length(x, x_hat, "covariance");
  if (x.size() == 0) throw InvalidArgument("covariance: empty vectors");
  const auto cx = x.array() - x.mean();
  const auto cy = x_hat.array() - x_hat.mean();
  return (cx * cy).sum() / static_cast<double>(x.size());
}

struct ErrorSparsity {
  int count_delta = 0;
  int support_mismatch = 0;
  friend bool operator==(const ErrorSparsity&, const ErrorSparsity&) = default;
};

inline ErrorSparsity error_sparsity(const SparseSignal& x, const Vector& x_hat, double tol = 0.0) {
  detail::check_same_length(x.values(), x_hat, "error_sparsity");
  const auto recovered = support_of(x_hat, tol);
  std::vector<int> diff;
  std::set_symmetric_difference(x.support().begin(), x.support().end(), recovered.begin(), recovered.end(),
                                std::back_inserter(diff));
  return {static_cast<int>(recovered.size()) - x.k(), static_cast<int>(diff.size())};
}

inline double compression_ratio(int m, int n) {
  if (m < 1 || n < 1 || m > n) throw InvalidArgument("compression_ratio: need 1 <= m <= n");
  return static_cast<double>(m) / static_cast<double>(n);
}

// ||x||^2 / ||x - x_hat||^2, infinite when the error energy is zero.
inline MetricValue rsnr(const Vector& x, const Vector& x_hat) {
  detail::check_same_length(x, x_hat, "rsnr");
  const double signal = x.squaredNorm();
  if (signal == 0.0) throw UndefinedMetric("rsnr: original signal has zero energy");
  const double error = (x - x_hat).squaredNorm();
  if (error == 0.0) return MetricValue::infinite();
  return MetricValue::finite(signal / error);
}

// 10 log10 of the signal-to-error energy ratio, in dB.
inline MetricValue snr_db(const Vector& x, const Vector& x_hat) {
  detail::check_same_length(x, x_hat, "snr_db");
  const double signal = x.squaredNorm();
  if (signal == 0.0) throw UndefinedMetric("snr_db: original signal has zero energy");
  const double error = (x - x_hat).squaredNorm();
  if (error == 0.0) return MetricValue::infinite();
  return MetricValue::finite(10.0 * std::log10(signal / error));
}

// Count of coordinates where |y - y_hat| exceeds tol.
inline int hamming_distance(const Vector& y, const Vector& y_hat, double tol) {
  detail::check_same_length(y, y_hat, "hamming_distance");
  return static_cast<int>(((y - y_hat).array().abs() > tol).count());
}

inline double default_hamming_tolerance(const Vector& y) {
  const double inf_norm = y.size() ? y.cwiseAbs().maxCoeff() : 0.0;
  return 1e-6 * std::max(1.0, inf_norm);
}

inline constexpr double kDefaultSuccessThreshold = 0.9;

// Recovered when the relative error is at most 1 - threshold.
inline bool is_success(const Vector& x, const Vector& x_hat, double threshold = kDefaultSuccessThreshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) throw InvalidArgument("is_success: threshold must lie in (0, 1]");
  return recovery_error(x, x_hat) <= 1.0 - threshold;
}

struct SuccessRate {
  double success_rate = 0.0;
  double failure_rate = 1.0;
};

inline SuccessRate success_rate(const std::vector<bool>& outcomes) {
  if (outcomes.empty()) throw InvalidArgument("success_rate: no trials");
  const auto hits = std::count(outcomes.begin(), outcomes.end(), true);
  const double rate = static_cast<double>(hits) / static_cast<double>(outcomes.size());
  // failure counted directly so the two always sum to one exactly
  const double fail = static_cast<double>(static_cast<std::ptrdiff_t>(outcomes.size()) - hits) /
                      static_cast<double>(outcomes.size());
  return {rate, fail};
}

enum class Process { SparseRepresentation, SamplingMatrix, Recovery };

inline std::string_view to_string(Process p) {
  switch (p) {
    case Process::SparseRepresentation: return "sparse_representation";
    case Process::SamplingMatrix: return "sampling_matrix";
    case Process::Recovery: return "recovery";
  }
  return "recovery";
}

struct MetricDescriptor {
  std::string name;
  std::set<Process> processes;
  std::string equation;
};

// Metric-to-process classification, one row per metric in a fixed order.
// Rows keep their listed processes even where the metric's definition
// involves another process.
inline const std::vector<MetricDescriptor>& metric_registry() {
  using enum Process;
  static const std::vector<MetricDescriptor> registry = {
      {"Coherence", {SamplingMatrix, Recovery}, "max |<a_i, a_j>| / (||a_i|| ||a_j||); Welch bound"},
      {"RIP", {SamplingMatrix}, "(1 - d)||x||^2 <= ||Ax||^2 <= (1 + d)||x||^2"},
      {"NSP", {Recovery}, "||h_S||_1 <= C ||h_Sc||_1 on null(A); C from d_2k"},
      {"Sparsity", {SparseRepresentation}, "sparse of order k"},
      {"Error sparsity", {SparseRepresentation}, "sparsity comparison"},
      {"Measurements bounds", {SamplingMatrix, Recovery}, "m >= c k log(n / k)"},
      {"Recovery error, MSE", {Recovery}, "||x - x_hat|| / ||x||; mean squared error"},
      {"Correlation/covariance", {Recovery}, "product-moment correlation; population covariance"},
      {"Recovery time", {Recovery}, "wall-clock"},
      {"Sampling time", {SamplingMatrix}, "wall-clock"},
      {"Compression ratio", {SamplingMatrix, Recovery}, "m / n"},
      {"Signal to error ratio", {SamplingMatrix}, "||x||^2 / ||x - x_hat||^2"},
      {"Recovery SNR", {SamplingMatrix}, "10 log10(||x||^2 / ||x - x_hat||^2)"},
      {"Recovery success rate/ Failure rate", {SamplingMatrix}, "success counting"},
      {"Phase transmission diagram", {SamplingMatrix}, "delta = M/N, rho = K/M"},
      {"Recovered SNR", {SamplingMatrix}, "||x||^2 / ||x - x_hat||^2"},
      {"Hamming distance", {SamplingMatrix}, "nonzeros of y - y_hat"},
      {"Complexity", {SparseRepresentation, SamplingMatrix, Recovery}, "measured runtime"},
  };
  return registry;
}

inline const MetricDescriptor* find_metric(std::string_view name) {
  for (const auto& d : metric_registry())
    if (d.name == name) return &d;
  return nullptr;
}

struct MetricTolerances {
  // Support threshold for error sparsity; < 0 selects 1e-6 * max(1, ||x||_inf).
  double support_tol = -1.0;
  // Hamming threshold; < 0 selects 1e-6 * max(1, ||y||_inf).
  double hamming_tol = -1.0;
  double success_threshold = kDefaultSuccessThreshold;
};

// All per-trial metrics of one recovery. Column order follows trials.csv.
struct MetricReport {
  MetricValue recovery_error = MetricValue::undefined();
  MetricValue mse = MetricValue::undefined();
  MetricValue correlation = MetricValue::undefined();
  MetricValue covariance = MetricValue::undefined();
  int error_sparsity_count = 0;
  int error_sparsity_support = 0;
  MetricValue compression_ratio = MetricValue::undefined();
  MetricValue snr_db = MetricValue::undefined();
  MetricValue rsnr = MetricValue::undefined();
  int hamming_distance = 0;
  bool success = false;
  MetricTolerances tolerances;  // resolved (non-negative) values
};

namespace detail {
template <class F>
MetricValue guarded(F&& f) {
  try {
    return MetricValue::finite(f());
  } catch (const UndefinedMetric&) {
    return MetricValue::undefined();
  }
}
template <class F>
MetricValue guarded_marker(F&& f) {
  try {
    return f();
  } catch (const UndefinedMetric&) {
    return MetricValue::undefined();
  }
}
}  // namespace detail

// y_hat is A x_hat. For an all-zero original signal, relative metrics are
// undefined and success means the recovered signal is exactly zero too.
inline MetricReport compute_metrics(const SparseSignal& x, const Vector& x_hat, const Vector& y,
                                    const Vector& y_hat, int m, MetricTolerances tol = {}) {
  const Vector& xv = x.values();
  if (tol.support_tol < 0.0) tol.support_tol = 1e-6 * std::max(1.0, xv.size() ? xv.cwiseAbs().maxCoeff() : 0.0);
  if (tol.hamming_tol < 0.0) tol.hamming_tol = default_hamming_tolerance(y);

  MetricReport r;
  r.tolerances = tol;
  r.recovery_error = detail::guarded([&] { return recovery_error(xv, x_hat); });
  r.mse = MetricValue::finite(mse(xv, x_hat));
  r.correlation = xv.size() >= 2 ? detail::guarded([&] { return correlation(xv, x_hat); }) : MetricValue::undefined();
  r.covariance = MetricValue::finite(covariance(xv, x_hat));
  const auto es = error_sparsity(x, x_hat, tol.support_tol);
  r.error_sparsity_count = es.count_delta;
  r.error_sparsity_support = es.support_mismatch;
  r.compression_ratio = MetricValue::finite(compression_ratio(m, x.n()));
  r.snr_db = detail::guarded_marker([&] { return snr_db(xv, x_hat); });
  r.rsnr = detail::guarded_marker([&] { return rsnr(xv, x_hat); });
  r.hamming_distance = hamming_distance(y, y_hat, tol.hamming_tol);
  if (x.k() == 0)
    r.success = x_hat.isZero(0.0);
  else
    r.success = is_success(xv, x_hat, tol.success_threshold);
  return r;
}

inline nlohmann::json to_json(const MetricValue& v) {
  if (v.is_finite()) return v.value();
  return v.is_infinite() ? nlohmann::json("infinite") : nlohmann::json("undefined");
}

inline nlohmann::json to_json(const MetricReport& r) {
  return {{"recovery_error", to_json(r.recovery_error)},
          {"mse", to_json(r.mse)},
          {"correlation", to_json(r.correlation)},
          {"covariance", to_json(r.covariance)},
          {"error_sparsity_count", r.error_sparsity_count},
          {"error_sparsity_support", r.error_sparsity_support},
          {"compression_ratio", to_json(r.compression_ratio)},
          {"snr_db", to_json(r.snr_db)},
          {"rsnr", to_json(r.rsnr)},
          {"hamming_distance", r.hamming_distance},
          {"success", r.success},
          {"tolerances",
           {{"support_tol", r.tolerances.support_tol},
            {"hamming_tol", r.tolerances.hamming_tol},
            {"success_threshold", r.tolerances.success_threshold}}}};
}

}  // namespace cskit
