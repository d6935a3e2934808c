#pragma once

// Signal and matrix construction, the forward model y = Ax + n, and sparsity
// accounting.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cskit/combinatorics.hpp"
#include "cskit/errors.hpp"
#include "cskit/random.hpp"
#include "cskit/timing.hpp"

namespace cskit {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class MatrixKind { Identity, Gaussian, Bernoulli, PartialDCT, Toeplitz, Circulant, Custom };

inline std::string_view to_string(MatrixKind kind) {
  switch (kind) {
    case MatrixKind::Identity: return "identity";
    case MatrixKind::Gaussian: return "gaussian";
    case MatrixKind::Bernoulli: return "bernoulli";
    case MatrixKind::PartialDCT: return "partial_dct";
    case MatrixKind::Toeplitz: return "toeplitz";
    case MatrixKind::Circulant: return "circulant";
    case MatrixKind::Custom: return "custom";
  }
  return "custom";
}

inline std::optional<MatrixKind> parse_matrix_kind(std::string_view name) {
  for (auto kind : {MatrixKind::Identity, MatrixKind::Gaussian, MatrixKind::Bernoulli,
                    MatrixKind::PartialDCT, MatrixKind::Toeplitz, MatrixKind::Circulant,
                    MatrixKind::Custom}) {
    if (to_string(kind) == name) return kind;
  }
  if (name == "dct") return MatrixKind::PartialDCT;
  return std::nullopt;
}

enum class Amplitude { UnitGaussian, SignedOnes };

inline std::string_view to_string(Amplitude a) {
  return a == Amplitude::UnitGaussian ? "unit_gaussian" : "signed_ones";
}

inline std::optional<Amplitude> parse_amplitude(std::string_view name) {
  if (name == "unit_gaussian" || name == "gaussian") return Amplitude::UnitGaussian;
  if (name == "signed_ones" || name == "ones") return Amplitude::SignedOnes;
  return std::nullopt;
}

// Number of entries with |v[i]| > tol.
inline int sparsity_level(const Vector& v, double tol = 0.0) {
  return static_cast<int>((v.array().abs() > tol).count());
}

inline std::vector<int> support_of(const Vector& v, double tol = 0.0) {
  std::vector<int> s;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (std::abs(v[i]) > tol) s.push_back(static_cast<int>(i));
  return s;
}

// A length-n vector whose nonzero set is exactly `support`.
class SparseSignal {
 public:
  // Support is read off the nonzero entries.
  static SparseSignal from_values(Vector values) {
    if (values.size() == 0) throw InvalidArgument("signal length must be positive");
    auto support = support_of(values);
    return SparseSignal(std::move(values), std::move(support));
  }

  const Vector& values() const noexcept { return values_; }
  int n() const noexcept { return static_cast<int>(values_.size()); }
  int k() const noexcept { return static_cast<int>(support_.size()); }
  const std::vector<int>& support() const noexcept { return support_; }

 private:
  SparseSignal(Vector values, std::vector<int> support)
      : values_(std::move(values)), support_(std::move(support)) {}

  Vector values_;
  std::vector<int> support_;
};

inline SparseSignal generate_sparse_signal(int n, int k, Amplitude amplitude,
                                           std::uint64_t seed) {
  if (n <= 0) throw InvalidArgument("generate_sparse_signal: n must be positive");
  if (k < 0 || k > n)
    throw InvalidArgument("generate_sparse_signal: k must lie in [0, n], got k=" +
                          std::to_string(k) + " n=" + std::to_string(n));
  Rng rng(seed);
  const auto support = random_subset(n, k, rng);
  Vector values = Vector::Zero(n);
  for (int i : support) {
    double v = 0.0;
    if (amplitude == Amplitude::SignedOnes) {
      v = rng.sign();
    } else {
      while (v == 0.0) v = rng.normal();
    }
    values[i] = v;
  }
  return SparseSignal::from_values(std::move(values));
}

class MeasurementMatrix {
 public:
  // Wraps externally supplied entries (file ingestion). Validates the type
  // invariants; `kind` is normally Custom.
  MeasurementMatrix(Matrix entries, MatrixKind kind, std::uint64_t seed = 0,
                    bool columns_normalized = false)
      : entries_(std::move(entries)),
        kind_(kind),
        seed_(seed),
        columns_normalized_(columns_normalized) {
    validate();
  }

  const Matrix& entries() const noexcept { return entries_; }
  MatrixKind kind() const noexcept { return kind_; }
  std::uint64_t seed() const noexcept { return seed_; }
  bool columns_normalized() const noexcept { return columns_normalized_; }
  int m() const noexcept { return static_cast<int>(entries_.rows()); }
  int n() const noexcept { return static_cast<int>(entries_.cols()); }

  Vector column_norms() const { return entries_.colwise().norm().transpose(); }

  // FNV-1a over kind, shape and raw entry bytes. Identifies the matrix a set
  // of measurements came from.
  std::uint64_t fingerprint() const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](const void* data, std::size_t len) {
      const auto* p = static_cast<const unsigned char*>(data);
      for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
      }
    };
    const auto k = static_cast<int>(kind_);
    const auto rows = entries_.rows();
    const auto cols = entries_.cols();
    mix(&k, sizeof k);
    mix(&rows, sizeof rows);
    mix(&cols, sizeof cols);
    mix(entries_.data(), static_cast<std::size_t>(entries_.size()) * sizeof(double));
    return h;
  }

 private:
  void validate() const {
    if (entries_.rows() == 0 || entries_.cols() == 0)
      throw InvalidArgument("measurement matrix must be non-empty");
    if (kind_ == MatrixKind::Identity && entries_.rows() != entries_.cols())
      throw InvalidArgument("identity matrix requires m == n");
    if (entries_.rows() > entries_.cols())
      throw InvalidArgument("measurement matrix requires m <= n, got " +
                            std::to_string(entries_.rows()) + "x" +
                            std::to_string(entries_.cols()));
    if (!entries_.allFinite()) throw InvalidArgument("measurement matrix has non-finite entries");
    if (columns_normalized_) {
      const Vector norms = column_norms();
      if (((norms.array() - 1.0).abs() > 1e-12).any())
        throw InvalidArgument("columns_normalized set but a column norm differs from 1");
    }
  }

  Matrix entries_;
  MatrixKind kind_;
  std::uint64_t seed_;
  bool columns_normalized_;
};

namespace detail {

// Row r of the n-point orthonormal DCT-II.
inline double dct_entry(int row, int col, int n) {
  const double scale = row == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
  return scale * std::cos(std::numbers::pi * (2.0 * col + 1.0) * row / (2.0 * n));
}

// Divides each column by its norm. A zero column is left as is and reported.
inline bool normalize_columns(Matrix& a) {
  bool all_unit = true;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    const double norm = a.col(j).norm();
    if (norm > 0.0) {
      a.col(j) /= norm;
    } else {
      all_unit = false;
    }
  }
  return all_unit;
}

}  // namespace detail

// Seeded ensemble matrix. With `normalize`, every column is scaled to unit l2
// norm; Toeplitz and Circulant structure is then preserved only up to that
// per-column scaling.
inline MeasurementMatrix build_matrix(MatrixKind kind, int m, int n, std::uint64_t seed,
                                      bool normalize = true) {
  if (m <= 0 || n <= 0) throw InvalidArgument("build_matrix: m and n must be positive");
  if (m > n)
    throw InvalidArgument("build_matrix: m must not exceed n (m=" + std::to_string(m) +
                          ", n=" + std::to_string(n) + ")");
  if (kind == MatrixKind::Identity && m != n)
    throw InvalidArgument("build_matrix: identity requires m == n");
  if (kind == MatrixKind::Custom)
    throw InvalidArgument("build_matrix: custom matrices are loaded from files");

  Rng rng(seed);
  Matrix a(m, n);
  switch (kind) {
    case MatrixKind::Identity:
      a.setIdentity();
      break;
    case MatrixKind::Gaussian:
      // Column-major fill order is part of the reproducibility contract.
      for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < m; ++i) a(i, j) = rng.normal();
      break;
    case MatrixKind::Bernoulli:
      for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index i = 0; i < m; ++i) a(i, j) = rng.sign();
      break;
    case MatrixKind::PartialDCT: {
      const auto rows = random_subset(n, m, rng);
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = detail::dct_entry(rows[static_cast<std::size_t>(i)], j, n);
      break;
    }
    case MatrixKind::Toeplitz: {
      // diag[d + m - 1] holds the value on diagonal j - i = d.
      std::vector<double> diag(static_cast<std::size_t>(m + n - 1));
      for (double& v : diag) v = rng.normal();
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = diag[static_cast<std::size_t>(j - i + m - 1)];
      break;
    }
    case MatrixKind::Circulant: {
      std::vector<double> g(static_cast<std::size_t>(n));
      for (double& v : g) v = rng.normal();
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = g[static_cast<std::size_t>(((j - i) % n + n) % n)];
      break;
    }
    case MatrixKind::Custom:
      break;
  }

  bool normalized = false;
  if (normalize) {
    normalized = detail::normalize_columns(a);
    if (!normalized) throw DegenerateMatrix("build_matrix: zero column cannot be normalized");
  }
  return MeasurementMatrix(std::move(a), kind, seed, normalized);
}

enum class NoiseKind { None, AdditiveWhiteGaussian };

class NoiseModel {
 public:
  static NoiseModel none() { return NoiseModel(NoiseKind::None, 0.0); }

  // sigma = 0 canonicalizes to None.
  static NoiseModel awgn(double sigma) {
    if (!(sigma >= 0.0) || !std::isfinite(sigma))
      throw InvalidArgument("noise sigma must be a finite non-negative number");
    return sigma == 0.0 ? none() : NoiseModel(NoiseKind::AdditiveWhiteGaussian, sigma);
  }

  NoiseKind kind() const noexcept { return kind_; }
  double sigma() const noexcept { return sigma_; }

  friend bool operator==(const NoiseModel&, const NoiseModel&) = default;

 private:
  NoiseModel(NoiseKind kind, double sigma) : kind_(kind), sigma_(sigma) {}
  NoiseKind kind_;
  double sigma_;
};

struct Measurements {
  Vector y;
  NoiseModel noise = NoiseModel::none();
  std::uint64_t source_matrix_id = 0;
  double sampling_time = 0.0;
};

// y = A x + n. Noise components are sigma * N(0,1) draws from Rng(seed), in
// index order.
inline Measurements measure(const MeasurementMatrix& a, const Vector& x,
                            const NoiseModel& noise, std::uint64_t seed) {
  if (x.size() != a.n())
    throw InvalidArgument("measure: signal length " + std::to_string(x.size()) +
                          " does not match matrix columns " + std::to_string(a.n()));
  Vector noise_draw;
  if (noise.kind() == NoiseKind::AdditiveWhiteGaussian) {
    Rng rng(seed);
    noise_draw.resize(a.m());
    for (Eigen::Index i = 0; i < noise_draw.size(); ++i) noise_draw[i] = noise.sigma() * rng.normal();
  }

  Measurements out;
  out.noise = noise;
  out.source_matrix_id = a.fingerprint();
  Stopwatch watch;
  out.y.noalias() = a.entries() * x;
  if (noise_draw.size() > 0) out.y += noise_draw;
  out.sampling_time = watch.seconds();
  return out;
}

inline Measurements measure(const MeasurementMatrix& a, const SparseSignal& x,
                            const NoiseModel& noise, std::uint64_t seed) {
  return measure(a, x.values(), noise, seed);
}

}  // namespace cskit
