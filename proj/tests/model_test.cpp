#include <gtest/gtest.h>

#include <cmath>
#include <cstring>

#include "cskit/model.hpp"
#include "cskit/random.hpp"

namespace cskit {
namespace {

bool bit_equal(const Matrix& a, const Matrix& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() &&
         std::memcmp(a.data(), b.data(), static_cast<std::size_t>(a.size()) * sizeof(double)) == 0;
}

constexpr MatrixKind kRandomKinds[] = {MatrixKind::Gaussian, MatrixKind::Bernoulli, MatrixKind::PartialDCT,
                                       MatrixKind::Toeplitz, MatrixKind::Circulant};

TEST(Random, DeriveSeedIsPositional) {
  EXPECT_EQ(derive_seed(1, {2, 3}), derive_seed(1, {2, 3}));
  EXPECT_NE(derive_seed(1, {2, 3}), derive_seed(1, {3, 2}));
  EXPECT_NE(derive_seed(1, {1}), derive_seed(1, {1, 0}));
  EXPECT_NE(derive_seed(1, {}), derive_seed(2, {}));
}

TEST(Random, BelowStaysInRange) {
  Rng rng(9);
  for (int i = 0; i < 10000; ++i) EXPECT_LT(rng.below(7), 7u);
}

TEST(Random, NormalMomentsAreStandard) {
  Rng rng(11);
  constexpr int n = 200000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = rng.normal();
    sum += v;
    sq += v * v;
  }
  EXPECT_NEAR(sum / n, 0.0, 0.01);
  EXPECT_NEAR(sq / n, 1.0, 0.01);
}

TEST(GenerateSparseSignal, ZeroSparsityIsZeroVector) {
  const auto x = generate_sparse_signal(8, 0, Amplitude::UnitGaussian, 123);
  EXPECT_EQ(x.n(), 8);
  EXPECT_EQ(x.k(), 0);
  EXPECT_TRUE(x.support().empty());
  EXPECT_TRUE(x.values().isZero(0.0));
}

TEST(GenerateSparseSignal, FullSupportSignedOnes) {
  const auto x = generate_sparse_signal(8, 8, Amplitude::SignedOnes, 7);
  EXPECT_EQ(x.support(), (std::vector<int>{0, 1, 2, 3, 4, 5, 6, 7}));
  for (int i = 0; i < 8; ++i) EXPECT_EQ(std::abs(x.values()[i]), 1.0);
}

TEST(GenerateSparseSignal, RegeneratesBitForBit) {
  const auto a = generate_sparse_signal(256, 10, Amplitude::UnitGaussian, 1);
  const auto b = generate_sparse_signal(256, 10, Amplitude::UnitGaussian, 1);
  EXPECT_EQ(sparsity_level(a.values()), 10);
  EXPECT_EQ(a.support(), b.support());
  EXPECT_TRUE(bit_equal(a.values(), b.values()));
  const auto c = generate_sparse_signal(256, 10, Amplitude::UnitGaussian, 2);
  EXPECT_FALSE(bit_equal(a.values(), c.values()));
}

TEST(GenerateSparseSignal, RejectsBadArguments) {
  EXPECT_THROW(generate_sparse_signal(4, 5, Amplitude::UnitGaussian, 0), InvalidArgument);
  EXPECT_THROW(generate_sparse_signal(0, 0, Amplitude::UnitGaussian, 0), InvalidArgument);
  EXPECT_THROW(generate_sparse_signal(4, -1, Amplitude::UnitGaussian, 0), InvalidArgument);
}

TEST(GenerateSparseSignal, SupportIsRoughlyUniform) {
  std::vector<int> hits(20, 0);
  for (std::uint64_t s = 0; s < 4000; ++s) {
    const auto x = generate_sparse_signal(20, 3, Amplitude::SignedOnes, s);
    for (int i : x.support()) ++hits[static_cast<std::size_t>(i)];
  }
  // Expected 600 per index; 5 sigma is about 115.
  for (int h : hits) EXPECT_NEAR(h, 600, 120);
}

TEST(GenerateSparseSignal, SparsityLevelMatchesDeclaredK) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const int n = 5 + static_cast<int>(seed % 40);
    const int k = static_cast<int>(seed % static_cast<std::uint64_t>(n + 1));
    for (auto amp : {Amplitude::UnitGaussian, Amplitude::SignedOnes}) {
      const auto x = generate_sparse_signal(n, k, amp, seed);
      EXPECT_EQ(sparsity_level(x.values(), 0.0), k);
      EXPECT_EQ(x.k(), k);
      EXPECT_TRUE(std::is_sorted(x.support().begin(), x.support().end()));
    }
  }
}

TEST(BuildMatrix, IdentityIsIdentity) {
  const auto a = build_matrix(MatrixKind::Identity, 4, 4, 99, true);
  EXPECT_TRUE(a.entries().isApprox(Matrix::Identity(4, 4), 0.0));
  EXPECT_TRUE(a.columns_normalized());
}

TEST(BuildMatrix, NormalizedBernoulliEntries) {
  const auto a = build_matrix(MatrixKind::Bernoulli, 2, 4, 3, true);
  const double h = 1.0 / std::sqrt(2.0);
  for (Eigen::Index i = 0; i < 2; ++i)
    for (Eigen::Index j = 0; j < 4; ++j) EXPECT_NEAR(std::abs(a.entries()(i, j)), h, 1e-15);
}

TEST(BuildMatrix, CirculantMatchesSeededGenerator) {
  const auto a = build_matrix(MatrixKind::Circulant, 4, 8, 5, false);
  // The generator is the first 8 standard normal draws of Rng(5).
  Rng rng(5);
  std::vector<double> g(8);
  for (double& v : g) v = rng.normal();
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 8; ++j) EXPECT_EQ(a.entries()(i, j), g[static_cast<std::size_t>(((j - i) % 8 + 8) % 8)]);
}

TEST(BuildMatrix, GaussianMatchesColumnMajorDraws) {
  const auto a = build_matrix(MatrixKind::Gaussian, 3, 5, 17, false);
  Rng rng(17);
  for (int j = 0; j < 5; ++j)
    for (int i = 0; i < 3; ++i) EXPECT_EQ(a.entries()(i, j), rng.normal());
}

TEST(BuildMatrix, StructuredKindsKeepTheirShape) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const int n = 6 + static_cast<int>(seed % 11);
    const int m = 1 + static_cast<int>(seed % static_cast<std::uint64_t>(n));
    const auto t = build_matrix(MatrixKind::Toeplitz, m, n, seed, false).entries();
    for (int i = 1; i < m; ++i)
      for (int j = 1; j < n; ++j) ASSERT_EQ(t(i, j), t(i - 1, j - 1)) << "seed " << seed;
    const auto c = build_matrix(MatrixKind::Circulant, m, n, seed, false).entries();
    for (int i = 1; i < m; ++i)
      for (int j = 0; j < n; ++j) ASSERT_EQ(c(i, j), c(i - 1, (j - 1 + n) % n)) << "seed " << seed;
  }
}

TEST(BuildMatrix, NormalizedIsRawWithUnitColumns) {
  for (auto kind : kRandomKinds) {
    const auto raw = build_matrix(kind, 5, 12, 8, false).entries();
    const auto unit = build_matrix(kind, 5, 12, 8, true).entries();
    for (Eigen::Index j = 0; j < 12; ++j)
      EXPECT_TRUE(unit.col(j).isApprox(raw.col(j) / raw.col(j).norm(), 1e-14)) << to_string(kind);
  }
}

TEST(BuildMatrix, NormalizedColumnsHaveUnitNorm) {
  for (auto kind : kRandomKinds) {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
      const int n = 4 + static_cast<int>(seed);
      const int m = 1 + static_cast<int>(seed % static_cast<std::uint64_t>(n));
      const auto a = build_matrix(kind, m, n, seed, true);
      EXPECT_LT((a.column_norms().array() - 1.0).abs().maxCoeff(), 1e-12) << to_string(kind);
      EXPECT_TRUE(a.entries().allFinite());
    }
  }
}

TEST(BuildMatrix, PartialDctRowsAreOrthonormal) {
  const auto a = build_matrix(MatrixKind::PartialDCT, 6, 16, 4, false).entries();
  EXPECT_TRUE((a * a.transpose()).isApprox(Matrix::Identity(6, 6), 1e-12));
}

TEST(BuildMatrix, DeterministicInArguments) {
  for (auto kind : kRandomKinds) {
    EXPECT_TRUE(bit_equal(build_matrix(kind, 4, 9, 77).entries(), build_matrix(kind, 4, 9, 77).entries()));
    EXPECT_FALSE(bit_equal(build_matrix(kind, 4, 9, 77).entries(), build_matrix(kind, 4, 9, 78).entries()));
  }
}

TEST(BuildMatrix, RejectsBadShapes) {
  EXPECT_THROW(build_matrix(MatrixKind::Gaussian, 5, 4, 0), InvalidArgument);
  EXPECT_THROW(build_matrix(MatrixKind::Identity, 3, 4, 0), InvalidArgument);
  EXPECT_THROW(build_matrix(MatrixKind::Custom, 3, 4, 0), InvalidArgument);
  EXPECT_THROW(build_matrix(MatrixKind::Gaussian, 0, 4, 0), InvalidArgument);
}

TEST(MeasurementMatrix, ValidatesCustomEntries) {
  Matrix bad(2, 2);
  bad << 1, std::nan(""), 0, 1;
  EXPECT_THROW(MeasurementMatrix(bad, MatrixKind::Custom), InvalidArgument);
  EXPECT_THROW(MeasurementMatrix(Matrix::Ones(3, 2), MatrixKind::Custom), InvalidArgument);
  EXPECT_THROW(MeasurementMatrix(Matrix::Ones(2, 3), MatrixKind::Custom, 0, true), InvalidArgument);
  EXPECT_NO_THROW(MeasurementMatrix(Matrix::Ones(2, 3), MatrixKind::Custom));
}

TEST(NoiseModel, ZeroSigmaIsNone) {
  EXPECT_EQ(NoiseModel::awgn(0.0).kind(), NoiseKind::None);
  EXPECT_EQ(NoiseModel::awgn(0.0), NoiseModel::none());
  EXPECT_EQ(NoiseModel::awgn(0.5).kind(), NoiseKind::AdditiveWhiteGaussian);
  EXPECT_THROW(NoiseModel::awgn(-1.0), InvalidArgument);
}

TEST(Measure, IdentityReturnsSignal) {
  const auto a = build_matrix(MatrixKind::Identity, 4, 4, 0);
  const auto x = generate_sparse_signal(4, 2, Amplitude::UnitGaussian, 3);
  const auto y = measure(a, x, NoiseModel::none(), 0);
  EXPECT_TRUE(bit_equal(y.y, x.values()));
  EXPECT_GE(y.sampling_time, 0.0);
  EXPECT_EQ(y.source_matrix_id, a.fingerprint());
}

TEST(Measure, ZeroSignalGivesZeroMeasurements) {
  const auto a = build_matrix(MatrixKind::Gaussian, 5, 9, 1);
  const auto y = measure(a, Vector::Zero(9), NoiseModel::none(), 0);
  EXPECT_TRUE(y.y.isZero(0.0));
}

TEST(Measure, NoiseIsTheSeededDraw) {
  const auto a = build_matrix(MatrixKind::Gaussian, 4, 8, 11);
  const auto x = generate_sparse_signal(8, 2, Amplitude::UnitGaussian, 12);
  const auto y = measure(a, x, NoiseModel::awgn(0.1), 2);
  Rng rng(2);
  Vector noise(4);
  for (Eigen::Index i = 0; i < 4; ++i) noise[i] = 0.1 * rng.normal();
  const Vector clean = a.entries() * x.values();
  const Vector expected = clean + noise;
  EXPECT_TRUE(bit_equal(y.y, expected));
  EXPECT_LT((y.y - clean - noise).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_TRUE(bit_equal(y.y, measure(a, x, NoiseModel::awgn(0.1), 2).y));
}

TEST(Measure, RejectsDimensionMismatch) {
  const auto a = build_matrix(MatrixKind::Gaussian, 4, 8, 11);
  EXPECT_THROW(measure(a, Vector::Zero(7), NoiseModel::none(), 0), InvalidArgument);
}

TEST(Measure, IsLinear) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto a = build_matrix(kRandomKinds[seed % 5], 6, 13, seed);
    Rng rng(seed + 1000);
    Vector x1(13), x2(13);
    for (Eigen::Index i = 0; i < 13; ++i) {
      x1[i] = rng.normal();
      x2[i] = rng.normal();
    }
    const double alpha = rng.normal(), beta = rng.normal();
    const auto lhs = measure(a, Vector(alpha * x1 + beta * x2), NoiseModel::none(), 0).y;
    const Vector rhs = alpha * measure(a, x1, NoiseModel::none(), 0).y + beta * measure(a, x2, NoiseModel::none(), 0).y;
    EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(SparsityLevel, Examples) {
  EXPECT_EQ(sparsity_level(Vector::Zero(5), 0.0), 0);
  Vector v(4);
  v << 1, 0, 2e-9, 3;
  EXPECT_EQ(sparsity_level(v, 1e-8), 2);
  EXPECT_EQ(sparsity_level(Vector::Ones(4), 0.0), 4);
}

TEST(SparseSignal, FromValuesReadsSupport) {
  Vector v(5);
  v << 0, -2, 0, 0, 1e-300;
  const auto x = SparseSignal::from_values(v);
  EXPECT_EQ(x.support(), (std::vector<int>{1, 4}));
  EXPECT_EQ(x.k(), 2);
}

}  // namespace
}  // namespace cskit
