#include <gtest/gtest.h>

#include <filesystem>

#include "cskit/io.hpp"
#include "cskit/random.hpp"

namespace cskit {
namespace {

namespace fs = std::filesystem;

fs::path temp_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("cskit_io_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// Exact recovery of arbitrary doubles, including extremes, through CSV text.
TEST(MatrixCsv, RoundTripIsExact) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed);
    Matrix a(3, 7);
    for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = rng.normal() * std::pow(10.0, rng.normal() * 30);
    a(0, 0) = 5e-324;
    a(1, 1) = -1.7976931348623157e308;
    a(2, 2) = 0.1;
    const Matrix back = matrix_from_csv(matrix_to_csv(a));
    ASSERT_EQ(back.rows(), 3);
    ASSERT_EQ(back.cols(), 7);
    for (Eigen::Index i = 0; i < a.size(); ++i) EXPECT_EQ(back.data()[i], a.data()[i]);
  }
}

TEST(MatrixCsv, RowMajorOneRowPerLine) {
  Matrix a(2, 3);
  a << 1, 2, 3, 4, 5, 6;
  EXPECT_EQ(matrix_to_csv(a), "1,2,3\n4,5,6\n");
}

TEST(MatrixCsv, RejectsRaggedAndGarbage) {
  EXPECT_THROW(matrix_from_csv("1,2\n3\n"), InvalidArgument);
  EXPECT_THROW(matrix_from_csv("1,x\n"), InvalidArgument);
  EXPECT_THROW(matrix_from_csv(""), InvalidArgument);
  EXPECT_NO_THROW(matrix_from_csv("1, 2\r\n3,4\n\n"));
}

TEST(MatrixJson, EnvelopeRoundTrip) {
  const auto a = build_matrix(MatrixKind::Toeplitz, 3, 6, 21, true);
  const auto doc = matrix_to_json(a);
  EXPECT_EQ(doc.at("kind"), "toeplitz");
  EXPECT_EQ(doc.at("m"), 3);
  EXPECT_EQ(doc.at("n"), 6);
  EXPECT_EQ(doc.at("seed"), 21u);
  EXPECT_EQ(doc.at("normalized"), true);
  const auto back = matrix_from_json(nlohmann::json::parse(doc.dump()));
  EXPECT_EQ(back.kind(), MatrixKind::Toeplitz);
  EXPECT_TRUE(back.columns_normalized());
  EXPECT_EQ(back.entries(), a.entries());
}

TEST(MatrixJson, RejectsShapeMismatch) {
  nlohmann::json doc = {{"m", 2}, {"n", 2}, {"data", {{1.0, 2.0}}}};
  EXPECT_THROW(matrix_from_json(doc), InvalidArgument);
  doc = {{"m", 1}, {"n", 2}, {"data", {{1.0, 2.0}}}, {"kind", "weird"}};
  EXPECT_THROW(matrix_from_json(doc), InvalidArgument);
}

TEST(Signal, CsvAndJsonRoundTrip) {
  const auto x = generate_sparse_signal(30, 5, Amplitude::UnitGaussian, 4);
  const auto from_csv = signal_from_csv(signal_to_csv(x.values()));
  EXPECT_EQ(from_csv.values(), x.values());
  EXPECT_EQ(from_csv.support(), x.support());
  const auto from_json = signal_from_json(signal_to_json(x));
  EXPECT_EQ(from_json.values(), x.values());
  auto doc = signal_to_json(x);
  doc["support"] = std::vector<int>{0};
  EXPECT_THROW(signal_from_json(doc), InvalidArgument);
}

TEST(LoadMatrix, CsvFilesAreCustom) {
  const auto dir = temp_dir("load");
  write_text_file(dir / "a.csv", "1,0,0.5\n0,1,0.5\n");
  const auto a = load_matrix(dir / "a.csv");
  EXPECT_EQ(a.kind(), MatrixKind::Custom);
  EXPECT_EQ(a.m(), 2);
  EXPECT_EQ(a.n(), 3);
  const auto g = build_matrix(MatrixKind::Gaussian, 2, 5, 1);
  write_text_file(dir / "g.json", matrix_to_json(g).dump());
  EXPECT_EQ(load_matrix(dir / "g.json").entries(), g.entries());
  EXPECT_THROW(load_matrix(dir / "missing.csv"), std::runtime_error);
  write_text_file(dir / "bad.json", "{not json");
  EXPECT_THROW(load_matrix(dir / "bad.json"), InvalidArgument);
}

TEST(FormatDouble, SpecialValues) {
  EXPECT_EQ(format_double(INFINITY), "inf");
  EXPECT_EQ(format_double(-INFINITY), "-inf");
  EXPECT_EQ(format_double(NAN), "nan");
  EXPECT_TRUE(std::isinf(parse_double("inf")));
  EXPECT_EQ(parse_double("+2.5"), 2.5);
}

}  // namespace
}  // namespace cskit
