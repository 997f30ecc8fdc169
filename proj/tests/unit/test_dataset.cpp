#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "sadmm/dataset.hpp"
#include "sadmm/errors.hpp"

using namespace sadmm;

namespace {

std::size_t parse_error_line(const std::string& text, const LibsvmOptions& opts = {}) {
  try {
    parse_libsvm_text(text, opts);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST(Libsvm, ParsesSparseRows) {
  const auto data = parse_libsvm_text("+1 1:0.5 3:2\n-1 2:1\n\n# note\n1 3:-4 # trailing\n");
  EXPECT_EQ(data.n(), 3);
  EXPECT_EQ(data.d(), 3);
  EXPECT_EQ(data.labels(), (Vector(3) << 1, -1, 1).finished());
  EXPECT_EQ(data.dense_row(0), (Vector(3) << 0.5, 0, 2).finished());
  EXPECT_EQ(data.dense_row(1), (Vector(3) << 0, 1, 0).finished());
  EXPECT_EQ(data.dense_row(2), (Vector(3) << 0, 0, -4).finished());
  EXPECT_TRUE(data.is_binary());
  EXPECT_THROW(data.dense_row(3), IndexError);
}

TEST(Libsvm, LabelMappings) {
  EXPECT_EQ(parse_libsvm_text("0 1:1\n1 1:1\n").labels(), (Vector(2) << -1, 1).finished());
  EXPECT_EQ(parse_libsvm_text("2 1:1\n1 1:1\n").labels(), (Vector(2) << 1, -1).finished());
  EXPECT_EQ(parse_libsvm_text("1 1:1\n1 1:1\n").labels(), (Vector(2) << 1, 1).finished());
  EXPECT_THROW(parse_libsvm_text("0 1:1\n3 1:1\n"), DataError);
  LibsvmOptions raw;
  raw.binary = false;
  EXPECT_EQ(parse_libsvm_text("3.5 1:1\n7 1:1\n", raw).labels(), (Vector(2) << 3.5, 7).finished());
}

TEST(Libsvm, ExplicitDimension) {
  LibsvmOptions o;
  o.dim = 5;
  EXPECT_EQ(parse_libsvm_text("1 2:1\n", o).d(), 5);
  o.dim = 1;
  EXPECT_EQ(parse_error_line("1 1:1\n-1 2:1\n", o), 2u);
  // A sample with no features still has a row.
  EXPECT_EQ(parse_libsvm_text("1\n-1 1:2\n").n(), 2);
}

TEST(Libsvm, ErrorsCarryLineNumbers) {
  EXPECT_EQ(parse_error_line("1 1:1\n1 2-1\n"), 2u);
  EXPECT_EQ(parse_error_line("1 0:1\n"), 1u);
  EXPECT_EQ(parse_error_line("# c\n1 2:1 2:3\n"), 2u);
  EXPECT_EQ(parse_error_line("1 3:1 2:3\n"), 1u);
  EXPECT_EQ(parse_error_line("1 1:abc\n"), 1u);
  EXPECT_EQ(parse_error_line("x 1:1\n"), 1u);
  EXPECT_THROW(parse_libsvm_text("\n# only comments\n"), DataError);
}

TEST(Libsvm, WriteReadRoundTripIsExact) {
  const auto data = parse_libsvm_text("1 1:0.1 4:3.141592653589793\n-1 2:1e-300 3:-2.5\n");
  std::ostringstream os;
  write_libsvm(data, os);
  LibsvmOptions raw;
  raw.binary = false;
  raw.dim = data.d();
  const auto back = parse_libsvm_text(os.str(), raw);
  EXPECT_EQ(back.labels(), data.labels());
  EXPECT_EQ(back.dense_features(), data.dense_features());
}

TEST(Libsvm, LoadFromFile) {
  const auto path = std::filesystem::temp_directory_path() / "sadmm_test_load.svm";
  {
    std::ofstream f(path);
    f << "1 1:2\n-1 2:3\n";
  }
  EXPECT_EQ(load_libsvm(path.string()).n(), 2);
  std::filesystem::remove(path);
  EXPECT_THROW(load_libsvm(path.string()), DataError);
}

TEST(DatasetShape, MismatchThrows) {
  SparseRows rows(3, 2);
  EXPECT_THROW(Dataset(rows, Vector::Ones(2)), ShapeError);
}

TEST(Split, DeterministicPartition) {
  std::ostringstream text;
  for (int i = 0; i < 50; ++i) text << (i % 2 ? 1 : -1) << " 1:" << i << "\n";
  const auto data = parse_libsvm_text(text.str());
  const auto [train, test] = train_test_split(data, 0.2, 7);
  EXPECT_EQ(train.n(), 40);
  EXPECT_EQ(test.n(), 10);
  std::set<double> seen;
  for (Index i = 0; i < train.n(); ++i) seen.insert(train.dense_row(i)[0]);
  for (Index i = 0; i < test.n(); ++i) seen.insert(test.dense_row(i)[0]);
  EXPECT_EQ(seen.size(), 50u);

  const auto again = train_test_split(data, 0.2, 7);
  EXPECT_EQ(again.first.dense_features(), train.dense_features());
  const auto other = train_test_split(data, 0.2, 8);
  EXPECT_NE(other.first.dense_features(), train.dense_features());

  EXPECT_EQ(train_test_split(data, 0.0, 1).second.n(), 0);
  EXPECT_THROW(train_test_split(data, 1.0, 1), ParameterError);
}

TEST(SigmoidLoss, MeanOverSamples) {
  const auto data = parse_libsvm_text("1 1:1\n-1 1:2\n");
  const Vector x = Vector::Constant(1, 0.5);
  const double expected = 0.5 * (1.0 / (1.0 + std::exp(0.5)) + 1.0 / (1.0 + std::exp(-1.0)));
  EXPECT_NEAR(mean_sigmoid_loss(data, x), expected, 1e-15);
  EXPECT_DOUBLE_EQ(mean_sigmoid_loss(data, Vector::Zero(1)), 0.5);
}
