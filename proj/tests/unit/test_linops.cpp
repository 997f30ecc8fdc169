#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>

#include "oracles.hpp"
#include "sadmm/errors.hpp"
#include "sadmm/linops.hpp"

using namespace sadmm;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

RowMajorMatrix mat2(double a, double b, double c, double d) {
  RowMajorMatrix m(2, 2);
  m << a, b, c, d;
  return m;
}

std::vector<LinearOperator> sample_operators(std::mt19937_64& rng) {
  return {
      LinearOperator::identity(6),
      LinearOperator::finite_difference_1d(9),
      LinearOperator::finite_difference_2d(4, 5),
      LinearOperator::dense(oracle::random_matrix(rng, 7, 5)),
      LinearOperator::vertical_stack({LinearOperator::finite_difference_1d(5), LinearOperator::identity(5),
                                      LinearOperator::dense(oracle::random_matrix(rng, 3, 5))}),
  };
}

}  // namespace

TEST(LinearOperatorApply, IdentityReturnsInput) {
  EXPECT_EQ(LinearOperator::identity(3).apply(vec({1, 2, 3})), vec({1, 2, 3}));
}

TEST(LinearOperatorApply, ForwardDifference) {
  EXPECT_EQ(LinearOperator::finite_difference_1d(3).apply(vec({1, 3, 6})), vec({2, 3}));
}

TEST(LinearOperatorApply, DenseProduct) {
  EXPECT_EQ(LinearOperator::dense(mat2(1, 0, 1, 1)).apply(vec({2, 3})), vec({2, 5}));
}

TEST(LinearOperatorAdjoint, IdentityReturnsInput) {
  EXPECT_EQ(LinearOperator::identity(2).adjoint(vec({4, 5})), vec({4, 5}));
}

TEST(LinearOperatorAdjoint, ForwardDifferenceIsNegativeDivergence) {
  EXPECT_EQ(LinearOperator::finite_difference_1d(3).adjoint(vec({1, 1})), vec({-1, 0, 1}));
}

TEST(LinearOperatorAdjoint, DenseTransposeProduct) {
  EXPECT_EQ(LinearOperator::dense(mat2(1, 0, 1, 1)).adjoint(vec({1, 1})), vec({2, 1}));
}

TEST(LinearOperator, RejectsWrongLengths) {
  const auto op = LinearOperator::finite_difference_1d(4);
  EXPECT_THROW(op.apply(Vector::Zero(3)), ShapeError);
  EXPECT_THROW(op.adjoint(Vector::Zero(4)), ShapeError);
  EXPECT_THROW(LinearOperator::vertical_stack({LinearOperator::identity(3), LinearOperator::identity(4)}),
               ShapeError);
}

TEST(LinearOperator, VerticalStackStacksOutputs) {
  const auto op = LinearOperator::vertical_stack({LinearOperator::finite_difference_1d(4), LinearOperator::identity(4)});
  EXPECT_EQ(op.out_dim(), 7);
  EXPECT_EQ(op.in_dim(), 4);
  EXPECT_EQ(op.apply(vec({1, 2, 4, 8})), vec({1, 2, 4, 1, 2, 4, 8}));
  EXPECT_EQ(op.members().size(), 2u);
}

TEST(LinearOperator, FiniteDifference2DMatchesExplicitStencil) {
  const Index h = 3, w = 4;
  const auto op = LinearOperator::finite_difference_2d(h, w);
  EXPECT_EQ(op.out_dim(), h * (w - 1) + (h - 1) * w);
  Matrix expected = Matrix::Zero(op.out_dim(), h * w);
  Index r = 0;
  for (Index i = 0; i < h; ++i)
    for (Index j = 0; j + 1 < w; ++j, ++r) {
      expected(r, i * w + j + 1) = 1.0;
      expected(r, i * w + j) = -1.0;
    }
  for (Index i = 0; i + 1 < h; ++i)
    for (Index j = 0; j < w; ++j, ++r) {
      expected(r, (i + 1) * w + j) = 1.0;
      expected(r, i * w + j) = -1.0;
    }
  EXPECT_EQ(op.to_dense(), expected);
}

TEST(LinearOperator, AdjointConsistencyOnRandomPairs) {
  std::mt19937_64 rng(1);
  for (const auto& op : sample_operators(rng)) {
    for (int k = 0; k < 1000; ++k) {
      const Vector x = oracle::random_vector(rng, op.in_dim());
      const Vector y = oracle::random_vector(rng, op.out_dim());
      const double lhs = op.apply(x).dot(y);
      const double rhs = x.dot(op.adjoint(y));
      ASSERT_LE(std::abs(lhs - rhs), 1e-10 * std::max(1.0, std::abs(lhs))) << op.describe();
    }
  }
}

TEST(LinearOperator, NormalOperatorIsPositiveSemidefinite) {
  std::mt19937_64 rng(2);
  for (const auto& op : sample_operators(rng))
    for (int k = 0; k < 200; ++k) {
      const Vector x = oracle::random_vector(rng, op.in_dim());
      EXPECT_GE(x.dot(op.adjoint(op.apply(x))), 0.0);
      const Vector y = oracle::random_vector(rng, op.out_dim());
      EXPECT_GE(y.dot(op.apply(op.adjoint(y))), 0.0);
    }
}

TEST(Spectral, DiagonalMatrix) {
  RowMajorMatrix d = RowMajorMatrix::Zero(2, 2);
  d(0, 0) = 3.0;
  d(1, 1) = 1.0;
  const auto s = estimate_spectral(LinearOperator::dense(d));
  EXPECT_NEAR(s.op_norm_sq, 9.0, 9e-10);
  EXPECT_NEAR(s.lambda_min_aat, 1.0, 1e-12);
  EXPECT_NEAR(s.condition_kappa, 9.0, 1e-8);
}

TEST(Spectral, IdentityIsExact) {
  const auto s = estimate_spectral(LinearOperator::identity(5));
  EXPECT_EQ(s.op_norm_sq, 1.0);
  EXPECT_EQ(s.lambda_min_aat, 1.0);
  EXPECT_EQ(s.condition_kappa, 1.0);
}

TEST(Spectral, TallStackIsSingular) {
  const auto op = LinearOperator::vertical_stack({LinearOperator::finite_difference_1d(4), LinearOperator::identity(4)});
  const auto s = estimate_spectral(op);
  const Matrix a = op.to_dense();
  const Eigen::SelfAdjointEigenSolver<Matrix> gram(a * a.transpose());
  EXPECT_NEAR(s.op_norm_sq, gram.eigenvalues().maxCoeff(), 1e-9 * s.op_norm_sq);
  EXPECT_NEAR(gram.eigenvalues().minCoeff(), 0.0, 1e-12);
  EXPECT_EQ(s.lambda_min_aat, 0.0);
  EXPECT_EQ(s.condition_kappa, std::numeric_limits<double>::infinity());
}

TEST(Spectral, RandomDenseMatchesEigendecomposition) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> dim(1, 50);
  for (int trial = 0; trial < 20; ++trial) {
    const int m = dim(rng), d = dim(rng);
    const Matrix a = oracle::random_matrix(rng, m, d);
    const auto s = estimate_spectral(LinearOperator::dense(a));
    const Eigen::SelfAdjointEigenSolver<Matrix> aat(a * a.transpose());
    const double hi = aat.eigenvalues().maxCoeff();
    EXPECT_NEAR(s.op_norm_sq, hi, 1e-6 * hi) << m << "x" << d;
    if (m <= d) {
      const double lo = aat.eigenvalues().minCoeff();
      EXPECT_NEAR(s.lambda_min_aat, lo, 1e-6 * hi) << m << "x" << d;
      EXPECT_LE(s.lambda_min_aat, s.op_norm_sq);
    } else {
      EXPECT_EQ(s.lambda_min_aat, 0.0);
    }
  }
}

TEST(Spectral, DeterministicForSeed) {
  std::mt19937_64 rng(4);
  const auto op = LinearOperator::dense(oracle::random_matrix(rng, 20, 30));
  const auto a = estimate_spectral(op, 1e-10, 100000, 9);
  const auto b = estimate_spectral(op, 1e-10, 100000, 9);
  EXPECT_EQ(a.op_norm_sq, b.op_norm_sq);
  EXPECT_EQ(a.lambda_min_aat, b.lambda_min_aat);
}

TEST(Spectral, CachedOnOperator) {
  const auto op = LinearOperator::finite_difference_2d(5, 5);
  const auto& a = op.spectral();
  const auto& b = op.spectral();
  EXPECT_EQ(&a, &b);
  // Largest grid-Laplacian eigenvalue: 2 (2 - 2 cos(4 pi / 5)).
  EXPECT_NEAR(a.op_norm_sq, 4.0 + 4.0 * std::cos(M_PI / 5.0), 1e-8);
  EXPECT_EQ(a.lambda_min_aat, 0.0);
}

TEST(Spectral, NonConvergenceCarriesBestEstimate) {
  std::mt19937_64 rng(5);
  const auto op = LinearOperator::dense(oracle::random_matrix(rng, 30, 30));
  try {
    estimate_spectral(op, 1e-14, 1, 0);
    FAIL() << "expected EstimationError";
  } catch (const EstimationError& e) {
    EXPECT_GT(e.best_estimate(), 0.0);
  }
}

TEST(Spectral, RejectsBadOptions) {
  EXPECT_THROW(estimate_spectral(LinearOperator::identity(2), 0.0, 10, 0), ParameterError);
  EXPECT_THROW(estimate_spectral(LinearOperator::identity(2), 1e-6, 0, 0), ParameterError);
}

TEST(DenseMatrixText, ParsesRows) {
  const auto m = parse_dense_matrix("2 3\n1 2 3\n4 5 6\n");
  ASSERT_EQ(m.rows(), 2);
  ASSERT_EQ(m.cols(), 3);
  EXPECT_EQ(m(1, 2), 6.0);
}

TEST(DenseMatrixText, ReportsLineOfBadRow) {
  try {
    parse_dense_matrix("2 2\n1 2\n3 x\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(parse_dense_matrix("2 2\n1 2\n"), ParseError);
  EXPECT_THROW(parse_dense_matrix("2 2\n1 2 3\n4 5\n"), ParseError);
}
