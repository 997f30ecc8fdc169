#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sadmm/dataset.hpp"
#include "sadmm/problem.hpp"

namespace sadmm {

/// Feature graph for the fused penalty: one edge (i, j), i < j, per row of G.
struct GraphSpec {
  Index dim = 0;
  std::vector<std::pair<Index, Index>> edges;
  std::string method = "correlation_threshold";
  double rho_c = 0.0;
};

/// Edges between feature columns whose |Pearson correlation| >= rho_c,
/// ordered by (i, j). Constant columns correlate 0 with everything.
/// Requires n >= 2 and rho_c in (0, 1].
GraphSpec build_graph(const Dataset& data, double rho_c);

/// Dense E x d matrix with rows e_i - e_j.
RowMajorMatrix edge_difference_matrix(const GraphSpec& graph);

inline constexpr double kDefaultFusedLambda = 1e-5;

/// Sigmoid components per sample, F = lambda1 ||.||_1, A = [G; I]
/// (plain Identity for an empty graph). DataError on non-binary labels.
Problem build_fused_lasso(const Dataset& data, double lambda1, const GraphSpec& graph);

enum class ForwardKind { kBlur, kMask };
enum class RegKind { kL0, kL1 };

struct Rectangle {
  Index top = 0;
  Index left = 0;
  Index height = 0;
  Index width = 0;
  double value = 1.0;
};

struct ToyReconstructionSpec {
  Index height = 16;
  Index width = 16;
  ForwardKind forward = ForwardKind::kBlur;
  Index blur_radius = 1;   // box half-width; 0 is the identity
  double keep = 1.0;       // mask: fraction of pixels observed, in (0, 1]
  double noise_sigma = 0.0;
  double lambda = 1e-3;
  RegKind reg = RegKind::kL0;
  std::uint64_t seed = 0;
  /// Painted in order onto a zero background; a default two-block phantom
  /// is used when empty.
  std::vector<Rectangle> phantom;
};

struct ToyReconstruction {
  Problem problem;
  Vector truth;
};

/// Row-major phantom image of the spec's rectangles.
Vector make_phantom(const ToyReconstructionSpec& spec);

/// Least-squares rows of the forward map (box blur or pixel mask),
/// measurements with seeded Gaussian noise, A = 2-D finite differences.
ToyReconstruction build_toy_reconstruction(const ToyReconstructionSpec& spec);

/// Least-squares problem (1/n) sum (<r_i, x> - b_i)^2 + F(Ax), with the
/// minimum-norm minimiser of the smooth part attached.
Problem make_least_squares_problem(const RowMajorMatrix& rows, const Vector& targets, Regularizer reg,
                                   LinearOperator op, std::string name = "least_squares");

/// n Gaussian rows rescaled to norms geometric from 1 to `conditioning`,
/// Gaussian targets, F = 0.1 ||.||_1, A = Identity.
Problem generate_synthetic_quadratic(Index n, Index d, std::uint64_t seed, double conditioning);

/// ASCII PGM (P2), intensities mapped linearly from [min, max] to [0, 255].
void write_pgm(const Vector& image, Index height, Index width, std::ostream& out);
void write_pgm(const Vector& image, Index height, Index width, const std::string& path);

}  // namespace sadmm
