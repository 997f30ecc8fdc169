#include "sadmm/problems.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <Eigen/QR>

#include "sadmm/errors.hpp"
#include "sadmm/random.hpp"

namespace sadmm {

GraphSpec build_graph(const Dataset& data, double rho_c) {
  if (data.n() < 2) throw DataError("build_graph needs at least two samples");
  if (!(rho_c > 0.0 && rho_c <= 1.0)) throw ParameterError("rho_c must lie in (0, 1]");

  Matrix x = data.dense_features();
  x.rowwise() -= x.colwise().mean();
  const Vector norms = x.colwise().norm();
  const Matrix cov = x.transpose() * x;

  GraphSpec g;
  g.dim = data.d();
  g.rho_c = rho_c;
  for (Index i = 0; i < g.dim; ++i) {
    if (norms[i] == 0.0) continue;
    for (Index j = i + 1; j < g.dim; ++j) {
      if (norms[j] == 0.0) continue;
      const double r = std::clamp(cov(i, j) / (norms[i] * norms[j]), -1.0, 1.0);
      // Round-off can leave identical columns a hair below 1.
      if (std::abs(r) >= rho_c * (1.0 - 1e-12)) g.edges.emplace_back(i, j);
    }
  }
  return g;
}

RowMajorMatrix edge_difference_matrix(const GraphSpec& graph) {
  RowMajorMatrix g = RowMajorMatrix::Zero(static_cast<Index>(graph.edges.size()), graph.dim);
  for (std::size_t k = 0; k < graph.edges.size(); ++k) {
    const auto [i, j] = graph.edges[k];
    if (i < 0 || j < 0 || i >= graph.dim || j >= graph.dim || i == j)
      throw IndexError("graph edge (" + std::to_string(i) + ", " + std::to_string(j) + ") is invalid");
    g(static_cast<Index>(k), i) = 1.0;
    g(static_cast<Index>(k), j) = -1.0;
  }
  return g;
}

Problem build_fused_lasso(const Dataset& data, double lambda1, const GraphSpec& graph) {
  if (!data.is_binary()) throw DataError("fused lasso needs labels in {-1, +1}");
  if (graph.dim != data.d())
    throw ShapeError("graph has dim " + std::to_string(graph.dim) + ", data has " + std::to_string(data.d()));

  std::vector<LossComponent> comps;
  comps.reserve(static_cast<std::size_t>(data.n()));
  for (Index i = 0; i < data.n(); ++i) comps.emplace_back(SigmoidComponent{data.dense_row(i), data.labels()[i]});

  LinearOperator op = graph.edges.empty()
                          ? LinearOperator::identity(data.d())
                          : LinearOperator::vertical_stack({LinearOperator::dense(edge_difference_matrix(graph)),
                                                            LinearOperator::identity(data.d())});
  Problem::Metadata meta{
      {"lambda1", std::to_string(lambda1)},
      {"graph_method", graph.method},
      {"graph_note", "correlation-threshold substitute for the sparse inverse covariance graph"},
      {"rho_c", std::to_string(graph.rho_c)},
      {"edges", std::to_string(graph.edges.size())},
      {"n", std::to_string(data.n())},
      {"d", std::to_string(data.d())},
  };
  return Problem(FiniteSumLoss(std::move(comps)), Regularizer::l1(lambda1), std::move(op), "fused_lasso",
                 std::move(meta));
}

Vector make_phantom(const ToyReconstructionSpec& spec) {
  const Index h = spec.height, w = spec.width;
  std::vector<Rectangle> rects = spec.phantom;
  if (rects.empty()) {
    rects.push_back({h / 4, w / 4, h / 2, w / 4, 1.0});
    rects.push_back({h / 2, (5 * w) / 8, (3 * h) / 8, w / 4, 0.5});
  }
  Vector img = Vector::Zero(h * w);
  for (const auto& r : rects) {
    if (r.top < 0 || r.left < 0 || r.height < 0 || r.width < 0 || r.top + r.height > h || r.left + r.width > w)
      throw ParameterError("phantom rectangle outside the image");
    for (Index i = r.top; i < r.top + r.height; ++i)
      for (Index j = r.left; j < r.left + r.width; ++j) img[i * w + j] = r.value;
  }
  return img;
}

ToyReconstruction build_toy_reconstruction(const ToyReconstructionSpec& spec) {
  const Index h = spec.height, w = spec.width;
  if (h < 2 || w < 2) throw ParameterError("toy image must be at least 2x2");
  if (!(spec.noise_sigma >= 0.0)) throw ParameterError("noise_sigma must be nonnegative");
  if (!(spec.lambda > 0.0)) throw ParameterError("lambda must be positive");
  if (spec.forward == ForwardKind::kMask && !(spec.keep > 0.0 && spec.keep <= 1.0))
    throw ParameterError("mask keep fraction must lie in (0, 1]");
  if (spec.forward == ForwardKind::kBlur && spec.blur_radius < 0)
    throw ParameterError("blur radius must be nonnegative");

  Vector truth = make_phantom(spec);
  const CounterRng rng(spec.seed);

  std::vector<Vector> rows;
  if (spec.forward == ForwardKind::kBlur) {
    const Index r = spec.blur_radius;
    for (Index i = 0; i < h; ++i) {
      for (Index j = 0; j < w; ++j) {
        Vector row = Vector::Zero(h * w);
        const Index i0 = std::max<Index>(0, i - r), i1 = std::min(h - 1, i + r);
        const Index j0 = std::max<Index>(0, j - r), j1 = std::min(w - 1, j + r);
        const double weight = 1.0 / static_cast<double>((i1 - i0 + 1) * (j1 - j0 + 1));
        for (Index a = i0; a <= i1; ++a)
          for (Index b = j0; b <= j1; ++b) row[a * w + b] = weight;
        rows.push_back(std::move(row));
      }
    }
  } else {
    for (Index p = 0; p < h * w; ++p) {
      if (spec.keep < 1.0 && rng.uniform(Stream::kData, 1, static_cast<std::uint64_t>(p)) >= spec.keep) continue;
      Vector row = Vector::Zero(h * w);
      row[p] = 1.0;
      rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParameterError("mask keeps no pixels");
  }

  std::vector<LossComponent> comps;
  comps.reserve(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    double b = rows[k].dot(truth);
    if (spec.noise_sigma > 0.0) b += spec.noise_sigma * rng.normal(Stream::kData, 2, k);
    comps.emplace_back(LeastSquaresComponent{std::move(rows[k]), b});
  }

  Regularizer reg = spec.reg == RegKind::kL0 ? Regularizer::l0(spec.lambda) : Regularizer::l1(spec.lambda);
  Problem::Metadata meta{
      {"height", std::to_string(h)},
      {"width", std::to_string(w)},
      {"forward", spec.forward == ForwardKind::kBlur ? "blur" : "mask"},
      {"noise_sigma", std::to_string(spec.noise_sigma)},
      {"reg", spec.reg == RegKind::kL0 ? "l0" : "l1"},
  };
  Problem problem(FiniteSumLoss(std::move(comps)), std::move(reg), LinearOperator::finite_difference_2d(h, w),
                  "toy_reconstruction", std::move(meta));
  return {std::move(problem), std::move(truth)};
}

Problem make_least_squares_problem(const RowMajorMatrix& rows, const Vector& targets, Regularizer reg,
                                   LinearOperator op, std::string name) {
  if (rows.rows() != targets.size()) throw ShapeError("least squares: row and target counts differ");
  std::vector<LossComponent> comps;
  comps.reserve(static_cast<std::size_t>(rows.rows()));
  for (Index i = 0; i < rows.rows(); ++i) comps.emplace_back(LeastSquaresComponent{rows.row(i).transpose(), targets[i]});
  Vector xs = Matrix(rows).completeOrthogonalDecomposition().solve(targets);

  std::ostringstream os;
  os.precision(17);
  for (Index j = 0; j < xs.size(); ++j) os << (j ? " " : "") << xs[j];
  Problem::Metadata meta{{"smooth_minimizer", os.str()}};
  return Problem(FiniteSumLoss(std::move(comps)), std::move(reg), std::move(op), std::move(name), std::move(meta),
                 std::move(xs));
}

Problem generate_synthetic_quadratic(Index n, Index d, std::uint64_t seed, double conditioning) {
  if (n < 1 || d < 1) throw ParameterError("synthetic quadratic needs n, d >= 1");
  if (!(conditioning >= 1.0) || !std::isfinite(conditioning)) throw ParameterError("conditioning must be >= 1");
  const CounterRng rng(seed);
  RowMajorMatrix rows(n, d);
  Vector targets(n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < d; ++j)
      rows(i, j) = rng.normal(Stream::kData, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(j));
    double norm = rows.row(i).norm();
    if (norm == 0.0) {
      rows(i, 0) = 1.0;
      norm = 1.0;
    }
    const double frac = n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.0;
    rows.row(i) *= std::pow(conditioning, frac) / norm;
    targets[i] = rng.normal(Stream::kData, static_cast<std::uint64_t>(n) + 1, static_cast<std::uint64_t>(i));
  }
  Problem p = make_least_squares_problem(rows, targets, Regularizer::l1(0.1), LinearOperator::identity(d),
                                         "synthetic_quadratic");
  Problem::Metadata meta = p.metadata();
  meta["seed"] = std::to_string(seed);
  meta["conditioning"] = std::to_string(conditioning);
  return Problem(p.loss(), p.reg(), p.op(), p.name(), std::move(meta), p.smooth_minimizer());
}

void write_pgm(const Vector& image, Index height, Index width, std::ostream& out) {
  if (image.size() != height * width) throw ShapeError("write_pgm: image size does not match height*width");
  const double lo = image.size() ? image.minCoeff() : 0.0;
  const double hi = image.size() ? image.maxCoeff() : 0.0;
  const double span = hi > lo ? hi - lo : 1.0;
  out << "P2\n" << width << ' ' << height << "\n255\n";
  for (Index i = 0; i < height; ++i) {
    for (Index j = 0; j < width; ++j) {
      const long v = std::lround(255.0 * (image[i * width + j] - lo) / span);
      out << (j ? " " : "") << std::clamp(v, 0L, 255L);
    }
    out << '\n';
  }
}

void write_pgm(const Vector& image, Index height, Index width, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write \"" + path + "\"");
  write_pgm(image, height, width, out);
}

}  // namespace sadmm
