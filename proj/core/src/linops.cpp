#include "sadmm/linops.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>

#include "sadmm/errors.hpp"
#include "sadmm/random.hpp"

namespace sadmm {

class LinearOperator::Impl {
 public:
  Impl(OperatorKind kind, Index in_dim, Index out_dim)
      : kind_(kind), in_dim_(in_dim), out_dim_(out_dim) {}
  virtual ~Impl() = default;

  // out has the right size and is overwritten.
  virtual void apply_into(const Vector& x, Eigen::Ref<Vector> out) const = 0;
  virtual void adjoint_into(const Vector& y, Eigen::Ref<Vector> out) const = 0;
  virtual std::string describe() const = 0;
  virtual const std::vector<LinearOperator>& members() const {
    static const std::vector<LinearOperator> kNone;
    return kNone;
  }

  OperatorKind kind() const { return kind_; }
  Index in_dim() const { return in_dim_; }
  Index out_dim() const { return out_dim_; }

  mutable std::once_flag spectral_once;
  mutable SpectralEstimates spectral_cache;

 private:
  OperatorKind kind_;
  Index in_dim_;
  Index out_dim_;
};

namespace {

std::string dims(Index a, Index b) { return std::to_string(a) + "x" + std::to_string(b); }

class DenseImpl final : public LinearOperator::Impl {
 public:
  explicit DenseImpl(RowMajorMatrix m)
      : Impl(OperatorKind::kDense, m.cols(), m.rows()), m_(std::move(m)) {}
  void apply_into(const Vector& x, Eigen::Ref<Vector> out) const override { out.noalias() = m_ * x; }
  void adjoint_into(const Vector& y, Eigen::Ref<Vector> out) const override {
    out.noalias() = m_.transpose() * y;
  }
  std::string describe() const override { return "dense(" + dims(m_.rows(), m_.cols()) + ")"; }

 private:
  RowMajorMatrix m_;
};

class IdentityImpl final : public LinearOperator::Impl {
 public:
  explicit IdentityImpl(Index d) : Impl(OperatorKind::kIdentity, d, d) {}
  void apply_into(const Vector& x, Eigen::Ref<Vector> out) const override { out = x; }
  void adjoint_into(const Vector& y, Eigen::Ref<Vector> out) const override { out = y; }
  std::string describe() const override { return "identity(" + std::to_string(in_dim()) + ")"; }
};

class Fd1dImpl final : public LinearOperator::Impl {
 public:
  explicit Fd1dImpl(Index d) : Impl(OperatorKind::kFiniteDifference1D, d, d - 1) {}
  void apply_into(const Vector& x, Eigen::Ref<Vector> out) const override {
    const Index m = out_dim();
    out = x.tail(m) - x.head(m);
  }
  void adjoint_into(const Vector& y, Eigen::Ref<Vector> out) const override {
    const Index m = out_dim();
    out.setZero();
    out.tail(m) += y;
    out.head(m) -= y;
  }
  std::string describe() const override { return "fd1d(" + std::to_string(in_dim()) + ")"; }
};

class Fd2dImpl final : public LinearOperator::Impl {
 public:
  Fd2dImpl(Index h, Index w)
      : Impl(OperatorKind::kFiniteDifference2D, h * w, h * (w - 1) + (h - 1) * w), h_(h), w_(w) {}

  void apply_into(const Vector& x, Eigen::Ref<Vector> out) const override {
    Index k = 0;
    for (Index r = 0; r < h_; ++r)
      for (Index c = 0; c + 1 < w_; ++c) out[k++] = x[r * w_ + c + 1] - x[r * w_ + c];
    for (Index r = 0; r + 1 < h_; ++r)
      for (Index c = 0; c < w_; ++c) out[k++] = x[(r + 1) * w_ + c] - x[r * w_ + c];
  }

  void adjoint_into(const Vector& y, Eigen::Ref<Vector> out) const override {
    out.setZero();
    Index k = 0;
    for (Index r = 0; r < h_; ++r)
      for (Index c = 0; c + 1 < w_; ++c, ++k) {
        out[r * w_ + c + 1] += y[k];
        out[r * w_ + c] -= y[k];
      }
    for (Index r = 0; r + 1 < h_; ++r)
      for (Index c = 0; c < w_; ++c, ++k) {
        out[(r + 1) * w_ + c] += y[k];
        out[r * w_ + c] -= y[k];
      }
  }

  std::string describe() const override { return "fd2d(" + dims(h_, w_) + ")"; }

 private:
  Index h_;
  Index w_;
};

class StackImpl final : public LinearOperator::Impl {
 public:
  StackImpl(std::vector<LinearOperator> members, Index in_dim, Index out_dim)
      : Impl(OperatorKind::kVerticalStack, in_dim, out_dim), members_(std::move(members)) {}

  void apply_into(const Vector& x, Eigen::Ref<Vector> out) const override {
    Index offset = 0;
    for (const auto& m : members_) {
      out.segment(offset, m.out_dim()) = m.apply(x);
      offset += m.out_dim();
    }
  }

  void adjoint_into(const Vector& y, Eigen::Ref<Vector> out) const override {
    out.setZero();
    Index offset = 0;
    for (const auto& m : members_) {
      out += m.adjoint(y.segment(offset, m.out_dim()));
      offset += m.out_dim();
    }
  }

  std::string describe() const override {
    std::string s = "stack[";
    for (std::size_t i = 0; i < members_.size(); ++i) {
      if (i) s += "; ";
      s += members_[i].describe();
    }
    return s + "]";
  }

  const std::vector<LinearOperator>& members() const override { return members_; }

 private:
  std::vector<LinearOperator> members_;
};

struct PowerResult {
  double value;
  bool converged;
};

// Largest eigenvalue of a symmetric PSD map via power iteration with a
// residual stopping rule ||Mv - lambda v|| <= tol * lambda.
template <typename MatVec>
PowerResult power_iteration(Index dim, MatVec&& matvec, double tol, int max_iter,
                            std::uint64_t seed) {
  const CounterRng rng(seed);
  Vector v(dim);
  for (Index i = 0; i < dim; ++i) v[i] = rng.normal(Stream::kPowerStart, 0, static_cast<std::uint64_t>(i));
  v.normalize();

  double best = 0.0;
  Vector w(dim);
  for (int it = 0; it < max_iter; ++it) {
    matvec(v, w);
    const double lambda = v.dot(w);
    best = std::max(best, lambda);
    const double wn = w.norm();
    if (wn == 0.0) return {0.0, true};
    const double residual = (w - lambda * v).norm();
    if (residual <= tol * std::abs(lambda)) return {lambda, true};
    v = w / wn;
  }
  return {best, false};
}

}  // namespace

LinearOperator LinearOperator::dense(RowMajorMatrix matrix) {
  if (matrix.rows() < 1 || matrix.cols() < 1) throw ShapeError("dense operator needs at least one row and column");
  return LinearOperator(std::make_shared<DenseImpl>(std::move(matrix)));
}

LinearOperator LinearOperator::identity(Index dim) {
  if (dim < 1) throw ShapeError("identity operator needs dim >= 1");
  return LinearOperator(std::make_shared<IdentityImpl>(dim));
}

LinearOperator LinearOperator::finite_difference_1d(Index dim) {
  if (dim < 2) throw ShapeError("1-D finite difference needs dim >= 2");
  return LinearOperator(std::make_shared<Fd1dImpl>(dim));
}

LinearOperator LinearOperator::finite_difference_2d(Index height, Index width) {
  if (height < 1 || width < 1 || height * width < 2)
    throw ShapeError("2-D finite difference needs at least two pixels");
  return LinearOperator(std::make_shared<Fd2dImpl>(height, width));
}

LinearOperator LinearOperator::vertical_stack(std::vector<LinearOperator> members) {
  if (members.empty()) throw ShapeError("vertical stack needs at least one member");
  const Index in = members.front().in_dim();
  Index out = 0;
  for (const auto& m : members) {
    if (m.in_dim() != in)
      throw ShapeError("vertical stack members disagree on in_dim: " + std::to_string(m.in_dim()) +
                       " vs " + std::to_string(in));
    out += m.out_dim();
  }
  return LinearOperator(std::make_shared<StackImpl>(std::move(members), in, out));
}

Index LinearOperator::in_dim() const { return impl_->in_dim(); }
Index LinearOperator::out_dim() const { return impl_->out_dim(); }
OperatorKind LinearOperator::kind() const { return impl_->kind(); }
std::string LinearOperator::describe() const { return impl_->describe(); }
const std::vector<LinearOperator>& LinearOperator::members() const { return impl_->members(); }

Vector LinearOperator::apply(const Vector& x) const {
  if (x.size() != in_dim())
    throw ShapeError("apply: expected length " + std::to_string(in_dim()) + ", got " +
                     std::to_string(x.size()));
  Vector out(out_dim());
  impl_->apply_into(x, out);
  return out;
}

Vector LinearOperator::adjoint(const Vector& y) const {
  if (y.size() != out_dim())
    throw ShapeError("adjoint: expected length " + std::to_string(out_dim()) + ", got " +
                     std::to_string(y.size()));
  Vector out(in_dim());
  impl_->adjoint_into(y, out);
  return out;
}

Matrix LinearOperator::to_dense() const {
  Matrix m(out_dim(), in_dim());
  Vector e = Vector::Zero(in_dim());
  for (Index j = 0; j < in_dim(); ++j) {
    e[j] = 1.0;
    m.col(j) = apply(e);
    e[j] = 0.0;
  }
  return m;
}

const SpectralEstimates& LinearOperator::spectral() const {
  std::call_once(impl_->spectral_once, [this] { impl_->spectral_cache = estimate_spectral(*this); });
  return impl_->spectral_cache;
}

SpectralEstimates estimate_spectral(const LinearOperator& op, double tol, int max_iter,
                                    std::uint64_t seed) {
  if (!(tol > 0.0)) throw ParameterError("estimate_spectral: tol must be positive");
  if (max_iter < 1) throw ParameterError("estimate_spectral: max_iter must be >= 1");

  SpectralEstimates est;
  if (op.kind() == OperatorKind::kIdentity) {
    est.op_norm_sq = est.lambda_min_aat = est.condition_kappa = 1.0;
    return est;
  }

  const auto gram = [&op](const Vector& v, Vector& w) { w = op.adjoint(op.apply(v)); };
  const PowerResult top = power_iteration(op.in_dim(), gram, tol, max_iter, seed);
  if (!top.converged)
    throw EstimationError("power iteration for ||A||^2 did not converge", top.value);
  est.op_norm_sq = top.value;

  const Index m = op.out_dim();
  if (m > op.in_dim()) {
    // rank(AA^T) <= in_dim < out_dim
    est.lambda_min_aat = 0.0;
  } else if (m <= 2000) {
    const Matrix a = op.to_dense();
    const Matrix aat = a * a.transpose();
    Eigen::SelfAdjointEigenSolver<Matrix> solver(aat, Eigen::EigenvaluesOnly);
    const double lo = solver.eigenvalues()(0);
    const double hi = solver.eigenvalues()(m - 1);
    const double noise = 64.0 * std::numeric_limits<double>::epsilon() * std::max(hi, 1.0) *
                         static_cast<double>(m);
    est.lambda_min_aat = lo <= noise ? 0.0 : lo;
  } else {
    const double shift = est.op_norm_sq;
    const auto shifted = [&op, shift](const Vector& v, Vector& w) {
      w = shift * v - op.apply(op.adjoint(v));
    };
    const PowerResult s = power_iteration(m, shifted, tol, max_iter, seed + 1);
    if (!s.converged)
      throw EstimationError("shifted power iteration for lambda_min(AA^T) did not converge",
                            std::max(0.0, shift - s.value));
    const double lo = shift - s.value;
    est.lambda_min_aat = lo <= tol * shift ? 0.0 : lo;
  }

  est.lambda_min_aat = std::min(est.lambda_min_aat, est.op_norm_sq);
  est.condition_kappa = est.lambda_min_aat > 0.0
                            ? std::max(1.0, est.op_norm_sq / est.lambda_min_aat)
                            : std::numeric_limits<double>::infinity();
  return est;
}

RowMajorMatrix parse_dense_matrix(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };

  if (!next_line()) throw ParseError(1, "empty matrix file");
  long long m = 0, d = 0;
  {
    std::istringstream hdr(line);
    std::string extra;
    if (!(hdr >> m >> d) || (hdr >> extra) || m < 1 || d < 1)
      throw ParseError(line_no, "expected header \"m d\" with positive integers");
  }
  RowMajorMatrix a(m, d);
  for (long long r = 0; r < m; ++r) {
    if (!next_line()) throw ParseError(line_no + 1, "expected " + std::to_string(m) + " rows");
    std::istringstream row(line);
    for (long long c = 0; c < d; ++c) {
      double v;
      if (!(row >> v)) throw ParseError(line_no, "expected " + std::to_string(d) + " values");
      a(r, c) = v;
    }
    std::string extra;
    if (row >> extra) throw ParseError(line_no, "too many values in row");
  }
  if (next_line()) throw ParseError(line_no, "trailing content after matrix rows");
  return a;
}

RowMajorMatrix load_dense_matrix(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw DataError("cannot open matrix file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_dense_matrix(ss.str());
}

}  // namespace sadmm
