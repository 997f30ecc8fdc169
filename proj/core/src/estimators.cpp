#include "sadmm/estimators.hpp"

#include <algorithm>
#include <cmath>

#include "sadmm/errors.hpp"

namespace sadmm {

std::string to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::kFull: return "full";
    case EstimatorKind::kSgd: return "sgd";
    case EstimatorKind::kSaga: return "saga";
    case EstimatorKind::kSvrg: return "svrg";
    case EstimatorKind::kSarah: return "sarah";
  }
  return "unknown";
}

EstimatorKind parse_estimator_kind(std::string_view name) {
  for (auto k : {EstimatorKind::kFull, EstimatorKind::kSgd, EstimatorKind::kSaga, EstimatorKind::kSvrg,
                 EstimatorKind::kSarah})
    if (name == to_string(k)) return k;
  throw ParameterError("unknown estimator \"" + std::string(name) + "\"");
}

Index effective_batch(const EstimatorSpec& spec, Index n) {
  if (spec.kind == EstimatorKind::kFull || spec.hooks.full_sweep_batch) return n;
  return spec.batch;
}

void validate_spec(const EstimatorSpec& spec, Index n) {
  if (spec.kind != EstimatorKind::kFull && (spec.batch < 1 || spec.batch > n))
    throw ParameterError("batch size must satisfy 1 <= b <= n (b = " + std::to_string(spec.batch) +
                         ", n = " + std::to_string(n) + ")");
  if (spec.epoch_len < 0) throw ParameterError("epoch_len must be >= 1 (or 0 for the default)");
  if (spec.kind == EstimatorKind::kSarah && !(spec.restart_p > 1.0))
    throw ParameterError("SARAH restart parameter p must exceed 1");
}

VarianceConstants theoretical_constants(const EstimatorSpec& spec, const LipschitzBound& lip, Index n) {
  const double L = lip.L;
  const double b = static_cast<double>(effective_batch(spec, n));
  const double nn = static_cast<double>(n);
  switch (spec.kind) {
    case EstimatorKind::kSaga: {
      if (b * nn <= 1.0) throw ParameterError("SAGA constants need b*n > 1");
      return {0.0, 0.0, nn * L * L / (b * nn - 1.0), b / nn, true};
    }
    case EstimatorKind::kSarah:
      return {0.0, L / std::sqrt(b), L * L / b, 1.0 / spec.restart_p, true};
    default:
      throw UncertifiedConstantsError("no certified variance-reduction constants for estimator " +
                                      to_string(spec.kind));
  }
}

VarianceConstants conservative_constants(const EstimatorSpec& spec, const LipschitzBound& lip, Index n) {
  const double b = static_cast<double>(effective_batch(spec, n));
  return {0.0, 0.0, lip.L * lip.L, b / static_cast<double>(n), false};
}

VarianceConstants constants_or_default(const EstimatorSpec& spec, const LipschitzBound& lip, Index n) {
  if (spec.kind == EstimatorKind::kSaga || spec.kind == EstimatorKind::kSarah)
    return theoretical_constants(spec, lip, n);
  return conservative_constants(spec, lip, n);
}

Vector GradientEstimator::estimate(const FiniteSumLoss& loss, const Vector& x) {
  if (x.size() != loss.dim())
    throw ShapeError("estimate: expected point of length " + std::to_string(loss.dim()));
  Vector g = do_estimate(loss, x);
  ++t_;
  return g;
}

std::vector<Index> GradientEstimator::draw_batch(Index n) const {
  std::vector<Index> batch(static_cast<std::size_t>(batch_));
  if (spec_.hooks.full_sweep_batch) {
    for (Index k = 0; k < batch_; ++k) batch[static_cast<std::size_t>(k)] = k;
    return batch;
  }
  const auto t = static_cast<std::uint64_t>(t_);
  for (Index k = 0; k < batch_; ++k)
    batch[static_cast<std::size_t>(k)] = static_cast<Index>(
        rng_.below(static_cast<std::size_t>(n), Stream::kBatch, t, static_cast<std::uint64_t>(k)));
  return batch;
}

double GradientEstimator::mse_of(const FiniteSumLoss& loss, const Vector& x, const Vector* emitted) const {
  if (emitted == nullptr) return 0.0;
  return (*emitted - loss.full_gradient(x)).squaredNorm();
}

namespace {

// (1/(bn)) sum ||d_i||^2 and (1/sqrt(bn)) sum ||d_i|| for d_i = grad H_i(x) - ref_i.
template <typename RefGrad>
EstimatorDiagnostics table_diagnostics(const FiniteSumLoss& loss, const Vector& x, Index batch,
                                       RefGrad&& ref) {
  const Index n = loss.size();
  double sq = 0.0, lin = 0.0;
  Vector d(loss.dim());
  for (Index i = 0; i < n; ++i) {
    d.setZero();
    loss.add_component_gradient(i, x, 1.0, d);
    d -= ref(i);
    const double s = d.squaredNorm();
    sq += s;
    lin += std::sqrt(s);
  }
  const double bn = static_cast<double>(batch) * static_cast<double>(n);
  return {sq / bn, lin / std::sqrt(bn), 0.0};
}

class FullEstimator final : public GradientEstimator {
 public:
  FullEstimator(const EstimatorSpec& spec, Index n) : GradientEstimator(spec, n) {}

  EstimatorDiagnostics diagnostics(const FiniteSumLoss&, const Vector&, const Vector*) const override {
    return {};
  }
  std::unique_ptr<GradientEstimator> clone() const override { return std::make_unique<FullEstimator>(*this); }

 protected:
  Vector do_estimate(const FiniteSumLoss& loss, const Vector& x) override {
    charge(loss.size());
    return loss.full_gradient(x);
  }
};

class SgdEstimator final : public GradientEstimator {
 public:
  SgdEstimator(const EstimatorSpec& spec, Index n) : GradientEstimator(spec, n) {}

  EstimatorDiagnostics diagnostics(const FiniteSumLoss& loss, const Vector& x,
                                   const Vector* emitted) const override {
    const Vector mean = loss.full_gradient(x);
    auto diag = table_diagnostics(loss, x, batch_, [&mean](Index) -> const Vector& { return mean; });
    diag.mse_exact = mse_of(loss, x, emitted);
    return diag;
  }
  std::unique_ptr<GradientEstimator> clone() const override { return std::make_unique<SgdEstimator>(*this); }

 protected:
  Vector do_estimate(const FiniteSumLoss& loss, const Vector& x) override {
    Vector acc = Vector::Zero(loss.dim());
    for (Index j : draw_batch(loss.size())) loss.add_component_gradient(j, x, 1.0, acc);
    charge(batch_);
    return acc / static_cast<double>(batch_);
  }
};

}  // namespace

class SagaEstimator final : public GradientEstimator {
 public:
  SagaEstimator(const EstimatorSpec& spec, const FiniteSumLoss& loss, const Vector& x0)
      : GradientEstimator(spec, loss.size()),
        table_(Matrix::Zero(loss.dim(), loss.size())),
        mean_(Vector::Zero(loss.dim())) {
    Vector g(loss.dim());
    for (Index i = 0; i < loss.size(); ++i) {
      g.setZero();
      loss.add_component_gradient(i, x0, 1.0, g);
      table_.col(i) = g;
    }
    resync();
    charge(loss.size());
  }

  EstimatorDiagnostics diagnostics(const FiniteSumLoss& loss, const Vector& x,
                                   const Vector* emitted) const override {
    auto diag = table_diagnostics(loss, x, batch_, [this](Index i) { return table_.col(i); });
    diag.mse_exact = mse_of(loss, x, emitted);
    return diag;
  }
  std::unique_ptr<GradientEstimator> clone() const override { return std::make_unique<SagaEstimator>(*this); }

  const Vector& mean() const { return mean_; }
  const Matrix& table() const { return table_; }

 protected:
  Vector do_estimate(const FiniteSumLoss& loss, const Vector& x) override {
    const Index n = loss.size();
    std::vector<Index> batch = draw_batch(n);

    std::vector<Index> unique = batch;
    std::sort(unique.begin(), unique.end());
    unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
    Matrix fresh(loss.dim(), static_cast<Index>(unique.size()));
    Vector g(loss.dim());
    for (std::size_t k = 0; k < unique.size(); ++k) {
      g.setZero();
      loss.add_component_gradient(unique[k], x, 1.0, g);
      fresh.col(static_cast<Index>(k)) = g;
    }
    charge(static_cast<std::int64_t>(unique.size()));
    auto slot = [&unique](Index j) {
      return static_cast<Index>(std::lower_bound(unique.begin(), unique.end(), j) - unique.begin());
    };

    Vector acc = Vector::Zero(loss.dim());
    for (Index j : batch) acc += fresh.col(slot(j)) - table_.col(j);
    Vector out = acc / static_cast<double>(batch_) + mean_;

    // Duplicates in the batch write the table once.
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t k = 0; k < unique.size(); ++k) {
      const Index j = unique[k];
      mean_ += (fresh.col(static_cast<Index>(k)) - table_.col(j)) * inv_n;
      table_.col(j) = fresh.col(static_cast<Index>(k));
      if (++writes_since_sync_ >= n) resync();
    }
    return out;
  }

 private:
  // Exact ascending-order mean; bounds drift of the incremental updates.
  void resync() {
    mean_.setZero();
    for (Index i = 0; i < table_.cols(); ++i) mean_ += table_.col(i);
    mean_ /= static_cast<double>(table_.cols());
    writes_since_sync_ = 0;
  }

  Matrix table_;
  Vector mean_;
  Index writes_since_sync_ = 0;
};

namespace {

class SvrgEstimator final : public GradientEstimator {
 public:
  SvrgEstimator(const EstimatorSpec& spec, const FiniteSumLoss& loss, const Vector& x0)
      : GradientEstimator(spec, loss.size()) {
    epoch_len_ = spec.epoch_len > 0 ? spec.epoch_len : (loss.size() + batch_ - 1) / batch_;
    anchor(loss, x0);
  }

  EstimatorDiagnostics diagnostics(const FiniteSumLoss& loss, const Vector& x,
                                   const Vector* emitted) const override {
    EstimatorDiagnostics diag;
    if (steps_ < epoch_len_) {
      Vector gi(loss.dim());
      diag = table_diagnostics(loss, x, batch_, [&](Index i) -> const Vector& {
        gi.setZero();
        loss.add_component_gradient(i, anchor_x_, 1.0, gi);
        return gi;
      });
    }
    diag.mse_exact = mse_of(loss, x, emitted);
    return diag;
  }
  std::unique_ptr<GradientEstimator> clone() const override { return std::make_unique<SvrgEstimator>(*this); }

 protected:
  Vector do_estimate(const FiniteSumLoss& loss, const Vector& x) override {
    if (steps_ >= epoch_len_) anchor(loss, x);
    Vector acc = Vector::Zero(loss.dim());
    for (Index j : draw_batch(loss.size())) {
      loss.add_component_gradient(j, x, 1.0, acc);
      loss.add_component_gradient(j, anchor_x_, -1.0, acc);
    }
    charge(2 * batch_);
    ++steps_;
    return acc / static_cast<double>(batch_) + anchor_grad_;
  }

 private:
  void anchor(const FiniteSumLoss& loss, const Vector& x) {
    anchor_x_ = x;
    anchor_grad_ = loss.full_gradient(x);
    steps_ = 0;
    charge(loss.size());
  }

  Vector anchor_x_;
  Vector anchor_grad_;
  Index steps_ = 0;
  Index epoch_len_ = 1;
};

}  // namespace

class SarahEstimator final : public GradientEstimator {
 public:
  SarahEstimator(const EstimatorSpec& spec, const FiniteSumLoss& loss, const Vector& x0)
      : GradientEstimator(spec, loss.size()), prev_x_(x0), prev_estimate_(loss.full_gradient(x0)) {
    charge(loss.size());
  }

  EstimatorDiagnostics diagnostics(const FiniteSumLoss& loss, const Vector& x,
                                   const Vector* emitted) const override {
    EstimatorDiagnostics diag;
    diag.upsilon = (prev_estimate_ - loss.full_gradient(prev_x_)).squaredNorm();
    diag.gamma = std::sqrt(diag.upsilon);
    diag.mse_exact = mse_of(loss, x, emitted);
    return diag;
  }
  std::unique_ptr<GradientEstimator> clone() const override { return std::make_unique<SarahEstimator>(*this); }

  const Vector& previous_estimate() const { return prev_estimate_; }

 protected:
  Vector do_estimate(const FiniteSumLoss& loss, const Vector& x) override {
    if (t_ == 0) {
      if (x != prev_x_) {
        prev_estimate_ = loss.full_gradient(x);
        prev_x_ = x;
        charge(loss.size());
      }
      return prev_estimate_;
    }
    const bool restart =
        !spec_.hooks.never_restart &&
        rng_.uniform(Stream::kRestart, static_cast<std::uint64_t>(t_), 0) < 1.0 / spec_.restart_p;
    Vector g;
    if (restart) {
      g = loss.full_gradient(x);
      charge(loss.size());
    } else {
      Vector acc = Vector::Zero(loss.dim());
      for (Index j : draw_batch(loss.size())) {
        loss.add_component_gradient(j, x, 1.0, acc);
        loss.add_component_gradient(j, prev_x_, -1.0, acc);
      }
      charge(2 * batch_);
      g = acc / static_cast<double>(batch_) + prev_estimate_;
    }
    prev_estimate_ = g;
    prev_x_ = x;
    return g;
  }

 private:
  Vector prev_x_;
  Vector prev_estimate_;
};

std::unique_ptr<GradientEstimator> make_estimator(const EstimatorSpec& spec, const FiniteSumLoss& loss,
                                                  const Vector& x0) {
  validate_spec(spec, loss.size());
  if (x0.size() != loss.dim()) throw ShapeError("estimator init: x0 has wrong length");
  switch (spec.kind) {
    case EstimatorKind::kFull: return std::make_unique<FullEstimator>(spec, loss.size());
    case EstimatorKind::kSgd: return std::make_unique<SgdEstimator>(spec, loss.size());
    case EstimatorKind::kSaga: return std::make_unique<SagaEstimator>(spec, loss, x0);
    case EstimatorKind::kSvrg: return std::make_unique<SvrgEstimator>(spec, loss, x0);
    case EstimatorKind::kSarah: return std::make_unique<SarahEstimator>(spec, loss, x0);
  }
  throw ParameterError("unknown estimator kind");
}

const Vector& saga_table_mean(const GradientEstimator& est) {
  const auto* saga = dynamic_cast<const SagaEstimator*>(&est);
  if (saga == nullptr) throw ParameterError("not a SAGA estimator");
  return saga->mean();
}

const Matrix& saga_table(const GradientEstimator& est) {
  const auto* saga = dynamic_cast<const SagaEstimator*>(&est);
  if (saga == nullptr) throw ParameterError("not a SAGA estimator");
  return saga->table();
}

const Vector& sarah_previous_estimate(const GradientEstimator& est) {
  const auto* sarah = dynamic_cast<const SarahEstimator*>(&est);
  if (sarah == nullptr) throw ParameterError("not a SARAH estimator");
  return sarah->previous_estimate();
}

}  // namespace sadmm
