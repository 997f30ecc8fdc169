#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>

#include <Eigen/SparseCore>

#include "sadmm/types.hpp"

namespace sadmm {

using SparseRows = Eigen::SparseMatrix<double, Eigen::RowMajor, Index>;

/// Labelled samples with sparse row storage. Immutable.
class Dataset {
 public:
  Dataset(SparseRows features, Vector labels);

  Index n() const noexcept { return features_.rows(); }
  Index d() const noexcept { return features_.cols(); }
  const SparseRows& features() const noexcept { return features_; }
  const Vector& labels() const noexcept { return labels_; }

  Vector dense_row(Index i) const;
  RowMajorMatrix dense_features() const;
  /// Every label is -1 or +1.
  bool is_binary() const;

  /// Rows in the given order, e.g. a split or a permutation.
  Dataset subset(const std::vector<Index>& rows) const;

 private:
  SparseRows features_;
  Vector labels_;
};

struct LibsvmOptions {
  /// Feature count; inferred as the largest index when empty. Indices above
  /// an explicit dim are a parse error.
  std::optional<Index> dim;
  /// Map labels to +-1: {-1,+1} kept, {0,1} and {1,2} mapped low -> -1,
  /// high -> +1. Anything else is a DataError. When false, labels are kept.
  bool binary = true;
};

/// Lines "label idx:val idx:val ..." with 1-based strictly increasing
/// indices. Blank lines and lines starting with '#' are skipped.
/// ParseError (with line number) on malformed content, DataError when the
/// file holds no samples.
Dataset parse_libsvm(std::istream& in, const LibsvmOptions& options = {});
Dataset parse_libsvm_text(const std::string& text, const LibsvmOptions& options = {});
Dataset load_libsvm(const std::string& path, const LibsvmOptions& options = {});

/// Writes explicit entries with 17 significant digits; parse_libsvm with
/// binary = false reads it back exactly.
void write_libsvm(const Dataset& data, std::ostream& out);

/// Deterministic shuffle-and-split; the first part holds
/// round((1 - test_fraction) n) samples.
std::pair<Dataset, Dataset> train_test_split(const Dataset& data, double test_fraction, std::uint64_t seed);

/// (1/n) sum_i 1 / (1 + exp(b_i <a_i, x>)).
double mean_sigmoid_loss(const Dataset& data, const Vector& x);

}  // namespace sadmm
