#include "sadmm/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "sadmm/errors.hpp"
#include "sadmm/losses.hpp"
#include "sadmm/random.hpp"

namespace sadmm {

Dataset::Dataset(SparseRows features, Vector labels) : features_(std::move(features)), labels_(std::move(labels)) {
  if (features_.rows() != labels_.size())
    throw ShapeError("dataset: " + std::to_string(features_.rows()) + " rows but " +
                     std::to_string(labels_.size()) + " labels");
  features_.makeCompressed();
}

Vector Dataset::dense_row(Index i) const {
  if (i < 0 || i >= n()) throw IndexError("dataset row " + std::to_string(i) + " out of range");
  Vector row = Vector::Zero(d());
  for (SparseRows::InnerIterator it(features_, i); it; ++it) row[it.col()] = it.value();
  return row;
}

RowMajorMatrix Dataset::dense_features() const { return RowMajorMatrix(features_); }

bool Dataset::is_binary() const {
  return std::all_of(labels_.begin(), labels_.end(), [](double v) { return v == 1.0 || v == -1.0; });
}

Dataset Dataset::subset(const std::vector<Index>& rows) const {
  std::vector<Eigen::Triplet<double, Index>> entries;
  Vector labels(static_cast<Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const Index i = rows[k];
    if (i < 0 || i >= n()) throw IndexError("dataset row " + std::to_string(i) + " out of range");
    labels[static_cast<Index>(k)] = labels_[i];
    for (SparseRows::InnerIterator it(features_, i); it; ++it)
      entries.emplace_back(static_cast<Index>(k), it.col(), it.value());
  }
  SparseRows m(static_cast<Index>(rows.size()), d());
  m.setFromTriplets(entries.begin(), entries.end());
  return Dataset(std::move(m), std::move(labels));
}

namespace {

double parse_number(std::string_view tok, std::size_t line, const char* what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v))
    throw ParseError(line, std::string("bad ") + what + " \"" + std::string(tok) + "\"");
  return v;
}

std::string_view strip_plus(std::string_view tok) {
  // from_chars rejects a leading '+', which LIBSVM labels commonly carry.
  if (tok.size() > 1 && tok.front() == '+') tok.remove_prefix(1);
  return tok;
}

Vector map_labels(const std::vector<double>& raw) {
  const std::set<double> values(raw.begin(), raw.end());
  auto within = [&](double lo, double hi) {
    return std::all_of(values.begin(), values.end(), [&](double v) { return v == lo || v == hi; });
  };
  Vector out(static_cast<Index>(raw.size()));
  double lo = 0.0;
  if (within(-1.0, 1.0)) {
    lo = -1.0;
  } else if (within(0.0, 1.0)) {
    lo = 0.0;
  } else if (within(1.0, 2.0)) {
    lo = 1.0;
  } else {
    throw DataError("labels are not binary (expected {-1,+1}, {0,1} or {1,2})");
  }
  for (std::size_t i = 0; i < raw.size(); ++i) out[static_cast<Index>(i)] = raw[i] == lo ? -1.0 : 1.0;
  return out;
}

}  // namespace

Dataset parse_libsvm(std::istream& in, const LibsvmOptions& options) {
  if (options.dim && *options.dim < 1) throw ParameterError("libsvm: dim must be positive");
  std::vector<Eigen::Triplet<double, Index>> entries;
  std::vector<double> raw_labels;
  Index max_index = 0;
  std::string text;
  std::size_t line_no = 0;
  while (std::getline(in, text)) {
    ++line_no;
    if (!text.empty() && text.back() == '\r') text.pop_back();
    const auto first = text.find_first_not_of(" \t");
    if (first == std::string::npos || text[first] == '#') continue;

    std::istringstream ls(text);
    std::string tok;
    ls >> tok;
    const Index row = static_cast<Index>(raw_labels.size());
    raw_labels.push_back(parse_number(strip_plus(tok), line_no, "label"));

    Index prev = 0;
    while (ls >> tok) {
      if (tok.front() == '#') break;  // trailing comment
      const auto colon = tok.find(':');
      if (colon == std::string::npos || colon == 0 || colon + 1 == tok.size())
        throw ParseError(line_no, "malformed pair \"" + tok + "\"");
      const std::string_view idx_s(tok.data(), colon);
      long long idx = 0;
      const auto [ptr, ec] = std::from_chars(idx_s.data(), idx_s.data() + idx_s.size(), idx);
      if (ec != std::errc() || ptr != idx_s.data() + idx_s.size())
        throw ParseError(line_no, "bad index \"" + std::string(idx_s) + "\"");
      if (idx < 1) throw ParseError(line_no, "index " + std::to_string(idx) + " is not 1-based");
      if (idx <= prev) throw ParseError(line_no, "indices not strictly increasing at " + std::to_string(idx));
      if (options.dim && idx > *options.dim)
        throw ParseError(line_no, "index " + std::to_string(idx) + " exceeds dim " + std::to_string(*options.dim));
      const double v = parse_number(std::string_view(tok).substr(colon + 1), line_no, "value");
      prev = static_cast<Index>(idx);
      max_index = std::max(max_index, prev);
      entries.emplace_back(row, prev - 1, v);
    }
  }
  if (raw_labels.empty()) throw DataError("no samples");

  const Index d = options.dim ? *options.dim : std::max<Index>(max_index, 1);
  SparseRows m(static_cast<Index>(raw_labels.size()), d);
  m.setFromTriplets(entries.begin(), entries.end());
  Vector labels = options.binary ? map_labels(raw_labels)
                                 : Eigen::Map<const Vector>(raw_labels.data(), static_cast<Index>(raw_labels.size()));
  return Dataset(std::move(m), std::move(labels));
}

Dataset parse_libsvm_text(const std::string& text, const LibsvmOptions& options) {
  std::istringstream in(text);
  return parse_libsvm(in, options);
}

Dataset load_libsvm(const std::string& path, const LibsvmOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open \"" + path + "\"");
  return parse_libsvm(in, options);
}

void write_libsvm(const Dataset& data, std::ostream& out) {
  char buf[64];
  for (Index i = 0; i < data.n(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", data.labels()[i]);
    out << buf;
    for (SparseRows::InnerIterator it(data.features(), i); it; ++it) {
      std::snprintf(buf, sizeof buf, " %lld:%.17g", static_cast<long long>(it.col() + 1), it.value());
      out << buf;
    }
    out << '\n';
  }
}

std::pair<Dataset, Dataset> train_test_split(const Dataset& data, double test_fraction, std::uint64_t seed) {
  if (!(test_fraction >= 0.0 && test_fraction < 1.0)) throw ParameterError("test_fraction must lie in [0, 1)");
  std::vector<Index> order(static_cast<std::size_t>(data.n()));
  std::iota(order.begin(), order.end(), Index{0});
  const CounterRng rng(seed);
  // Fisher-Yates driven by the data stream.
  for (std::size_t i = order.size(); i > 1; --i) {
    const std::size_t j = rng.below(i, Stream::kData, 0xD5, i);
    std::swap(order[i - 1], order[j]);
  }
  const auto n_train = static_cast<std::size_t>(std::llround((1.0 - test_fraction) * static_cast<double>(data.n())));
  std::vector<Index> train(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<Index> test(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  return {data.subset(train), data.subset(test)};
}

double mean_sigmoid_loss(const Dataset& data, const Vector& x) {
  if (x.size() != data.d()) throw ShapeError("mean_sigmoid_loss: point has wrong length");
  if (data.n() == 0) return 0.0;
  const Vector margins = data.features() * x;
  double s = 0.0;
  for (Index i = 0; i < data.n(); ++i) s += sigmoid_loss(data.labels()[i] * margins[i]);
  return s / static_cast<double>(data.n());
}

}  // namespace sadmm
