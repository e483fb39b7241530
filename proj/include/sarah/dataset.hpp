#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sarah/linalg.hpp"

namespace sarah {

// Training pairs {x_i, y_i}, i = 0..n-1, with rows of dimension d.
class Dataset {
 public:
  Dataset(std::vector<SparseRow> rows, std::vector<double> labels, std::size_t dim);

  std::size_t n() const noexcept { return rows_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  const SparseRow& row(std::size_t i) const { return rows_.at(i); }
  double label(std::size_t i) const { return labels_.at(i); }
  const std::vector<SparseRow>& rows() const noexcept { return rows_; }
  const std::vector<double>& labels() const noexcept { return labels_; }

  bool has_binary_labels() const noexcept;

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::vector<SparseRow> rows_;
  std::vector<double> labels_;
  std::size_t dim_;
};

enum class LabelMode {
  // {0,1}, {-1,+1} or {1,2} mapped to {-1,+1}; anything else is a parse error.
  kBinary,
  // Labels kept as read (regression targets).
  kRaw,
};

struct ParseOptions {
  LabelMode labels = LabelMode::kBinary;
  // Declared dimension; must be >= the largest index in the file.
  std::optional<std::size_t> dim;
};

// LIBSVM text: "<label> <idx>:<val> ..." per line, 1-based strictly increasing
// indices. Blank lines are skipped and '#' starts a comment. Explicit zero
// values are dropped. Throws ParseError carrying the 1-based line number.
Dataset parse_libsvm(std::istream& in, const ParseOptions& options = {});
Dataset parse_libsvm_string(const std::string& text, const ParseOptions& options = {});
Dataset load_libsvm(const std::string& path, const ParseOptions& options = {});

// Canonical form: %.17g numbers, single spaces, '\n' line ends.
void write_libsvm(std::ostream& out, const Dataset& ds);
std::string to_libsvm_string(const Dataset& ds);

// Scales every row to unit Euclidean norm. Throws DataError naming the first zero row.
Dataset normalize_rows(const Dataset& ds);

/// Planted linear regression. With rng = CounterRng(seed).split(stream::kSynthetic),
/// draws in this order: w_true (d normals), then for each row i: d normals for
/// the row, one normal for the noise. Rows are unit-normalized before the label
/// y_i = <x_i, w_true> + 0.1 * noise is formed.
Dataset synth_ridge(std::size_t n, std::size_t d, std::uint64_t seed);

/// Planted binary classification with the same draw order as synth_ridge;
/// y_i = sign(<x_i, w_true> + 0.5 * noise) with sign(0) = +1.
Dataset synth_classification(std::size_t n, std::size_t d, std::uint64_t seed);

// FNV-1a 64 over the canonical serialization.
std::uint64_t checksum(const Dataset& ds);

}  // namespace sarah
