#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace sarah {

// Dense real vector of fixed length. Holds iterates w and estimators v.
class DenseVector {
 public:
  DenseVector() = default;
  explicit DenseVector(std::size_t dim, double fill = 0.0);
  DenseVector(std::initializer_list<double> values);
  explicit DenseVector(std::vector<double> values);

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t k) const { return values_[k]; }
  double& operator[](std::size_t k) { return values_[k]; }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  // Bitwise comparison, so -0.0 != 0.0.
  friend bool operator==(const DenseVector& a, const DenseVector& b) noexcept;

 private:
  std::vector<double> values_;
};

// Sparse data row: strictly increasing 0-based indices with nonzero finite values.
class SparseRow {
 public:
  SparseRow() = default;
  SparseRow(std::vector<std::size_t> indices, std::vector<double> values);

  std::size_t nnz() const noexcept { return indices_.size(); }
  std::span<const std::size_t> indices() const noexcept { return indices_; }
  std::span<const double> values() const noexcept { return values_; }
  // One past the largest index, 0 for an empty row.
  std::size_t min_dim() const noexcept {
    return indices_.empty() ? 0 : indices_.back() + 1;
  }

  friend bool operator==(const SparseRow& a, const SparseRow& b) = default;

 private:
  std::vector<std::size_t> indices_;
  std::vector<double> values_;
};

double dot(const SparseRow& row, const DenseVector& w);
double dot(const DenseVector& x, const DenseVector& y);

// Returns y + alpha * x.
DenseVector axpy(double alpha, const DenseVector& x, const DenseVector& y);
// y <- y + alpha * x, same arithmetic as axpy().
void axpy_inplace(double alpha, const DenseVector& x, DenseVector& y);
// y <- y + alpha * row.
void axpy_inplace(double alpha, const SparseRow& row, DenseVector& y);

double norm_sq(const DenseVector& x);
double norm_sq(const SparseRow& row);
// ||x - y||^2 without materializing the difference.
double dist_sq(const DenseVector& x, const DenseVector& y);

DenseVector subtract(const DenseVector& x, const DenseVector& y);
DenseVector scale(double alpha, const DenseVector& x);

bool all_finite(const DenseVector& x);

}  // namespace sarah
