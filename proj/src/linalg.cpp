#include "sarah/linalg.hpp"

#include <cmath>
#include <cstring>
#include <string>
#include <utility>

#include "sarah/errors.hpp"

namespace sarah {

bool operator==(const DenseVector& a, const DenseVector& b) noexcept {
  return a.size() == b.size() &&
         (a.size() == 0 ||
          std::memcmp(a.values().data(), b.values().data(), a.size() * sizeof(double)) == 0);
}

namespace {

void require_same_size(const DenseVector& x, const DenseVector& y, const char* op) {
  if (x.size() != y.size()) {
    throw DimensionError(std::string(op) + ": length " + std::to_string(x.size()) +
                         " vs " + std::to_string(y.size()));
  }
}

void require_finite(const DenseVector& x, const char* op) {
  if (!all_finite(x)) throw NonFiniteError(std::string(op) + " produced a non-finite entry");
}

}  // namespace

DenseVector::DenseVector(std::size_t dim, double fill) : values_(dim, fill) {
  if (!std::isfinite(fill)) throw NonFiniteError("DenseVector fill value is not finite");
}

DenseVector::DenseVector(std::initializer_list<double> values) : values_(values) {
  require_finite(*this, "DenseVector");
}

DenseVector::DenseVector(std::vector<double> values) : values_(std::move(values)) {
  require_finite(*this, "DenseVector");
}

SparseRow::SparseRow(std::vector<std::size_t> indices, std::vector<double> values)
    : indices_(std::move(indices)), values_(std::move(values)) {
  if (indices_.size() != values_.size()) {
    throw DimensionError("SparseRow: " + std::to_string(indices_.size()) + " indices but " +
                         std::to_string(values_.size()) + " values");
  }
  for (std::size_t k = 0; k < indices_.size(); ++k) {
    if (k > 0 && indices_[k] <= indices_[k - 1]) {
      throw IndexError("SparseRow: indices not strictly increasing at position " +
                       std::to_string(k));
    }
    if (!std::isfinite(values_[k]) || values_[k] == 0.0) {
      throw Error("SparseRow: value at position " + std::to_string(k) +
                  " must be finite and nonzero");
    }
  }
}

double dot(const SparseRow& row, const DenseVector& w) {
  if (row.min_dim() > w.size()) {
    throw DimensionError("dot: row index " + std::to_string(row.min_dim() - 1) +
                         " out of range for length " + std::to_string(w.size()));
  }
  const auto idx = row.indices();
  const auto val = row.values();
  double sum = 0.0;
  for (std::size_t k = 0; k < idx.size(); ++k) sum += val[k] * w[idx[k]];
  return sum;
}

double dot(const DenseVector& x, const DenseVector& y) {
  require_same_size(x, y, "dot");
  double sum = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) sum += x[k] * y[k];
  return sum;
}

DenseVector axpy(double alpha, const DenseVector& x, const DenseVector& y) {
  DenseVector out = y;
  axpy_inplace(alpha, x, out);
  return out;
}

void axpy_inplace(double alpha, const DenseVector& x, DenseVector& y) {
  require_same_size(x, y, "axpy");
  for (std::size_t k = 0; k < x.size(); ++k) y[k] = y[k] + alpha * x[k];
  require_finite(y, "axpy");
}

void axpy_inplace(double alpha, const SparseRow& row, DenseVector& y) {
  if (row.min_dim() > y.size()) throw DimensionError("axpy: sparse row exceeds vector length");
  const auto idx = row.indices();
  const auto val = row.values();
  for (std::size_t k = 0; k < idx.size(); ++k) y[idx[k]] = y[idx[k]] + alpha * val[k];
  require_finite(y, "axpy");
}

double norm_sq(const DenseVector& x) {
  double sum = 0.0;
  for (double e : x.values()) sum += e * e;
  return sum;
}

double norm_sq(const SparseRow& row) {
  double sum = 0.0;
  for (double e : row.values()) sum += e * e;
  return sum;
}

double dist_sq(const DenseVector& x, const DenseVector& y) {
  require_same_size(x, y, "dist_sq");
  double sum = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double d = x[k] - y[k];
    sum += d * d;
  }
  return sum;
}

DenseVector subtract(const DenseVector& x, const DenseVector& y) {
  require_same_size(x, y, "subtract");
  DenseVector out(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = x[k] - y[k];
  require_finite(out, "subtract");
  return out;
}

DenseVector scale(double alpha, const DenseVector& x) {
  DenseVector out(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = alpha * x[k];
  require_finite(out, "scale");
  return out;
}

bool all_finite(const DenseVector& x) {
  for (double e : x.values()) {
    if (!std::isfinite(e)) return false;
  }
  return true;
}

}  // namespace sarah
