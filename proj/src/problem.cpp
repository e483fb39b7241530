#include "sarah/problem.hpp"

#include <algorithm>
#include <cmath>

#include "sarah/errors.hpp"

namespace sarah {
namespace {

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(u)) without overflow.
double softplus(double u) {
  if (u > 0.0) return u + std::log1p(std::exp(-u));
  return std::log1p(std::exp(u));
}

}  // namespace

std::string_view to_string(ProblemKind kind) noexcept {
  switch (kind) {
    case ProblemKind::kLogisticL2: return "logistic-l2";
    case ProblemKind::kRidge: return "ridge";
    case ProblemKind::kLogisticNonconvex: return "logistic-nonconvex-reg";
  }
  return "?";
}

ProblemKind parse_problem_kind(std::string_view name) {
  if (name == "logistic-l2") return ProblemKind::kLogisticL2;
  if (name == "ridge") return ProblemKind::kRidge;
  if (name == "logistic-nonconvex-reg") return ProblemKind::kLogisticNonconvex;
  throw ConfigError("unknown problem kind '" + std::string(name) + "'");
}

bool is_convex(ProblemKind kind) noexcept { return kind != ProblemKind::kLogisticNonconvex; }

Problem::Problem(std::shared_ptr<const Dataset> data, ProblemKind kind, double lambda)
    : data_(std::move(data)), kind_(kind), lambda_(lambda) {
  if (!data_) throw DataError("problem needs a dataset");
  if (!(lambda_ >= 0.0) || !std::isfinite(lambda_)) {
    throw ConfigError("regularization lambda must be finite and >= 0");
  }
  if (kind_ != ProblemKind::kRidge && !data_->has_binary_labels()) {
    throw DataError(std::string(to_string(kind_)) + " needs labels in {-1,+1}");
  }
}

Problem::Problem(Dataset data, ProblemKind kind, double lambda)
    : Problem(std::make_shared<const Dataset>(std::move(data)), kind, lambda) {}

void Problem::check(const DenseVector& w) const {
  if (w.size() != dim()) {
    throw DimensionError("point has length " + std::to_string(w.size()) + ", problem has d=" +
                         std::to_string(dim()));
  }
}

void Problem::check(std::size_t i, const DenseVector& w) const {
  if (i >= n()) {
    throw IndexError("component " + std::to_string(i) + " out of range for n=" +
                     std::to_string(n()));
  }
  check(w);
}

double Problem::loss_slope(std::size_t i, double margin) const {
  const double y = data_->label(i);
  if (kind_ == ProblemKind::kRidge) return margin - y;
  return -y * sigmoid(-y * margin);
}

double Problem::loss_value(std::size_t i, double margin) const {
  const double y = data_->label(i);
  if (kind_ == ProblemKind::kRidge) {
    const double r = margin - y;
    return 0.5 * r * r;
  }
  return softplus(-y * margin);
}

double Problem::reg_value(const DenseVector& w) const {
  if (kind_ == ProblemKind::kLogisticNonconvex) {
    double sum = 0.0;
    for (double wj : w.values()) {
      const double sq = wj * wj;
      sum += sq / (1.0 + sq);
    }
    return lambda_ * sum;
  }
  return 0.5 * lambda_ * norm_sq(w);
}

void Problem::add_reg_grad(const DenseVector& w, DenseVector& out) const {
  if (kind_ == ProblemKind::kLogisticNonconvex) {
    for (std::size_t j = 0; j < w.size(); ++j) {
      const double q = 1.0 + w[j] * w[j];
      out[j] = out[j] + lambda_ * (2.0 * w[j] / (q * q));
    }
    return;
  }
  for (std::size_t j = 0; j < w.size(); ++j) out[j] = out[j] + lambda_ * w[j];
}

double Problem::component_value(std::size_t i, const DenseVector& w) const {
  check(i, w);
  return loss_value(i, dot(data_->row(i), w)) + reg_value(w);
}

DenseVector Problem::component_grad(std::size_t i, const DenseVector& w) const {
  check(i, w);
  const SparseRow& row = data_->row(i);
  DenseVector g(dim());
  axpy_inplace(loss_slope(i, dot(row, w)), row, g);
  add_reg_grad(w, g);
  return g;
}

DenseVector Problem::full_grad(const DenseVector& w) const {
  check(w);
  DenseVector g(dim());
  for (std::size_t i = 0; i < n(); ++i) {
    const SparseRow& row = data_->row(i);
    axpy_inplace(loss_slope(i, dot(row, w)), row, g);
  }
  const double count = static_cast<double>(n());
  for (std::size_t j = 0; j < g.size(); ++j) g[j] = g[j] / count;
  add_reg_grad(w, g);
  return g;
}

double Problem::objective(const DenseVector& w) const {
  check(w);
  double sum = 0.0;
  for (std::size_t i = 0; i < n(); ++i) sum += loss_value(i, dot(data_->row(i), w));
  return sum / static_cast<double>(n()) + reg_value(w);
}

SmoothnessInfo Problem::smoothness() const {
  double max_sq = 0.0;
  for (const auto& row : data_->rows()) max_sq = std::max(max_sq, norm_sq(row));
  SmoothnessInfo info;
  switch (kind_) {
    case ProblemKind::kLogisticL2:
      info.L = max_sq / 4.0 + lambda_;
      info.mu = lambda_;
      break;
    case ProblemKind::kRidge:
      info.L = max_sq + lambda_;
      info.mu = lambda_;
      break;
    case ProblemKind::kLogisticNonconvex:
      // |r''| <= 2 for r(t) = t^2 / (1 + t^2).
      info.L = max_sq / 4.0 + 2.0 * lambda_;
      info.mu = 0.0;
      break;
  }
  if (!(info.L > 0.0)) throw DataError("all rows are zero and lambda is 0; smoothness undefined");
  if (info.mu > 0.0) info.kappa = info.L / info.mu;
  return info;
}

}  // namespace sarah
