#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "sarah/dataset.hpp"
#include "sarah/linalg.hpp"

namespace sarah {

// Component objectives f_i, each including the regularizer:
//   logistic-l2             log(1 + exp(-y_i <x_i,w>)) + (lambda/2) ||w||^2
//   ridge                   (1/2)(<x_i,w> - y_i)^2 + (lambda/2) ||w||^2
//   logistic-nonconvex-reg  log(1 + exp(-y_i <x_i,w>)) + lambda * sum_j w_j^2 / (1 + w_j^2)
enum class ProblemKind { kLogisticL2, kRidge, kLogisticNonconvex };

std::string_view to_string(ProblemKind kind) noexcept;
ProblemKind parse_problem_kind(std::string_view name);
bool is_convex(ProblemKind kind) noexcept;

struct SmoothnessInfo {
  double L = 0.0;
  double mu = 0.0;
  std::optional<double> kappa;
};

// F(w) = (1/n) sum_i f_i(w). Immutable; safe to share across threads.
class Problem {
 public:
  Problem(std::shared_ptr<const Dataset> data, ProblemKind kind, double lambda);
  Problem(Dataset data, ProblemKind kind, double lambda);

  std::size_t n() const noexcept { return data_->n(); }
  std::size_t dim() const noexcept { return data_->dim(); }
  ProblemKind kind() const noexcept { return kind_; }
  double lambda() const noexcept { return lambda_; }
  const Dataset& data() const noexcept { return *data_; }
  std::shared_ptr<const Dataset> data_ptr() const noexcept { return data_; }

  double component_value(std::size_t i, const DenseVector& w) const;
  DenseVector component_grad(std::size_t i, const DenseVector& w) const;
  // Mean of component gradients; the data term is accumulated for i = 0..n-1.
  DenseVector full_grad(const DenseVector& w) const;
  double objective(const DenseVector& w) const;

  // Valid upper bound on every component's smoothness constant.
  SmoothnessInfo smoothness() const;
  // Analytic lower bound of F (all three kinds are nonnegative).
  double lower_bound() const noexcept { return 0.0; }

 private:
  void check(std::size_t i, const DenseVector& w) const;
  void check(const DenseVector& w) const;
  // d loss / d margin at margin <x_i, w>.
  double loss_slope(std::size_t i, double margin) const;
  double loss_value(std::size_t i, double margin) const;
  double reg_value(const DenseVector& w) const;
  void add_reg_grad(const DenseVector& w, DenseVector& out) const;

  std::shared_ptr<const Dataset> data_;
  ProblemKind kind_;
  double lambda_;
};

}  // namespace sarah
