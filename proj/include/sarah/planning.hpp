#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

namespace sarah {

// Largest step size for which SARAH's nonconvex guarantee holds:
//   2 / (L (sqrt(1 + (4m/b) (n-b)/(n-1)) + 1)),
// with the variance factor (n-b)/(n-1) taken as 0 when b == n or n == 1.
// For b = 1 this is 2 / (L (sqrt(1 + 4m) + 1)); for m = 0 it is 1/L.
double eta_max_nonconvex(double L, std::size_t m, std::size_t b, std::size_t n);

struct ComplexityPlan {
  std::size_t m = 0;
  std::size_t b = 1;
  double eta = 0.0;
  std::size_t S = 1;
  std::uint64_t total_evals = 0;
};

// Parameters reaching an eps-accurate average squared gradient norm.
// Single sample (b unset): m = n, eta = 2/(3 L sqrt(m+1)),
//   S = ceil(3 L deltaF / (sqrt(m+1) eps)), total = S (n + 2m).
// Mini-batch: m = ceil(n / b), eta = eta_max_nonconvex(L, m, b, n),
//   S = ceil(2 deltaF / (eta (m+1) eps)), total = S (n + 2bm).
// S is clamped to >= 1. Throws ConfigError on nonpositive inputs.
ComplexityPlan plan_complexity(std::size_t n, double eps, double L, double deltaF,
                               std::optional<std::size_t> b = std::nullopt);

enum class ConvexityKind { kGeneral, kStrongly };

// SARAH++ iteration budget T:
//   general:  ceil(2 deltaF / (eta eps))
//   strongly: ceil(log(deltaF/eps) / -log(1 - mu eta)), at least 1.
// Throws ConfigError when mu*eta >= 1 or an input is nonpositive.
std::uint64_t iteration_budget_convex(ConvexityKind kind, double eps, double eta, double deltaF,
                                      std::optional<double> mu = std::nullopt);

}  // namespace sarah
