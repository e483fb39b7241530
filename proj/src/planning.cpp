#include "sarah/planning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sarah/errors.hpp"

namespace sarah {
namespace {

// ceil() that ignores a few ulps of excess so exact integers stay exact.
std::uint64_t ceil_count(double x) {
  if (!(x < 1.8e19)) throw ConfigError("planned count overflows");
  const double snapped = std::nearbyint(x);
  if (std::abs(x - snapped) <= 8.0 * std::numeric_limits<double>::epsilon() * std::abs(x)) {
    return static_cast<std::uint64_t>(std::max(snapped, 1.0));
  }
  return static_cast<std::uint64_t>(std::max(std::ceil(x), 1.0));
}

void require_positive(double x, const char* what) {
  if (!(x > 0.0) || !std::isfinite(x)) throw ConfigError(std::string(what) + " must be positive");
}

}  // namespace

double eta_max_nonconvex(double L, std::size_t m, std::size_t b, std::size_t n) {
  require_positive(L, "L");
  if (b == 0 || b > n) throw ConfigError("batch size must be in [1, n]");
  double factor = 0.0;
  if (b != n && n != 1) {
    factor = static_cast<double>(n - b) / static_cast<double>(n - 1);
  }
  const double ratio = 4.0 * static_cast<double>(m) / static_cast<double>(b);
  return 2.0 / (L * (std::sqrt(1.0 + ratio * factor) + 1.0));
}

ComplexityPlan plan_complexity(std::size_t n, double eps, double L, double deltaF,
                               std::optional<std::size_t> b) {
  if (n == 0) throw ConfigError("n must be positive");
  require_positive(eps, "eps");
  require_positive(L, "L");
  require_positive(deltaF, "deltaF");
  ComplexityPlan plan;
  if (!b) {
    plan.m = n;
    plan.b = 1;
    const double root = std::sqrt(static_cast<double>(plan.m) + 1.0);
    plan.eta = 2.0 / (3.0 * L * root);
    plan.S = ceil_count(3.0 * L * deltaF / (root * eps));
    plan.total_evals = plan.S * (n + 2 * plan.m);
    return plan;
  }
  if (*b == 0 || *b > n) throw ConfigError("batch size must be in [1, n]");
  plan.b = *b;
  plan.m = static_cast<std::size_t>(ceil_count(static_cast<double>(n) / static_cast<double>(*b)));
  plan.eta = eta_max_nonconvex(L, plan.m, plan.b, n);
  plan.S = ceil_count(2.0 * deltaF / (plan.eta * (static_cast<double>(plan.m) + 1.0) * eps));
  plan.total_evals = plan.S * (n + 2 * plan.b * plan.m);
  return plan;
}

std::uint64_t iteration_budget_convex(ConvexityKind kind, double eps, double eta, double deltaF,
                                      std::optional<double> mu) {
  require_positive(eps, "eps");
  require_positive(eta, "eta");
  require_positive(deltaF, "deltaF");
  if (kind == ConvexityKind::kGeneral) return ceil_count(2.0 * deltaF / (eta * eps));
  if (!mu) throw ConfigError("strongly convex budget needs mu");
  require_positive(*mu, "mu");
  if (*mu * eta >= 1.0) throw ConfigError("mu * eta >= 1: linear rate is degenerate");
  if (deltaF <= eps) return 1;
  return ceil_count(std::log(deltaF / eps) / -std::log1p(-*mu * eta));
}

}  // namespace sarah
