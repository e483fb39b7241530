#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sarah/errors.hpp"
#include "sarah/linalg.hpp"
#include "sarah/optimizer.hpp"
#include "sarah/problem.hpp"
#include "sarah/reference.hpp"

namespace sarah {

inline constexpr std::uint64_t kDefaultPathBudget = 1'000'000;

// Parameters of an enumerated path ensemble. Every inner iteration draws a
// batch uniformly from all C(n, b) subsets, so SARAH has C(n,b)^(m S)
// equally likely sample paths.
struct EnsembleConfig {
  std::size_t m = 1;
  std::size_t S = 1;
  std::size_t b = 1;
  double eta = 0.0;
  DenseVector w0;
  std::uint64_t budget = kDefaultPathBudget;
};

enum class Statistic {
  kObjective,             // F(w_t)
  kGradNormSq,            // ||grad F(w_t)||^2
  kEstimatorNormSq,       // ||v_t||^2
  kEstimatorErrorSq,      // ||grad F(w_t) - v_t||^2
  kEstimatorIncrementSq,  // ||v_t - v_{t-1}||^2
  kGradIncrementSq,       // ||grad F(w_t) - grad F(w_{t-1})||^2
};

std::string_view to_string(Statistic stat) noexcept;

std::uint64_t binomial(std::size_t n, std::size_t k);

// Exact expectations of every statistic at every (s, t) of SARAH with
// last-iterate restarts, by depth-first enumeration of all sample paths.
// Statistics are summed per (s, t) in lexicographic path order and divided by
// the node count at that depth.
class SarahExpectations {
 public:
  SarahExpectations(const Problem& p, const EnsembleConfig& cfg);

  // s in [1, S]. Iterate statistics accept t in [0, m+1], estimator
  // statistics t in [0, m], increments t >= 1. Throws IndexError otherwise.
  double at(Statistic stat, std::size_t s, std::size_t t) const;

  std::size_t m() const noexcept { return m_; }
  std::size_t S() const noexcept { return S_; }
  std::uint64_t paths() const noexcept { return paths_; }

 private:
  struct Cell {
    double sum[6] = {0, 0, 0, 0, 0, 0};
    std::uint64_t count = 0;
  };
  Cell& cell(std::size_t s, std::size_t t) { return cells_[(s - 1) * (m_ + 2) + t]; }
  const Cell& cell(std::size_t s, std::size_t t) const { return cells_[(s - 1) * (m_ + 2) + t]; }

  std::size_t m_;
  std::size_t S_;
  std::uint64_t paths_;
  std::vector<Cell> cells_;
};

// Throws BudgetExceeded when the path count exceeds cfg.budget.
double exact_expectation(const Problem& p, const EnsembleConfig& cfg, Statistic stat,
                         std::size_t t, std::size_t s = 1);

// Exact expectations for SARAH++ with random stopping times, by enumeration
// with per-branch probability weights.
struct SarahPlusPlusExpectations {
  // E[ (1/(T_1+...+T_S)) sum_s sum_{t<T_s} ||grad F(w_t^(s))||^2 ]
  double avg_grad_norm_sq = 0.0;
  // E[ F(w_hat) ]
  double final_objective = 0.0;
  double mean_total_steps = 0.0;
  std::uint64_t leaves = 0;
};

SarahPlusPlusExpectations enumerate_sarah_pp(const Problem& p, double eta, double gamma,
                                             std::size_t m, std::size_t T, std::size_t b,
                                             const DenseVector& w0,
                                             std::uint64_t budget = kDefaultPathBudget);

struct McEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t replicas = 0;
};

// Mean and standard error of sample(seed) for seed = first_seed .. first_seed+replicas-1.
// Replicas may run on up to `jobs` threads; the reduction is in seed order.
McEstimate monte_carlo(std::size_t replicas, const std::function<double(std::uint64_t)>& sample,
                       std::size_t jobs = 1, std::uint64_t first_seed = 0);

enum class CheckStatus { kPass, kFail, kSkip };

struct CheckReport {
  std::string name;
  std::string instance;
  double lhs = 0.0;
  double rhs = 0.0;
  CheckStatus status = CheckStatus::kPass;

  bool passed() const noexcept { return status == CheckStatus::kPass; }
  // "CHECK <name> <instance-id> <lhs> <rhs> <PASS|FAIL|SKIP>", reals as %.17g.
  std::string line() const;
};

inline constexpr double kIdentityTol = 1e-10;
inline constexpr double kInequalitySlack = 1e-10;

// E||grad F(w_t) - v_t||^2 = sum_{j<=t} E||v_j - v_{j-1}||^2 - sum_{j<=t} E||grad F(w_j) - grad F(w_{j-1})||^2.
// PASS iff |lhs - rhs| <= 1e-10 (1 + |rhs|).
CheckReport check_lemma_telescoping(const SarahExpectations& ex, std::size_t s, std::size_t t,
                                    const std::string& instance);
CheckReport check_lemma_telescoping(const Problem& p, const EnsembleConfig& cfg, std::size_t t,
                                    std::size_t s = 1);

// Convex variance bound E||grad F(w_t) - v_t||^2 <= (eta L / (2 - eta L)) (E||v_0||^2 - E||v_t||^2).
// Needs a convex problem and eta < 2/L.
CheckReport check_variance_bound_convex(const Problem& p, const SarahExpectations& ex, double eta,
                                        std::size_t s, std::size_t t, const std::string& instance);
CheckReport check_variance_bound_convex(const Problem& p, const EnsembleConfig& cfg, std::size_t t,
                                        std::size_t s = 1);

// Per-step descent inequality for convex problems with eta <= 1/L:
// E F(w_{t+1}) <= E F(w_t) - (eta/2) E||grad F(w_t)||^2 + (eta/2)(L eta E||v_0||^2 - E||v_t||^2).
CheckReport check_descent_step(const Problem& p, const SarahExpectations& ex, double eta,
                               std::size_t s, std::size_t t, const std::string& instance);

enum class TheoremBound { kNonconvexT1, kNonconvexT2, kConvexT3, kStronglyT4 };

// kAuto enumerates when the budget allows and otherwise falls back to Monte-Carlo.
enum class EvalMode { kAuto, kExact, kMonteCarlo };

std::string_view to_string(TheoremBound which) noexcept;

struct TheoremInstance {
  TheoremBound which = TheoremBound::kNonconvexT1;
  std::size_t m = 1;
  std::size_t S = 1;  // sarah
  std::size_t b = 1;
  std::size_t T = 1;  // sarah-pp
  double eta = 0.0;
  double gamma = 1.0;  // sarah-pp
  DenseVector w0;
  // Lower bound F* for t1/t2, F(w_*) for t3/t4.
  double f_star = 0.0;
  // Monte-Carlo replicas when enumeration exceeds the budget; 0 forbids Monte-Carlo.
  std::size_t replicas = 200;
  std::uint64_t budget = kDefaultPathBudget;
  std::size_t jobs = 1;
  EvalMode mode = EvalMode::kAuto;
};

// Theorem LHS (exact, or Monte-Carlo mean) against its RHS:
//   t1/t2  (1/((m+1)S)) sum E||grad F(w_t^(s))||^2  <=  2 (F(w~_0) - F*) / (eta (m+1) S)
//   t3     E[(1/sum T_s) sum_s sum_{t<T_s} ||grad F||^2]  <=  2 (F(w~_0) - F(w_*)) / (T eta)
//   t4     E[F(w_hat) - F(w_*)]  <=  (1 - mu eta)^T (F(w~_0) - F(w_*))
// PASS iff lhs <= rhs + 1e-10 (exact) or lhs <= rhs + 3 stderr (Monte-Carlo).
// Throws ConfigError when eta violates the theorem's precondition.
CheckReport check_theorem_bound(const Problem& p, const TheoremInstance& inst,
                                const std::string& instance);

// Monte-Carlo estimate of a theorem LHS from seeded optimizer runs.
McEstimate theorem_lhs_monte_carlo(const Problem& p, const TheoremInstance& inst);

// Partial result when gradient descent hits the iteration cap.
class ReferenceNotConverged : public Error {
 public:
  ReferenceNotConverged(const std::string& what, ReferenceSolution best)
      : Error(what), best_(std::move(best)) {}
  const ReferenceSolution& best() const noexcept { return best_; }

 private:
  ReferenceSolution best_;
};

inline constexpr double kReferenceTol = 1e-15;
inline constexpr std::uint64_t kReferenceEvalCap = 100'000'000;

// Gradient descent with eta = 1/L until ||grad F||^2 <= tol. The cap counts
// component-gradient evaluations. Throws InapplicableError for nonconvex kinds.
ReferenceSolution solve_reference(const Problem& p, double tol = kReferenceTol,
                                  const DenseVector* init = nullptr,
                                  std::uint64_t eval_cap = kReferenceEvalCap);

// Central differences [f(w + h e_j) - f(w - h e_j)] / 2h of f_i, or of F when i is unset.
DenseVector finite_diff_grad(const Problem& p, std::optional<std::size_t> i, const DenseVector& w,
                             double h);

}  // namespace sarah
