#include "sarah/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <thread>

#include "sarah/planning.hpp"

namespace sarah {
namespace {

std::string fmt17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// All b-subsets of [0, n) in lexicographic order.
std::vector<std::vector<std::size_t>> all_subsets(std::size_t n, std::size_t b) {
  std::vector<std::vector<std::size_t>> out;
  std::vector<std::size_t> cur(b);
  for (std::size_t k = 0; k < b; ++k) cur[k] = k;
  for (;;) {
    out.push_back(cur);
    std::size_t k = b;
    while (k > 0 && cur[k - 1] == n - b + (k - 1)) --k;
    if (k == 0) break;
    ++cur[k - 1];
    for (std::size_t j = k; j < b; ++j) cur[j] = cur[j - 1] + 1;
  }
  return out;
}

// Saturating integer power; saturates at UINT64_MAX.
std::uint64_t checked_pow(std::uint64_t base, std::uint64_t exp) {
  std::uint64_t r = 1;
  for (std::uint64_t k = 0; k < exp; ++k) {
    if (base != 0 && r > std::numeric_limits<std::uint64_t>::max() / base) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    r *= base;
  }
  return r;
}

using Grads = std::vector<DenseVector>;

Grads component_grads(const Problem& p, const DenseVector& w) {
  Grads g;
  g.reserve(p.n());
  for (std::size_t i = 0; i < p.n(); ++i) g.push_back(p.component_grad(i, w));
  return g;
}

// v_prev + (1/b) sum_{i in batch} (cur[i] - prev[i]), written out independently
// of the optimizer's estimator update.
DenseVector recursive_estimate(const DenseVector& v_prev, const Grads& cur, const Grads& prev,
                               const std::vector<std::size_t>& batch) {
  DenseVector v(v_prev.size());
  const double b = static_cast<double>(batch.size());
  for (std::size_t j = 0; j < v.size(); ++j) {
    double diff = 0.0;
    for (std::size_t i : batch) diff += cur[i][j] - prev[i][j];
    v[j] = v_prev[j] + diff / b;
  }
  return v;
}

DenseVector descend(const DenseVector& w, double eta, const DenseVector& v) {
  DenseVector out(w.size());
  for (std::size_t j = 0; j < w.size(); ++j) out[j] = w[j] - eta * v[j];
  if (!all_finite(out)) throw NonFiniteError("enumerated path diverged");
  return out;
}

bool within_step(double eta, double bound) { return eta <= bound * (1.0 + 1e-12); }

}  // namespace

std::string_view to_string(Statistic stat) noexcept {
  switch (stat) {
    case Statistic::kObjective: return "F";
    case Statistic::kGradNormSq: return "grad_norm_sq";
    case Statistic::kEstimatorNormSq: return "v_norm_sq";
    case Statistic::kEstimatorErrorSq: return "grad_minus_v_sq";
    case Statistic::kEstimatorIncrementSq: return "v_increment_sq";
    case Statistic::kGradIncrementSq: return "grad_increment_sq";
  }
  return "?";
}

std::uint64_t binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::size_t j = 1; j <= k; ++j) r = r * (n - k + j) / j;
  return r;
}

SarahExpectations::SarahExpectations(const Problem& p, const EnsembleConfig& cfg)
    : m_(cfg.m), S_(cfg.S) {
  if (cfg.S == 0) throw ConfigError("ensemble needs S >= 1");
  if (cfg.b == 0 || cfg.b > p.n()) throw ConfigError("batch size must be in [1, n]");
  if (cfg.w0.size() != p.dim()) throw DimensionError("ensemble start point has the wrong length");
  paths_ = checked_pow(binomial(p.n(), cfg.b), cfg.m * cfg.S);
  if (paths_ > cfg.budget) {
    throw BudgetExceeded("enumeration needs " + std::to_string(paths_) + " paths, budget is " +
                         std::to_string(cfg.budget));
  }
  cells_.resize(S_ * (m_ + 2));
  const auto subsets = all_subsets(p.n(), cfg.b);
  const double eta = cfg.eta;

  auto add = [&](std::size_t s, std::size_t t, Statistic stat, double value) {
    cell(s, t).sum[static_cast<int>(stat)] += value;
  };

  // Explicit recursion: the call stack is the path stack.
  std::function<void(std::size_t, const DenseVector&)> outer;
  std::function<void(std::size_t, std::size_t, const DenseVector&, const DenseVector&,
                     const DenseVector&, const DenseVector&, const Grads&)>
      inner;

  inner = [&](std::size_t s, std::size_t t, const DenseVector& w_prev, const DenseVector& w,
              const DenseVector& grad_prev, const DenseVector& v_prev, const Grads& comps_prev) {
    const DenseVector grad = p.full_grad(w);
    const double f = p.objective(w);
    const double g_sq = norm_sq(grad);
    const double g_inc = dist_sq(grad, grad_prev);
    if (t == m_ + 1) {
      Cell& c = cell(s, t);
      ++c.count;
      add(s, t, Statistic::kObjective, f);
      add(s, t, Statistic::kGradNormSq, g_sq);
      add(s, t, Statistic::kGradIncrementSq, g_inc);
      if (s < S_) outer(s + 1, w);
      return;
    }
    (void)w_prev;
    const Grads comps = component_grads(p, w);
    for (const auto& batch : subsets) {
      const DenseVector v = recursive_estimate(v_prev, comps, comps_prev, batch);
      Cell& c = cell(s, t);
      ++c.count;
      add(s, t, Statistic::kObjective, f);
      add(s, t, Statistic::kGradNormSq, g_sq);
      add(s, t, Statistic::kEstimatorNormSq, norm_sq(v));
      add(s, t, Statistic::kEstimatorErrorSq, dist_sq(grad, v));
      add(s, t, Statistic::kEstimatorIncrementSq, dist_sq(v, v_prev));
      add(s, t, Statistic::kGradIncrementSq, g_inc);
      inner(s, t + 1, w, descend(w, eta, v), grad, v, comps);
    }
  };

  outer = [&](std::size_t s, const DenseVector& w0) {
    const DenseVector grad = p.full_grad(w0);
    const DenseVector& v0 = grad;
    Cell& c = cell(s, 0);
    ++c.count;
    add(s, 0, Statistic::kObjective, p.objective(w0));
    add(s, 0, Statistic::kGradNormSq, norm_sq(grad));
    add(s, 0, Statistic::kEstimatorNormSq, norm_sq(v0));
    add(s, 0, Statistic::kEstimatorErrorSq, 0.0);
    inner(s, 1, w0, descend(w0, eta, v0), grad, v0, component_grads(p, w0));
  };

  outer(1, cfg.w0);
}

double SarahExpectations::at(Statistic stat, std::size_t s, std::size_t t) const {
  if (s < 1 || s > S_ || t > m_ + 1) {
    throw IndexError("no iterate (s=" + std::to_string(s) + ", t=" + std::to_string(t) + ")");
  }
  const bool estimator = stat == Statistic::kEstimatorNormSq ||
                         stat == Statistic::kEstimatorErrorSq ||
                         stat == Statistic::kEstimatorIncrementSq;
  if (estimator && t == m_ + 1) throw IndexError("no estimator at t = m+1");
  if ((stat == Statistic::kEstimatorIncrementSq || stat == Statistic::kGradIncrementSq) && t == 0) {
    throw IndexError("increments start at t = 1");
  }
  const Cell& c = cell(s, t);
  return c.sum[static_cast<int>(stat)] / static_cast<double>(c.count);
}

double exact_expectation(const Problem& p, const EnsembleConfig& cfg, Statistic stat,
                         std::size_t t, std::size_t s) {
  return SarahExpectations(p, cfg).at(stat, s, t);
}

SarahPlusPlusExpectations enumerate_sarah_pp(const Problem& p, double eta, double gamma,
                                             std::size_t m, std::size_t T, std::size_t b,
                                             const DenseVector& w0, std::uint64_t budget) {
  if (b == 0 || b > p.n()) throw ConfigError("batch size must be in [1, n]");
  if (T == 0) throw ConfigError("T must be >= 1");
  const auto subsets = all_subsets(p.n(), b);
  const double branch = 1.0 / static_cast<double>(subsets.size());
  SarahPlusPlusExpectations out;

  auto leaf = [&](const DenseVector& w, std::uint64_t G, double prob, double grad_sum) {
    if (++out.leaves > budget) {
      throw BudgetExceeded("SARAH++ enumeration exceeds the budget of " + std::to_string(budget) +
                           " paths");
    }
    out.avg_grad_norm_sq += prob * (G > 0 ? grad_sum / static_cast<double>(G) : 0.0);
    out.final_objective += prob * p.objective(w);
    out.mean_total_steps += prob * static_cast<double>(G);
  };

  std::function<void(std::size_t, const DenseVector&, std::uint64_t, double, double)> outer;
  std::function<void(std::size_t, std::size_t, const DenseVector&, const DenseVector&, double,
                     std::uint64_t, double, double)>
      inner;

  inner = [&](std::size_t s, std::size_t t, const DenseVector& w, const DenseVector& v, double v0n,
              std::uint64_t G, double prob, double grad_sum) {
    if (norm_sq(v) >= gamma * v0n && t <= m) {
      const double g_sq = norm_sq(p.full_grad(w));
      const DenseVector w_next = descend(w, eta, v);
      if (t + 1 <= m) {
        const Grads prev = component_grads(p, w);
        const Grads cur = component_grads(p, w_next);
        for (const auto& batch : subsets) {
          inner(s, t + 1, w_next, recursive_estimate(v, cur, prev, batch), v0n, G,
                prob * branch, grad_sum + g_sq);
        }
      } else {
        inner(s, t + 1, w_next, v, v0n, G, prob, grad_sum + g_sq);
      }
      return;
    }
    const std::uint64_t total = G + t;
    if (total >= T) {
      leaf(w, total, prob, grad_sum);
    } else {
      outer(s + 1, w, total, prob, grad_sum);
    }
  };

  outer = [&](std::size_t s, const DenseVector& w_start, std::uint64_t G, double prob,
              double grad_sum) {
    const DenseVector v0 = p.full_grad(w_start);
    const double v0n = norm_sq(v0);
    if (v0n == 0.0) {
      leaf(w_start, G, prob, grad_sum);
      return;
    }
    inner(s, 0, w_start, v0, v0n, G, prob, grad_sum);
  };

  outer(1, w0, 0, 1.0, 0.0);
  return out;
}

McEstimate monte_carlo(std::size_t replicas, const std::function<double(std::uint64_t)>& sample,
                       std::size_t jobs, std::uint64_t first_seed) {
  if (replicas == 0) throw ConfigError("Monte-Carlo needs at least one replica");
  std::vector<double> values(replicas);
  jobs = std::max<std::size_t>(1, std::min(jobs, replicas));
  if (jobs == 1) {
    for (std::size_t k = 0; k < replicas; ++k) values[k] = sample(first_seed + k);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(jobs);
    for (std::size_t j = 0; j < jobs; ++j) {
      pool.emplace_back([&, j] {
        try {
          for (std::size_t k = j; k < replicas; k += jobs) values[k] = sample(first_seed + k);
        } catch (...) {
          errors[j] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  McEstimate est;
  est.replicas = replicas;
  double sum = 0.0;
  for (double x : values) sum += x;
  est.mean = sum / static_cast<double>(replicas);
  if (replicas > 1) {
    double ss = 0.0;
    for (double x : values) ss += (x - est.mean) * (x - est.mean);
    est.stderr_ = std::sqrt(ss / static_cast<double>(replicas - 1) / static_cast<double>(replicas));
  }
  return est;
}

std::string CheckReport::line() const {
  const char* verdict = status == CheckStatus::kPass   ? "PASS"
                        : status == CheckStatus::kFail ? "FAIL"
                                                       : "SKIP";
  return "CHECK " + name + " " + instance + " " + fmt17(lhs) + " " + fmt17(rhs) + " " + verdict;
}

CheckReport check_lemma_telescoping(const SarahExpectations& ex, std::size_t s, std::size_t t,
                                    const std::string& instance) {
  if (t < 1 || t > ex.m()) throw IndexError("telescoping identity needs 1 <= t <= m");
  CheckReport r;
  r.name = "lemma-telescoping";
  r.instance = instance;
  r.lhs = ex.at(Statistic::kEstimatorErrorSq, s, t);
  double inc_v = 0.0, inc_g = 0.0;
  for (std::size_t j = 1; j <= t; ++j) {
    inc_v += ex.at(Statistic::kEstimatorIncrementSq, s, j);
    inc_g += ex.at(Statistic::kGradIncrementSq, s, j);
  }
  r.rhs = inc_v - inc_g;
  r.status = std::abs(r.lhs - r.rhs) <= kIdentityTol * (1.0 + std::abs(r.rhs)) ? CheckStatus::kPass
                                                                                : CheckStatus::kFail;
  return r;
}

CheckReport check_lemma_telescoping(const Problem& p, const EnsembleConfig& cfg, std::size_t t,
                                    std::size_t s) {
  const SarahExpectations ex(p, cfg);
  return check_lemma_telescoping(ex, s, t, "inline");
}

CheckReport check_variance_bound_convex(const Problem& p, const SarahExpectations& ex, double eta,
                                        std::size_t s, std::size_t t, const std::string& instance) {
  if (!is_convex(p.kind())) {
    throw InapplicableError("variance bound needs a convex problem, got " +
                            std::string(to_string(p.kind())));
  }
  const double L = p.smoothness().L;
  if (!(eta * L < 2.0)) throw ConfigError("variance bound needs eta < 2/L");
  CheckReport r;
  r.name = "convex-variance";
  r.instance = instance;
  r.lhs = ex.at(Statistic::kEstimatorErrorSq, s, t);
  r.rhs = eta * L / (2.0 - eta * L) *
          (ex.at(Statistic::kEstimatorNormSq, s, 0) - ex.at(Statistic::kEstimatorNormSq, s, t));
  r.status = r.lhs <= r.rhs + kInequalitySlack ? CheckStatus::kPass : CheckStatus::kFail;
  return r;
}

CheckReport check_variance_bound_convex(const Problem& p, const EnsembleConfig& cfg, std::size_t t,
                                        std::size_t s) {
  if (!is_convex(p.kind())) {
    throw InapplicableError("variance bound needs a convex problem, got " +
                            std::string(to_string(p.kind())));
  }
  const SarahExpectations ex(p, cfg);
  return check_variance_bound_convex(p, ex, cfg.eta, s, t, "inline");
}

CheckReport check_descent_step(const Problem& p, const SarahExpectations& ex, double eta,
                               std::size_t s, std::size_t t, const std::string& instance) {
  if (!is_convex(p.kind())) throw InapplicableError("descent step needs a convex problem");
  const double L = p.smoothness().L;
  if (!within_step(eta, 1.0 / L)) throw ConfigError("descent step needs eta <= 1/L");
  if (t > ex.m()) throw IndexError("descent step needs t <= m");
  CheckReport r;
  r.name = "descent-step";
  r.instance = instance;
  r.lhs = ex.at(Statistic::kObjective, s, t + 1);
  r.rhs = ex.at(Statistic::kObjective, s, t) - 0.5 * eta * ex.at(Statistic::kGradNormSq, s, t) +
          0.5 * eta *
              (L * eta * ex.at(Statistic::kEstimatorNormSq, s, 0) -
               ex.at(Statistic::kEstimatorNormSq, s, t));
  r.status = r.lhs <= r.rhs + kInequalitySlack ? CheckStatus::kPass : CheckStatus::kFail;
  return r;
}

std::string_view to_string(TheoremBound which) noexcept {
  switch (which) {
    case TheoremBound::kNonconvexT1: return "theorem-nonconvex-t1";
    case TheoremBound::kNonconvexT2: return "theorem-nonconvex-t2";
    case TheoremBound::kConvexT3: return "theorem-convex-t3";
    case TheoremBound::kStronglyT4: return "theorem-strongly-t4";
  }
  return "?";
}

namespace {

void check_precondition(const Problem& p, const TheoremInstance& inst) {
  const SmoothnessInfo sm = p.smoothness();
  switch (inst.which) {
    case TheoremBound::kNonconvexT1:
    case TheoremBound::kNonconvexT2: {
      const std::size_t b = inst.which == TheoremBound::kNonconvexT1 ? 1 : inst.b;
      if (inst.which == TheoremBound::kNonconvexT1 && inst.b != 1) {
        throw ConfigError("the single-sample bound needs b = 1");
      }
      if (!within_step(inst.eta, eta_max_nonconvex(sm.L, inst.m, b, p.n()))) {
        throw ConfigError("eta exceeds the nonconvex step-size bound");
      }
      break;
    }
    case TheoremBound::kStronglyT4:
      if (!(sm.mu > 0.0)) throw InapplicableError("linear rate needs mu > 0");
      [[fallthrough]];
    case TheoremBound::kConvexT3:
      if (!is_convex(p.kind())) throw InapplicableError("convex bound needs a convex problem");
      if (!(inst.gamma > 0.0 && inst.gamma <= 1.0)) throw ConfigError("gamma must be in (0, 1]");
      if (!within_step(inst.eta, inst.gamma / sm.L)) throw ConfigError("eta exceeds gamma/L");
      if (inst.m > inst.T) throw ConfigError("SARAH++ needs m <= T");
      break;
  }
}

double theorem_rhs(const Problem& p, const TheoremInstance& inst) {
  const double gap = p.objective(inst.w0) - inst.f_star;
  switch (inst.which) {
    case TheoremBound::kNonconvexT1:
    case TheoremBound::kNonconvexT2:
      return 2.0 * gap / (inst.eta * static_cast<double>((inst.m + 1) * inst.S));
    case TheoremBound::kConvexT3:
      return 2.0 * gap / (static_cast<double>(inst.T) * inst.eta);
    case TheoremBound::kStronglyT4:
      return std::pow(1.0 - p.smoothness().mu * inst.eta, static_cast<double>(inst.T)) * gap;
  }
  return 0.0;
}

}  // namespace

McEstimate theorem_lhs_monte_carlo(const Problem& p, const TheoremInstance& inst) {
  check_precondition(p, inst);
  OptimizerConfig cfg;
  cfg.eta = inst.eta;
  cfg.m = inst.m;
  cfg.b = inst.b;
  cfg.init = inst.w0;
  cfg.checkpoint_every = 1;
  const bool nonconvex =
      inst.which == TheoremBound::kNonconvexT1 || inst.which == TheoremBound::kNonconvexT2;
  if (nonconvex) {
    cfg.algo = Algorithm::kSarah;
    cfg.S = inst.S;
  } else {
    cfg.algo = Algorithm::kSarahPlusPlus;
    cfg.gamma = inst.gamma;
    cfg.T = inst.T;
  }
  // Records with cadence 1 are w~_0 followed by every later iterate; all but
  // the final one are the points the bound averages over.
  auto sample = [&](std::uint64_t seed) {
    OptimizerConfig c = cfg;
    c.seed = seed;
    const RunTrace tr = run(p, c);
    if (inst.which == TheoremBound::kStronglyT4) return p.objective(tr.final_w) - inst.f_star;
    double sum = 0.0;
    for (std::size_t k = 0; k + 1 < tr.records.size(); ++k) sum += *tr.records[k].grad_norm_sq;
    if (nonconvex) return sum / static_cast<double>((inst.m + 1) * inst.S);
    std::uint64_t steps = 0;
    for (std::size_t ts : tr.realized_Ts) steps += ts;
    return steps > 0 ? sum / static_cast<double>(steps) : 0.0;
  };
  return monte_carlo(inst.replicas, sample, inst.jobs);
}

namespace {

double exact_theorem_lhs(const Problem& p, const TheoremInstance& inst) {
  if (inst.which == TheoremBound::kNonconvexT1 || inst.which == TheoremBound::kNonconvexT2) {
    const EnsembleConfig cfg{inst.m, inst.S, inst.b, inst.eta, inst.w0, inst.budget};
    const SarahExpectations ex(p, cfg);
    double sum = 0.0;
    for (std::size_t s = 1; s <= inst.S; ++s) {
      for (std::size_t t = 0; t <= inst.m; ++t) sum += ex.at(Statistic::kGradNormSq, s, t);
    }
    return sum / static_cast<double>((inst.m + 1) * inst.S);
  }
  const auto ex =
      enumerate_sarah_pp(p, inst.eta, inst.gamma, inst.m, inst.T, inst.b, inst.w0, inst.budget);
  return inst.which == TheoremBound::kConvexT3 ? ex.avg_grad_norm_sq
                                               : ex.final_objective - inst.f_star;
}

}  // namespace

CheckReport check_theorem_bound(const Problem& p, const TheoremInstance& inst,
                                const std::string& instance) {
  check_precondition(p, inst);
  CheckReport r;
  r.name = std::string(to_string(inst.which));
  r.rhs = theorem_rhs(p, inst);
  if (inst.mode != EvalMode::kMonteCarlo) {
    try {
      r.lhs = exact_theorem_lhs(p, inst);
      r.instance = instance + "/exact";
      r.status = r.lhs <= r.rhs + kInequalitySlack ? CheckStatus::kPass : CheckStatus::kFail;
      return r;
    } catch (const BudgetExceeded&) {
      if (inst.replicas == 0 || inst.mode == EvalMode::kExact) {
        r.instance = instance + "/exact";
        r.lhs = std::numeric_limits<double>::quiet_NaN();
        r.status = CheckStatus::kSkip;
        return r;
      }
    }
  }
  const McEstimate est = theorem_lhs_monte_carlo(p, inst);
  r.instance = instance + "/mc" + std::to_string(est.replicas);
  r.lhs = est.mean;
  r.status = est.mean <= r.rhs + 3.0 * est.stderr_ ? CheckStatus::kPass : CheckStatus::kFail;
  return r;
}

ReferenceSolution solve_reference(const Problem& p, double tol, const DenseVector* init,
                                  std::uint64_t eval_cap) {
  if (!is_convex(p.kind())) {
    throw InapplicableError("reference solve needs a convex problem; " +
                            std::string(to_string(p.kind())) + " is nonconvex");
  }
  if (!(tol > 0.0)) throw ConfigError("tolerance must be positive");
  const double eta = 1.0 / p.smoothness().L;
  ReferenceSolution ref;
  ref.tol = tol;
  DenseVector w = init ? *init : DenseVector(p.dim());
  std::uint64_t evals = 0;
  for (;;) {
    const DenseVector g = p.full_grad(w);
    evals += p.n();
    const double g_sq = norm_sq(g);
    ref.w_star = w;
    ref.grad_norm_sq = g_sq;
    ref.f_star = p.objective(w);
    if (g_sq <= tol) return ref;
    if (evals + p.n() > eval_cap) {
      throw ReferenceNotConverged("reference solve stopped after " +
                                      std::to_string(ref.iterations) + " iterations with " +
                                      "||grad F||^2 = " + fmt17(g_sq),
                                  ref);
    }
    axpy_inplace(-eta, g, w);
    ++ref.iterations;
  }
}

DenseVector finite_diff_grad(const Problem& p, std::optional<std::size_t> i, const DenseVector& w,
                             double h) {
  if (!(h > 0.0)) throw ConfigError("finite-difference step must be positive");
  auto f = [&](const DenseVector& x) { return i ? p.component_value(*i, x) : p.objective(x); };
  DenseVector g(w.size());
  DenseVector probe = w;
  for (std::size_t j = 0; j < w.size(); ++j) {
    probe[j] = w[j] + h;
    const double up = f(probe);
    probe[j] = w[j] - h;
    const double down = f(probe);
    probe[j] = w[j];
    g[j] = (up - down) / (2.0 * h);
  }
  return g;
}

}  // namespace sarah
