#include "sarah/verify_suites.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "sarah/dataset.hpp"
#include "sarah/errors.hpp"
#include "sarah/planning.hpp"

namespace sarah {
namespace {

constexpr std::uint64_t kTinySeed = 11;
constexpr std::uint64_t kMcDataSeed = 5;
constexpr std::size_t kTinyS = 2;

double tiny_lambda(ProblemKind kind) { return kind == ProblemKind::kLogisticNonconvex ? 0.5 : 0.1; }

using Emit = std::function<void(CheckReport)>;

CheckReport skipped(const std::string& name, const std::string& instance) {
  CheckReport r;
  r.name = name;
  r.instance = instance;
  r.lhs = r.rhs = std::numeric_limits<double>::quiet_NaN();
  r.status = CheckStatus::kSkip;
  return r;
}

std::string instance_id(const TinyInstance& ti, std::size_t m, std::size_t b) {
  return ti.id + "/m" + std::to_string(m) + "/b" + std::to_string(b);
}

// F(w_*) for convex kinds, the analytic lower bound otherwise.
double optimum_or_bound(const Problem& p) {
  return is_convex(p.kind()) ? solve_reference(p).f_star : p.lower_bound();
}

void suite_telescoping(const VerifyOptions& opt, const Emit& emit) {
  for (const auto& ti : tiny_problems()) {
    const Problem& p = ti.problem;
    const double eta = 1.0 / p.smoothness().L;
    for (std::size_t m = 1; m <= 3; ++m) {
      for (std::size_t b : matrix_batches(p.n())) {
        const std::string id = instance_id(ti, m, b);
        try {
          const SarahExpectations ex(p, EnsembleConfig{m, kTinyS, b, eta, ti.w0, opt.budget});
          for (std::size_t s = 1; s <= kTinyS; ++s) {
            for (std::size_t t = 1; t <= m; ++t) {
              emit(check_lemma_telescoping(
                  ex, s, t, id + "/s" + std::to_string(s) + "/t" + std::to_string(t)));
            }
          }
        } catch (const BudgetExceeded&) {
          emit(skipped("lemma-telescoping", id));
        }
      }
    }
  }
}

void suite_convex_variance(const VerifyOptions& opt, const Emit& emit) {
  for (const auto& ti : tiny_problems()) {
    const Problem& p = ti.problem;
    if (!is_convex(p.kind())) continue;
    const double L = p.smoothness().L;
    for (double factor : {0.5, 1.0, 1.9}) {
      const double eta = factor / L;
      char tag[32];
      std::snprintf(tag, sizeof tag, "/eta%gL", factor);
      for (std::size_t m = 1; m <= 3; ++m) {
        for (std::size_t b : matrix_batches(p.n())) {
          const std::string id = instance_id(ti, m, b) + tag;
          try {
            const SarahExpectations ex(p, EnsembleConfig{m, kTinyS, b, eta, ti.w0, opt.budget});
            for (std::size_t s = 1; s <= kTinyS; ++s) {
              for (std::size_t t = 0; t <= m; ++t) {
                const std::string at = id + "/s" + std::to_string(s) + "/t" + std::to_string(t);
                emit(check_variance_bound_convex(p, ex, eta, s, t, at));
                if (factor <= 1.0) emit(check_descent_step(p, ex, eta, s, t, at));
              }
            }
          } catch (const BudgetExceeded&) {
            emit(skipped("convex-variance", id));
          }
        }
      }
    }
  }
}

Problem mc_problem(ProblemKind kind) {
  constexpr std::size_t n = 100, d = 10;
  if (kind == ProblemKind::kRidge) return Problem(synth_ridge(n, d, kMcDataSeed), kind, 0.1);
  return Problem(synth_classification(n, d, kMcDataSeed), kind, 1.0 / n);
}

void suite_theorem_nonconvex(const VerifyOptions& opt, const Emit& emit) {
  for (const auto& ti : tiny_problems()) {
    const Problem& p = ti.problem;
    const double f_star = optimum_or_bound(p);
    for (std::size_t m = 1; m <= 3; ++m) {
      for (std::size_t b : matrix_batches(p.n())) {
        TheoremInstance inst;
        inst.which = b == 1 ? TheoremBound::kNonconvexT1 : TheoremBound::kNonconvexT2;
        inst.m = m;
        inst.S = kTinyS;
        inst.b = b;
        inst.eta = eta_max_nonconvex(p.smoothness().L, m, b, p.n());
        inst.w0 = ti.w0;
        inst.f_star = f_star;
        inst.budget = opt.budget;
        inst.mode = EvalMode::kExact;
        emit(check_theorem_bound(p, inst, instance_id(ti, m, b)));
      }
    }
  }
  if (!opt.monte_carlo) return;
  const Problem p = mc_problem(ProblemKind::kLogisticNonconvex);
  for (std::size_t b : {std::size_t{1}, std::size_t{2}, std::size_t{10}, p.n()}) {
    TheoremInstance inst;
    inst.which = b == 1 ? TheoremBound::kNonconvexT1 : TheoremBound::kNonconvexT2;
    inst.m = 20;
    inst.S = 3;
    inst.b = b;
    inst.eta = eta_max_nonconvex(p.smoothness().L, inst.m, b, p.n());
    inst.w0 = DenseVector(p.dim(), 1.0);
    inst.f_star = p.lower_bound();
    inst.replicas = 500;
    inst.jobs = opt.jobs;
    inst.mode = EvalMode::kMonteCarlo;
    emit(check_theorem_bound(p, inst, "nonconvex/n100/m20/S3/b" + std::to_string(b)));
  }
}

// Shared by the convex and strongly convex suites.
void suite_sarah_pp(TheoremBound which, const VerifyOptions& opt, const Emit& emit) {
  const bool strongly = which == TheoremBound::kStronglyT4;
  for (const auto& ti : tiny_problems()) {
    const Problem& p = ti.problem;
    if (!is_convex(p.kind())) continue;
    const double f_star = solve_reference(p).f_star;
    for (double gamma : {0.5, 1.0}) {
      for (std::size_t T : {std::size_t{3}, std::size_t{5}}) {
        for (std::size_t m = 1; m <= 3; ++m) {
          for (std::size_t b : matrix_batches(p.n())) {
            TheoremInstance inst;
            inst.which = which;
            inst.m = m;
            inst.b = b;
            inst.T = T;
            inst.gamma = gamma;
            inst.eta = gamma / p.smoothness().L;
            inst.w0 = ti.w0;
            inst.f_star = f_star;
            inst.budget = opt.budget;
            inst.mode = EvalMode::kExact;
            char tag[48];
            std::snprintf(tag, sizeof tag, "/T%zu/gamma%g", T, gamma);
            emit(check_theorem_bound(p, inst, instance_id(ti, m, b) + tag));
          }
        }
      }
    }
  }
  if (!opt.monte_carlo) return;
  const Problem p = mc_problem(ProblemKind::kRidge);
  const double f_star = solve_reference(p).f_star;
  const std::vector<std::size_t> budgets =
      strongly ? std::vector<std::size_t>{50, 200} : std::vector<std::size_t>{50};
  for (std::size_t T : budgets) {
    TheoremInstance inst;
    inst.which = which;
    inst.m = 50;
    inst.b = 1;
    inst.T = T;
    inst.gamma = 0.5;
    inst.eta = inst.gamma / p.smoothness().L;
    inst.w0 = DenseVector(p.dim());
    inst.f_star = f_star;
    inst.replicas = 200;
    inst.jobs = opt.jobs;
    inst.mode = EvalMode::kMonteCarlo;
    emit(check_theorem_bound(p, inst, "ridge/n100/m50/T" + std::to_string(T) + "/gamma0.5"));
  }
}

}  // namespace

std::vector<TinyInstance> tiny_problems() {
  std::vector<TinyInstance> out;
  for (ProblemKind kind :
       {ProblemKind::kRidge, ProblemKind::kLogisticL2, ProblemKind::kLogisticNonconvex}) {
    for (std::size_t n = 1; n <= 3; ++n) {
      Dataset data = kind == ProblemKind::kRidge ? synth_ridge(n, 2, kTinySeed)
                                                 : synth_classification(n, 2, kTinySeed);
      out.push_back(TinyInstance{std::string(to_string(kind)) + "/n" + std::to_string(n),
                                 Problem(std::move(data), kind, tiny_lambda(kind)),
                                 DenseVector{1.5, -2.0}});
    }
  }
  return out;
}

std::vector<std::size_t> matrix_batches(std::size_t n) {
  std::vector<std::size_t> out;
  for (std::size_t b : {std::size_t{1}, std::size_t{2}, n}) {
    if (b <= n && std::find(out.begin(), out.end(), b) == out.end()) out.push_back(b);
  }
  return out;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"lemma-telescoping", "convex-variance",
                                              "theorem-nonconvex", "theorem-convex",
                                              "theorem-strongly",  "all"};
  return names;
}

bool is_known_suite(std::string_view name) {
  const auto& names = suite_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

std::vector<CheckReport> run_suite(std::string_view name, const VerifyOptions& options,
                                   const std::function<void(const CheckReport&)>& on_report) {
  if (!is_known_suite(name)) {
    throw ConfigError("unknown suite '" + std::string(name) +
                      "' (expected lemma-telescoping, convex-variance, theorem-nonconvex, "
                      "theorem-convex, theorem-strongly or all)");
  }
  std::vector<CheckReport> reports;
  const Emit emit = [&](CheckReport r) {
    if (on_report) on_report(r);
    reports.push_back(std::move(r));
  };
  const bool all = name == "all";
  if (all || name == "lemma-telescoping") suite_telescoping(options, emit);
  if (all || name == "convex-variance") suite_convex_variance(options, emit);
  if (all || name == "theorem-nonconvex") suite_theorem_nonconvex(options, emit);
  if (all || name == "theorem-convex") suite_sarah_pp(TheoremBound::kConvexT3, options, emit);
  if (all || name == "theorem-strongly") suite_sarah_pp(TheoremBound::kStronglyT4, options, emit);
  return reports;
}

}  // namespace sarah
