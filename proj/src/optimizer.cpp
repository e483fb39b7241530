#include "sarah/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sarah/errors.hpp"
#include "sarah/planning.hpp"

namespace sarah {
namespace {

// Theorem step-size bounds are compared with this relative slack so that a
// step computed as gamma / L (or gamma as L * eta) is accepted at equality.
constexpr double kStepSlack = 1e-12;

bool within(double eta, double bound) { return eta <= bound * (1.0 + kStepSlack); }

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Bookkeeping shared by all runners: evaluation counts, checkpoints, budget.
class Recorder {
 public:
  Recorder(const Problem& p, const ResolvedConfig& rc, const ReferenceSolution* ref)
      : p_(p), rc_(rc), ref_(ref) {
    trace_.algo = rc.algo;
    trace_.n = p.n();
  }

  void count(std::uint64_t evals) { trace_.grad_evals += evals; }
  void estimator(double v_norm_sq) { trace_.v_norm_sq_steps.push_back(v_norm_sq); }
  void step(double eta) { trace_.eta_steps.push_back(eta); }
  void inner_step() { ++trace_.inner_steps; }

  bool out_of_budget() {
    if (rc_.eval_budget && trace_.grad_evals >= *rc_.eval_budget) {
      trace_.budget_stopped = true;
      return true;
    }
    return false;
  }

  void record(std::size_t s, std::size_t t, const DenseVector& w, std::optional<double> v_norm_sq,
              double eta) {
    TraceRecord r;
    r.grad_evals = trace_.grad_evals;
    r.epoch = static_cast<double>(trace_.grad_evals) / static_cast<double>(p_.n());
    r.outer_s = s;
    r.inner_t = t;
    r.f_val = p_.objective(w);
    if (ref_) r.subopt = r.f_val - ref_->f_star;
    r.grad_norm_sq = norm_sq(p_.full_grad(w));
    r.v_norm_sq = v_norm_sq;
    r.eta_used = eta;
    trace_.records.push_back(r);
  }

  // Checkpoint inside an inner loop after the estimator for w_t is formed.
  void maybe_record(const InnerLoopState& st, std::size_t s, double eta) {
    if (st.t % rc_.checkpoint_every == 0) record(s, st.t, st.w_cur, norm_sq(st.v), eta);
  }

  void end_outer(std::size_t s, const InnerLoopState& st, double eta) {
    trace_.outer_points.push_back(st.w_cur);
    trace_.realized_Ts.push_back(st.t);
    trace_.realized_S = s;
    // The stopping loops may already have checkpointed w_{T_s}.
    const auto& last = trace_.records.back();
    if (last.outer_s == s && last.inner_t == st.t) return;
    record(s, st.t, st.w_cur, norm_sq(st.v), eta);
  }

  void converged(std::size_t s, const DenseVector& w) {
    trace_.converged = true;
    trace_.realized_S = s;
    record(s, 0, w, 0.0, 0.0);
  }

  RunTrace finish(DenseVector final_w) {
    trace_.final_w = std::move(final_w);
    return std::move(trace_);
  }

  RunTrace& trace() { return trace_; }

 private:
  const Problem& p_;
  const ResolvedConfig& rc_;
  const ReferenceSolution* ref_;
  RunTrace trace_;
};

void require_algo(const ResolvedConfig& rc, Algorithm expected) {
  if (rc.algo != expected) {
    throw ConfigError("config is for " + std::string(to_string(rc.algo)) + ", runner expects " +
                      std::string(to_string(expected)));
  }
}

}  // namespace

std::string_view to_string(Algorithm algo) noexcept {
  switch (algo) {
    case Algorithm::kSarah: return "sarah";
    case Algorithm::kSarahPlus: return "sarah-plus";
    case Algorithm::kSarahPlusPlus: return "sarah-pp";
    case Algorithm::kSarahAdaptive: return "sarah-adaptive";
    case Algorithm::kGd: return "gd";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view name) {
  for (Algorithm a : {Algorithm::kSarah, Algorithm::kSarahPlus, Algorithm::kSarahPlusPlus,
                      Algorithm::kSarahAdaptive, Algorithm::kGd}) {
    if (name == to_string(a)) return a;
  }
  throw ConfigError("unknown algorithm '" + std::string(name) + "'");
}

ResolvedConfig resolve_config(const Problem& p, const OptimizerConfig& cfg) {
  ResolvedConfig rc;
  rc.algo = cfg.algo;
  rc.m = cfg.m;
  rc.S = cfg.S;
  rc.b = cfg.b;
  rc.T = cfg.T;
  rc.seed = cfg.seed;
  rc.output = cfg.output;
  rc.L = p.smoothness().L;
  const std::size_t n = p.n();

  if (rc.b == 0 || rc.b > n) {
    throw ConfigError("batch size b=" + std::to_string(rc.b) + " must be in [1, n=" +
                      std::to_string(n) + "]");
  }
  if (rc.algo == Algorithm::kSarahPlusPlus) {
    if (rc.T == 0) throw ConfigError("sarah-pp needs a total iteration budget T >= 1");
    if (rc.m > rc.T) throw ConfigError("sarah-pp needs m <= T");
  } else if (rc.S == 0) {
    throw ConfigError("outer loop count S must be >= 1");
  }
  if (rc.output == OutputMode::kUniformIterate && rc.algo != Algorithm::kSarah) {
    throw ConfigError("uniform-iterate output is only defined for sarah");
  }
  if (cfg.gamma && !(*cfg.gamma > 0.0 && *cfg.gamma <= 1.0)) {
    throw ConfigError("gamma must be in (0, 1]");
  }
  if (cfg.eta && !(*cfg.eta > 0.0 && std::isfinite(*cfg.eta))) {
    throw ConfigError("eta must be positive and finite");
  }

  // Step size and gamma.
  switch (rc.algo) {
    case Algorithm::kSarah: {
      const double bound = eta_max_nonconvex(rc.L, rc.m, rc.b, n);
      if (cfg.theorem_mode && cfg.eta && !within(*cfg.eta, bound)) {
        throw ConfigError("theorem mode: eta=" + fmt(*cfg.eta) + " exceeds the nonconvex bound " +
                          fmt(bound));
      }
      if (!cfg.eta && !cfg.theorem_mode) throw ConfigError("sarah needs --eta or theorem mode");
      rc.eta = cfg.eta.value_or(bound);
      break;
    }
    case Algorithm::kSarahPlus:
      if (cfg.theorem_mode) throw ConfigError("sarah-plus has no step-size theorem");
      if (!cfg.eta) throw ConfigError("sarah-plus needs eta");
      rc.eta = *cfg.eta;
      rc.gamma = cfg.gamma.value_or(kDefaultGamma);
      break;
    case Algorithm::kSarahPlusPlus:
      if (cfg.eta) {
        rc.eta = *cfg.eta;
        rc.gamma = cfg.gamma.value_or(std::min(1.0, rc.L * rc.eta));
      } else {
        if (!cfg.theorem_mode) throw ConfigError("sarah-pp needs eta or theorem mode");
        rc.gamma = cfg.gamma.value_or(kDefaultGamma);
        rc.eta = rc.gamma / rc.L;
      }
      if (cfg.theorem_mode && !within(rc.eta, rc.gamma / rc.L)) {
        throw ConfigError("theorem mode: eta=" + fmt(rc.eta) + " exceeds gamma/L=" +
                          fmt(rc.gamma / rc.L));
      }
      break;
    case Algorithm::kSarahAdaptive:
      rc.eta = 1.0 / rc.L;
      rc.gamma = cfg.gamma.value_or(kDefaultGamma);
      break;
    case Algorithm::kGd:
      if (cfg.theorem_mode && cfg.eta && !within(*cfg.eta, 1.0 / rc.L)) {
        throw ConfigError("theorem mode: gd eta=" + fmt(*cfg.eta) + " exceeds 1/L=" +
                          fmt(1.0 / rc.L));
      }
      if (!cfg.eta && !cfg.theorem_mode) throw ConfigError("gd needs eta or theorem mode");
      rc.eta = cfg.eta.value_or(1.0 / rc.L);
      break;
  }

  rc.checkpoint_every = cfg.checkpoint_every.value_or(std::max<std::size_t>(1, n / (2 * rc.b)));
  if (rc.checkpoint_every == 0) throw ConfigError("checkpoint cadence must be >= 1");
  if (cfg.max_epochs) {
    if (!(*cfg.max_epochs > 0.0)) throw ConfigError("max_epochs must be positive");
    rc.eval_budget =
        static_cast<std::uint64_t>(std::ceil(*cfg.max_epochs * static_cast<double>(n)));
  }
  if (cfg.init) {
    if (cfg.init->size() != p.dim()) throw DimensionError("initial point has the wrong length");
    rc.init = *cfg.init;
  } else {
    rc.init = DenseVector(p.dim());
  }
  return rc;
}

InnerLoopState start_inner_loop(DenseVector w0, DenseVector v0) {
  InnerLoopState st;
  st.v0_norm_sq = norm_sq(v0);
  st.w_prev = w0;
  st.w_cur = std::move(w0);
  st.v = std::move(v0);
  return st;
}

void take_step(InnerLoopState& st, double eta) {
  st.w_prev = st.w_cur;
  axpy_inplace(-eta, st.v, st.w_cur);
  ++st.t;
}

void update_estimator(const Problem& p, InnerLoopState& st, std::span<const std::size_t> batch) {
  if (batch.empty()) throw ConfigError("empty mini-batch");
  DenseVector diff(p.dim());
  for (std::size_t k = 0; k < batch.size(); ++k) {
    for (std::size_t j = 0; j < k; ++j) {
      if (batch[j] == batch[k]) throw ConfigError("mini-batch indices must be distinct");
    }
    const DenseVector g_cur = p.component_grad(batch[k], st.w_cur);
    const DenseVector g_prev = p.component_grad(batch[k], st.w_prev);
    for (std::size_t j = 0; j < diff.size(); ++j) diff[j] = diff[j] + (g_cur[j] - g_prev[j]);
  }
  axpy_inplace(1.0 / static_cast<double>(batch.size()), diff, st.v);
}

InnerLoopState sarah_inner_step(const Problem& p, InnerLoopState st, double eta,
                                std::span<const std::size_t> batch) {
  take_step(st, eta);
  update_estimator(p, st, batch);
  return st;
}

std::vector<std::size_t> SeededSampler::next_batch(std::size_t n, std::size_t b) {
  return sample_without_replacement(rng_, n, b);
}

std::vector<std::size_t> ScriptedSampler::next_batch(std::size_t n, std::size_t b) {
  if (next_ >= batches_.size()) throw ConfigError("scripted sampler exhausted");
  auto batch = batches_[next_++];
  if (batch.size() != b) throw ConfigError("scripted batch has the wrong size");
  for (std::size_t i : batch) {
    if (i >= n) throw IndexError("scripted index out of range");
  }
  return batch;
}

RunTrace run_sarah(const Problem& p, const OptimizerConfig& cfg, const ReferenceSolution* ref,
                   BatchSampler* sampler) {
  const ResolvedConfig rc = resolve_config(p, cfg);
  require_algo(rc, Algorithm::kSarah);
  SeededSampler seeded(rc.seed);
  BatchSampler& draw = sampler ? *sampler : seeded;
  Recorder rec(p, rc, ref);

  // Output pick for kUniformIterate: global iterate index (s-1)(m+1) + t.
  std::optional<std::uint64_t> pick;
  std::optional<DenseVector> picked;
  if (rc.output == OutputMode::kUniformIterate) {
    CounterRng out_rng = CounterRng(rc.seed).split(stream::kOutputPick);
    pick = out_rng.uniform_index((rc.m + 1) * rc.S);
  }
  auto offer = [&](std::size_t s, std::size_t t, const DenseVector& w) {
    if (pick && *pick == (s - 1) * (rc.m + 1) + t) picked = w;
  };

  DenseVector w = rc.init;
  rec.trace().outer_points.push_back(w);
  rec.record(0, 0, w, std::nullopt, 0.0);
  for (std::size_t s = 1; s <= rc.S; ++s) {
    if (rec.out_of_budget()) break;
    DenseVector v0 = p.full_grad(w);
    rec.count(p.n());
    rec.estimator(norm_sq(v0));
    if (norm_sq(v0) == 0.0) {
      rec.converged(s, w);
      break;
    }
    offer(s, 0, w);
    InnerLoopState st = start_inner_loop(w, std::move(v0));
    bool stop = false;
    for (std::size_t t = 1; t <= rc.m; ++t) {
      take_step(st, rc.eta);
      rec.step(rc.eta);
      offer(s, st.t, st.w_cur);
      update_estimator(p, st, draw.next_batch(p.n(), rc.b));
      rec.count(2 * rc.b);
      rec.inner_step();
      rec.estimator(norm_sq(st.v));
      rec.maybe_record(st, s, rc.eta);
      if (rec.out_of_budget()) {
        stop = true;
        break;
      }
    }
    if (stop) {
      w = st.w_cur;
      rec.end_outer(s, st, rc.eta);
      break;
    }
    take_step(st, rc.eta);
    rec.step(rc.eta);
    w = st.w_cur;
    rec.end_outer(s, st, rc.eta);
  }
  return rec.finish(picked ? *picked : w);
}

RunTrace run_sarah_plus(const Problem& p, const OptimizerConfig& cfg, const ReferenceSolution* ref,
                        BatchSampler* sampler) {
  const ResolvedConfig rc = resolve_config(p, cfg);
  require_algo(rc, Algorithm::kSarahPlus);
  SeededSampler seeded(rc.seed);
  BatchSampler& draw = sampler ? *sampler : seeded;
  Recorder rec(p, rc, ref);

  DenseVector w = rc.init;
  rec.trace().outer_points.push_back(w);
  rec.record(0, 0, w, std::nullopt, 0.0);
  for (std::size_t s = 1; s <= rc.S; ++s) {
    if (rec.out_of_budget()) break;
    DenseVector v0 = p.full_grad(w);
    rec.count(p.n());
    rec.estimator(norm_sq(v0));
    if (norm_sq(v0) == 0.0) {
      rec.converged(s, w);
      break;
    }
    InnerLoopState st = start_inner_loop(w, std::move(v0));
    take_step(st, rc.eta);
    rec.step(rc.eta);
    bool stop = false;
    // Tests ||v_{t-1}||^2 before v_t is sampled; exits with w~_s = w_t.
    while (norm_sq(st.v) > rc.gamma * st.v0_norm_sq && st.t <= rc.m) {
      update_estimator(p, st, draw.next_batch(p.n(), rc.b));
      rec.count(2 * rc.b);
      rec.inner_step();
      rec.estimator(norm_sq(st.v));
      rec.maybe_record(st, s, rc.eta);
      if (rec.out_of_budget()) {
        stop = true;
        break;
      }
      take_step(st, rc.eta);
      rec.step(rc.eta);
    }
    w = st.w_cur;
    rec.end_outer(s, st, rc.eta);
    if (stop) break;
  }
  return rec.finish(w);
}

namespace {

// Shared loop of SARAH++ and SARAH Adaptive: test ||v_t||^2 >= gamma ||v_0||^2
// and t <= m, step, then refresh the estimator unless the cap t = m+1 was hit
// (that estimator would never be read).
template <typename StepSize>
bool stopping_inner_loop(const Problem& p, const ResolvedConfig& rc, Recorder& rec,
                         BatchSampler& draw, InnerLoopState& st, std::size_t s,
                         StepSize step_size, double& last_eta) {
  while (norm_sq(st.v) >= rc.gamma * st.v0_norm_sq && st.t <= rc.m) {
    const double eta = step_size(st);
    take_step(st, eta);
    rec.step(eta);
    last_eta = eta;
    if (st.t <= rc.m) {
      update_estimator(p, st, draw.next_batch(p.n(), rc.b));
      rec.count(2 * rc.b);
      rec.inner_step();
      rec.estimator(norm_sq(st.v));
      if (norm_sq(st.v) > st.v0_norm_sq) ++rec.trace().ratio_violations;
      rec.maybe_record(st, s, eta);
    }
    if (rec.out_of_budget()) return true;
  }
  return false;
}

}  // namespace

RunTrace run_sarah_pp(const Problem& p, const OptimizerConfig& cfg, const ReferenceSolution* ref,
                      BatchSampler* sampler) {
  const ResolvedConfig rc = resolve_config(p, cfg);
  require_algo(rc, Algorithm::kSarahPlusPlus);
  SeededSampler seeded(rc.seed);
  BatchSampler& draw = sampler ? *sampler : seeded;
  Recorder rec(p, rc, ref);

  DenseVector w = rc.init;
  rec.trace().outer_points.push_back(w);
  rec.record(0, 0, w, std::nullopt, 0.0);
  std::uint64_t G = 0;
  std::size_t s = 0;
  while (G < rc.T) {
    if (rec.out_of_budget()) break;
    ++s;
    DenseVector v0 = p.full_grad(w);
    rec.count(p.n());
    rec.estimator(norm_sq(v0));
    if (norm_sq(v0) == 0.0) {
      rec.converged(s, w);
      break;
    }
    InnerLoopState st = start_inner_loop(w, std::move(v0));
    double last_eta = 0.0;
    const bool stop = stopping_inner_loop(
        p, rc, rec, draw, st, s, [&](const InnerLoopState&) { return rc.eta; }, last_eta);
    G += st.t;
    w = st.w_cur;
    rec.end_outer(s, st, last_eta);
    if (stop) break;
  }
  return rec.finish(w);
}

RunTrace run_sarah_adaptive(const Problem& p, const OptimizerConfig& cfg,
                            const ReferenceSolution* ref, BatchSampler* sampler) {
  const ResolvedConfig rc = resolve_config(p, cfg);
  require_algo(rc, Algorithm::kSarahAdaptive);
  SeededSampler seeded(rc.seed);
  BatchSampler& draw = sampler ? *sampler : seeded;
  Recorder rec(p, rc, ref);
  const double inv_L = 1.0 / rc.L;

  DenseVector w = rc.init;
  rec.trace().outer_points.push_back(w);
  rec.record(0, 0, w, std::nullopt, 0.0);
  for (std::size_t s = 1; s <= rc.S; ++s) {
    if (rec.out_of_budget()) break;
    DenseVector v0 = p.full_grad(w);
    rec.count(p.n());
    rec.estimator(norm_sq(v0));
    if (norm_sq(v0) == 0.0) {
      rec.converged(s, w);
      break;
    }
    InnerLoopState st = start_inner_loop(w, std::move(v0));
    double last_eta = 0.0;
    const bool stop = stopping_inner_loop(
        p, rc, rec, draw, st, s,
        [&](const InnerLoopState& state) {
          return inv_L * (norm_sq(state.v) / state.v0_norm_sq);
        },
        last_eta);
    w = st.w_cur;
    rec.end_outer(s, st, last_eta);
    if (stop) break;
  }
  return rec.finish(w);
}

RunTrace run_gd(const Problem& p, double eta, std::size_t steps, const ReferenceSolution* ref,
                const DenseVector* init) {
  OptimizerConfig cfg;
  cfg.algo = Algorithm::kGd;
  cfg.eta = eta;
  cfg.S = std::max<std::size_t>(steps, 1);
  if (init) cfg.init = *init;
  const ResolvedConfig rc = resolve_config(p, cfg);
  Recorder rec(p, rc, ref);

  DenseVector w = rc.init;
  rec.trace().outer_points.push_back(w);
  rec.record(0, 0, w, std::nullopt, 0.0);
  for (std::size_t k = 1; k <= steps; ++k) {
    DenseVector g = p.full_grad(w);
    rec.count(p.n());
    rec.estimator(norm_sq(g));
    if (norm_sq(g) == 0.0) {
      rec.converged(k, w);
      break;
    }
    InnerLoopState st = start_inner_loop(std::move(w), std::move(g));
    take_step(st, eta);
    rec.step(eta);
    w = st.w_cur;
    rec.end_outer(k, st, eta);
  }
  return rec.finish(w);
}

RunTrace run(const Problem& p, const OptimizerConfig& cfg, const ReferenceSolution* ref,
             BatchSampler* sampler) {
  switch (cfg.algo) {
    case Algorithm::kSarah: return run_sarah(p, cfg, ref, sampler);
    case Algorithm::kSarahPlus: return run_sarah_plus(p, cfg, ref, sampler);
    case Algorithm::kSarahPlusPlus: return run_sarah_pp(p, cfg, ref, sampler);
    case Algorithm::kSarahAdaptive: return run_sarah_adaptive(p, cfg, ref, sampler);
    case Algorithm::kGd: {
      const ResolvedConfig rc = resolve_config(p, cfg);
      return run_gd(p, rc.eta, rc.S, ref, &rc.init);
    }
  }
  throw ConfigError("unknown algorithm");
}

}  // namespace sarah
