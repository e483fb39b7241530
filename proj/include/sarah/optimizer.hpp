#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "sarah/linalg.hpp"
#include "sarah/problem.hpp"
#include "sarah/reference.hpp"
#include "sarah/rng.hpp"

namespace sarah {

enum class Algorithm { kSarah, kSarahPlus, kSarahPlusPlus, kSarahAdaptive, kGd };

std::string_view to_string(Algorithm algo) noexcept;
Algorithm parse_algorithm(std::string_view name);

enum class OutputMode {
  kLastIterate,
  // SARAH only: a uniformly chosen iterate w_t^(s), t = 0..m, s = 1..S.
  kUniformIterate,
};

inline constexpr double kDefaultGamma = 0.125;

struct OptimizerConfig {
  Algorithm algo = Algorithm::kSarah;
  // Required in free mode except for sarah-adaptive; derived in theorem mode when unset.
  std::optional<double> eta;
  std::size_t m = 0;
  // Outer loops for sarah, sarah-plus, sarah-adaptive; step count for gd.
  std::size_t S = 1;
  std::size_t b = 1;
  // sarah-plus and sarah-adaptive default to 1/8; sarah-pp defaults to min(1, L * eta).
  std::optional<double> gamma;
  // sarah-pp total iteration budget.
  std::size_t T = 0;
  std::uint64_t seed = 0;
  bool theorem_mode = false;
  // Starting point; the zero vector when unset.
  std::optional<DenseVector> init;
  // Inner steps between F / ||grad F||^2 checkpoints; default max(1, n / (2b)).
  std::optional<std::size_t> checkpoint_every;
  // Stop as soon as grad_evals >= max_epochs * n.
  std::optional<double> max_epochs;
  OutputMode output = OutputMode::kLastIterate;
};

// Config after validation against a problem: every parameter concrete.
struct ResolvedConfig {
  Algorithm algo = Algorithm::kSarah;
  double eta = 0.0;
  double gamma = 1.0;
  std::size_t m = 0;
  std::size_t S = 1;
  std::size_t b = 1;
  std::size_t T = 0;
  std::uint64_t seed = 0;
  std::size_t checkpoint_every = 1;
  std::optional<std::uint64_t> eval_budget;
  double L = 0.0;
  OutputMode output = OutputMode::kLastIterate;
  DenseVector init;
};

// Checks every config invariant (and, in theorem mode, the step-size
// precondition of the matching theorem). Throws ConfigError.
ResolvedConfig resolve_config(const Problem& p, const OptimizerConfig& cfg);

// (w_{t-1}, w_t, v_t) of the recursive estimator.
struct InnerLoopState {
  DenseVector w_prev;
  DenseVector w_cur;
  DenseVector v;
  std::size_t t = 0;
  double v0_norm_sq = 0.0;
};

// Starts an outer loop at w_0 with v_0 = grad F(w_0) already computed.
InnerLoopState start_inner_loop(DenseVector w0, DenseVector v0);

// w_prev <- w_cur, w_cur <- w_cur - eta * v, t <- t + 1.
void take_step(InnerLoopState& st, double eta);

// v <- v + (1/b) sum_{i in batch} [grad f_i(w_cur) - grad f_i(w_prev)].
// The batch must be nonempty with distinct in-range indices; it is summed in
// the given order.
void update_estimator(const Problem& p, InnerLoopState& st, std::span<const std::size_t> batch);

// One recursion step: take_step followed by update_estimator (2b gradient evaluations).
InnerLoopState sarah_inner_step(const Problem& p, InnerLoopState st, double eta,
                                std::span<const std::size_t> batch);

class BatchSampler {
 public:
  virtual ~BatchSampler() = default;
  // Sorted batch of b distinct indices from [0, n).
  virtual std::vector<std::size_t> next_batch(std::size_t n, std::size_t b) = 0;
};

// One draw event per call from the seed's sampling stream.
class SeededSampler final : public BatchSampler {
 public:
  explicit SeededSampler(std::uint64_t seed) : rng_(CounterRng(seed).split(stream::kSampling)) {}
  std::vector<std::size_t> next_batch(std::size_t n, std::size_t b) override;

 private:
  CounterRng rng_;
};

// Replays a fixed list of batches; used to drive a run down a chosen sample path.
class ScriptedSampler final : public BatchSampler {
 public:
  explicit ScriptedSampler(std::vector<std::vector<std::size_t>> batches)
      : batches_(std::move(batches)) {}
  std::vector<std::size_t> next_batch(std::size_t n, std::size_t b) override;
  std::size_t consumed() const noexcept { return next_; }

 private:
  std::vector<std::vector<std::size_t>> batches_;
  std::size_t next_ = 0;
};

struct TraceRecord {
  std::uint64_t grad_evals = 0;
  double epoch = 0.0;
  std::size_t outer_s = 0;
  // Index t of the recorded iterate w_t^(s).
  std::size_t inner_t = 0;
  double f_val = 0.0;
  std::optional<double> subopt;
  std::optional<double> grad_norm_sq;
  // Norm of the estimator at the recorded iterate; absent before the first one exists.
  std::optional<double> v_norm_sq;
  double eta_used = 0.0;
};

struct RunTrace {
  Algorithm algo = Algorithm::kSarah;
  std::size_t n = 0;
  std::vector<TraceRecord> records;
  // ||v||^2 of every estimator in computation order (v_0 of each loop included).
  std::vector<double> v_norm_sq_steps;
  // Step size of every w-update in order.
  std::vector<double> eta_steps;
  // Number of w-updates in each outer loop.
  std::vector<std::size_t> realized_Ts;
  std::size_t realized_S = 0;
  // w~_0, w~_1, ..., one per completed outer loop (per step for gd).
  std::vector<DenseVector> outer_points;
  DenseVector final_w;
  std::uint64_t grad_evals = 0;
  std::uint64_t inner_steps = 0;
  // A full gradient was exactly zero; the run stopped there.
  bool converged = false;
  // The max_epochs budget cut the run short.
  bool budget_stopped = false;
  // sarah-adaptive: estimators with ||v_t||^2 > ||v_0||^2 on this path.
  std::size_t ratio_violations = 0;
};

RunTrace run_sarah(const Problem& p, const OptimizerConfig& cfg,
                   const ReferenceSolution* ref = nullptr, BatchSampler* sampler = nullptr);
RunTrace run_sarah_plus(const Problem& p, const OptimizerConfig& cfg,
                        const ReferenceSolution* ref = nullptr, BatchSampler* sampler = nullptr);
RunTrace run_sarah_pp(const Problem& p, const OptimizerConfig& cfg,
                      const ReferenceSolution* ref = nullptr, BatchSampler* sampler = nullptr);
RunTrace run_sarah_adaptive(const Problem& p, const OptimizerConfig& cfg,
                            const ReferenceSolution* ref = nullptr,
                            BatchSampler* sampler = nullptr);
RunTrace run_gd(const Problem& p, double eta, std::size_t steps,
                const ReferenceSolution* ref = nullptr, const DenseVector* init = nullptr);

// Dispatches on cfg.algo.
RunTrace run(const Problem& p, const OptimizerConfig& cfg, const ReferenceSolution* ref = nullptr,
             BatchSampler* sampler = nullptr);

}  // namespace sarah
