#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "sarah/dataset.hpp"
#include "sarah/errors.hpp"
#include "sarah/oracle.hpp"
#include "sarah/optimizer.hpp"
#include "sarah/planning.hpp"

using namespace sarah;

namespace {

Problem ridge(std::size_t n = 20, std::size_t d = 4, double lambda = 0.1) {
  return Problem(synth_ridge(n, d, 3), ProblemKind::kRidge, lambda);
}

Problem logistic(std::size_t n = 20, std::size_t d = 4) {
  return Problem(synth_classification(n, d, 3), ProblemKind::kLogisticL2, 0.05);
}

OptimizerConfig base(Algorithm algo, double eta) {
  OptimizerConfig c;
  c.algo = algo;
  c.eta = eta;
  c.init = DenseVector(4, 0.5);
  return c;
}

TEST(Algorithm, Names) {
  for (Algorithm a : {Algorithm::kSarah, Algorithm::kSarahPlus, Algorithm::kSarahPlusPlus,
                      Algorithm::kSarahAdaptive, Algorithm::kGd}) {
    EXPECT_EQ(parse_algorithm(to_string(a)), a);
  }
  EXPECT_THROW(parse_algorithm("svrg"), ConfigError);
}

TEST(GdEquivalence, SarahWithoutInnerLoop) {
  for (const Problem& p : {ridge(), logistic()}) {
    const double eta = 0.7 / p.smoothness().L;
    OptimizerConfig c = base(Algorithm::kSarah, eta);
    c.m = 0;
    c.S = 7;
    c.seed = 99;
    const RunTrace s = run(p, c);
    const RunTrace g = run_gd(p, eta, 7, nullptr, &*c.init);
    EXPECT_EQ(s.outer_points, g.outer_points);
    EXPECT_EQ(s.final_w, g.final_w);
    EXPECT_EQ(s.grad_evals, g.grad_evals);
  }
}

TEST(GdEquivalence, SarahPlusPlusWithoutInnerLoop) {
  for (const Problem& p : {ridge(), logistic()}) {
    const double eta = 0.9 / p.smoothness().L;
    OptimizerConfig c = base(Algorithm::kSarahPlusPlus, eta);
    c.m = 0;
    c.T = 9;
    const RunTrace s = run(p, c);
    const RunTrace g = run_gd(p, eta, 9, nullptr, &*c.init);
    EXPECT_EQ(s.outer_points, g.outer_points);
    EXPECT_EQ(s.realized_Ts, std::vector<std::size_t>(9, 1));
    EXPECT_EQ(s.final_w, g.final_w);
  }
}

TEST(GdEquivalence, DispatcherUsesStepsFromS) {
  const Problem p = ridge();
  OptimizerConfig c = base(Algorithm::kGd, 0.5);
  c.S = 4;
  const RunTrace r = run(p, c);
  EXPECT_EQ(r.outer_points.size(), 5u);
  EXPECT_EQ(r.grad_evals, 4u * p.n());
}

// Follows one scripted sample path and recomputes it independently.
TEST(Sarah, MatchesHandComputedPath) {
  const Problem p = ridge(5, 3);
  const double eta = 0.3;
  const std::vector<std::vector<std::size_t>> batches{{1, 4}, {0, 2}, {2, 3}, {0, 1}};
  OptimizerConfig c;
  c.algo = Algorithm::kSarah;
  c.eta = eta;
  c.m = 2;
  c.S = 2;
  c.b = 2;
  c.init = DenseVector{1.0, -1.0, 0.5};
  ScriptedSampler sampler(batches);
  const RunTrace tr = run(p, c, nullptr, &sampler);
  EXPECT_EQ(sampler.consumed(), 4u);

  std::vector<double> w{1.0, -1.0, 0.5};
  auto grad = [&](std::optional<std::size_t> i, const std::vector<double>& x) {
    const DenseVector g = i ? p.component_grad(*i, DenseVector(x)) : p.full_grad(DenseVector(x));
    return std::vector<double>(g.values().begin(), g.values().end());
  };
  std::size_t next = 0;
  for (int s = 0; s < 2; ++s) {
    std::vector<double> v = grad(std::nullopt, w);
    std::vector<double> w_prev = w;
    for (std::size_t j = 0; j < 3; ++j) w[j] -= eta * v[j];
    for (int t = 1; t <= 2; ++t) {
      const auto& batch = batches[next++];
      std::vector<double> diff(3, 0.0);
      for (std::size_t i : batch) {
        const auto a = grad(i, w), b = grad(i, w_prev);
        for (std::size_t j = 0; j < 3; ++j) diff[j] += a[j] - b[j];
      }
      for (std::size_t j = 0; j < 3; ++j) v[j] += diff[j] / 2.0;
      w_prev = w;
      for (std::size_t j = 0; j < 3; ++j) w[j] -= eta * v[j];
    }
  }
  for (std::size_t j = 0; j < 3; ++j) EXPECT_NEAR(tr.final_w[j], w[j], 1e-14);
}

TEST(Sarah, Accounting) {
  const Problem p = ridge(20, 4);
  OptimizerConfig c = base(Algorithm::kSarah, 0.1);
  c.m = 7;
  c.S = 3;
  c.b = 2;
  const RunTrace tr = run(p, c);
  EXPECT_EQ(tr.grad_evals, 3u * (20u + 2u * 2u * 7u));
  EXPECT_EQ(tr.inner_steps, 21u);
  EXPECT_EQ(tr.realized_Ts, std::vector<std::size_t>(3, 8));
  EXPECT_EQ(tr.eta_steps.size(), 24u);
  EXPECT_EQ(tr.v_norm_sq_steps.size(), 24u);
  EXPECT_EQ(tr.outer_points.size(), 4u);
  EXPECT_EQ(tr.final_w, tr.outer_points.back());
}

TEST(Sarah, RecordsAndCadence) {
  const Problem p = ridge(20, 4);
  OptimizerConfig c = base(Algorithm::kSarah, 0.1);
  c.m = 10;
  c.S = 2;
  c.checkpoint_every = 4;
  const RunTrace tr = run(p, c);
  ASSERT_FALSE(tr.records.empty());
  EXPECT_FALSE(tr.records[0].v_norm_sq.has_value());
  EXPECT_EQ(tr.records[0].grad_evals, 0u);
  std::vector<std::size_t> ts;
  for (const auto& r : tr.records) {
    ts.push_back(r.inner_t);
    EXPECT_EQ(r.epoch, static_cast<double>(r.grad_evals) / 20.0);
    EXPECT_EQ(r.f_val, r.f_val);
    EXPECT_FALSE(r.subopt.has_value());
  }
  EXPECT_EQ(ts, (std::vector<std::size_t>{0, 4, 8, 11, 4, 8, 11}));
  EXPECT_EQ(tr.records.back().f_val, p.objective(tr.final_w));
}

TEST(Sarah, DefaultCadence) {
  const Problem p = ridge(20, 4);
  OptimizerConfig c = base(Algorithm::kSarah, 0.1);
  c.m = 20;
  c.b = 2;
  EXPECT_EQ(resolve_config(p, c).checkpoint_every, 5u);
}

TEST(Sarah, SubOptimalityWithReference) {
  const Problem p = ridge();
  const ReferenceSolution ref = solve_reference(p);
  OptimizerConfig c = base(Algorithm::kSarah, 0.1);
  c.m = 5;
  const RunTrace tr = run(p, c, &ref);
  for (const auto& r : tr.records) {
    ASSERT_TRUE(r.subopt.has_value());
    EXPECT_EQ(*r.subopt, r.f_val - ref.f_star);
  }
}

TEST(Sarah, DeterministicPerSeed) {
  const Problem p = logistic();
  OptimizerConfig c = base(Algorithm::kSarah, 0.5);
  c.m = 15;
  c.S = 3;
  c.seed = 5;
  const RunTrace a = run(p, c), b = run(p, c);
  EXPECT_EQ(a.final_w, b.final_w);
  c.seed = 6;
  EXPECT_FALSE(run(p, c).final_w == a.final_w);
}

TEST(Sarah, FullBatchEstimatorIsExactGradient) {
  const Problem p = logistic(12, 4);
  const double eta = eta_max_nonconvex(p.smoothness().L, 6, 12, 12);
  InnerLoopState st = start_inner_loop(DenseVector{0.3, -0.2, 1.0, 0.0}, DenseVector(4));
  st.v = p.full_grad(st.w_cur);
  std::vector<std::size_t> all(12);
  std::iota(all.begin(), all.end(), 0);
  for (int t = 0; t < 6; ++t) {
    st = sarah_inner_step(p, st, eta, all);
    EXPECT_LE(std::sqrt(dist_sq(st.v, p.full_grad(st.w_cur))), 1e-10);
  }
}

TEST(Sarah, UniformIterateIsAVisitedPoint) {
  const Problem p = ridge(10, 4);
  OptimizerConfig c = base(Algorithm::kSarah, 0.2);
  c.m = 3;
  c.S = 3;
  c.checkpoint_every = 1;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    c.seed = seed;
    c.output = OutputMode::kLastIterate;
    const RunTrace last = run(p, c);
    c.output = OutputMode::kUniformIterate;
    const RunTrace uni = run(p, c);
    const double f = p.objective(uni.final_w);
    bool found = false;
    // Candidates are w_t^(s), t = 0..m: every record except the very last.
    for (std::size_t k = 0; k + 1 < last.records.size(); ++k) {
      found = found || last.records[k].f_val == f;
    }
    EXPECT_TRUE(found) << "seed " << seed;
  }
}

TEST(SarahPlus, StoppingRule) {
  const Problem p = ridge();
  OptimizerConfig c = base(Algorithm::kSarahPlus, 0.1);
  c.m = 6;
  c.S = 2;
  c.gamma = 1.0;
  // ||v_0||^2 > ||v_0||^2 is false: only w_1 is taken.
  EXPECT_EQ(run(p, c).realized_Ts, (std::vector<std::size_t>{1, 1}));
  c.gamma = 1e-300;
  EXPECT_EQ(run(p, c).realized_Ts, (std::vector<std::size_t>{7, 7}));
}

TEST(SarahPlusPlus, StoppingTimes) {
  const Problem p = logistic(30, 4);
  OptimizerConfig c = base(Algorithm::kSarahPlusPlus, 0.5 / p.smoothness().L);
  c.m = 10;
  c.T = 40;
  c.theorem_mode = true;
  c.gamma = 0.5;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    c.seed = seed;
    const RunTrace tr = run(p, c);
    const std::size_t total = std::accumulate(tr.realized_Ts.begin(), tr.realized_Ts.end(), 0u);
    EXPECT_GE(total, 40u);
    EXPECT_LT(total - tr.realized_Ts.back(), 40u);
    for (std::size_t ts : tr.realized_Ts) {
      EXPECT_GE(ts, 1u);
      EXPECT_LE(ts, 11u);
    }
    EXPECT_EQ(tr.realized_S, tr.realized_Ts.size());
  }
}

TEST(SarahPlusPlus, StopsWhenEstimatorDecays) {
  // At the cap every loop would have m + 1 steps; decay must end some earlier.
  const Problem p = ridge(30, 4);
  OptimizerConfig c = base(Algorithm::kSarahPlusPlus, 0.9 / p.smoothness().L);
  c.m = 30;
  c.T = 300;
  c.gamma = 0.5;
  const RunTrace tr = run(p, c);
  EXPECT_LT(*std::min_element(tr.realized_Ts.begin(), tr.realized_Ts.end()), 31u);
}

TEST(SarahAdaptive, StepSizesFollowEstimatorRatio) {
  const Problem p = logistic(30, 4);
  OptimizerConfig c;
  c.algo = Algorithm::kSarahAdaptive;
  c.m = 15;
  c.S = 3;
  c.init = DenseVector(4, 0.5);
  const RunTrace tr = run(p, c);
  const double L = p.smoothness().L;
  // Walk the per-loop sequences: v_0, v_1, ... and eta_0, eta_1, ...
  std::size_t vi = 0, ei = 0;
  for (std::size_t ts : tr.realized_Ts) {
    const double v0 = tr.v_norm_sq_steps[vi];
    for (std::size_t t = 0; t < ts; ++t) {
      EXPECT_DOUBLE_EQ(tr.eta_steps[ei + t], (1.0 / L) * (tr.v_norm_sq_steps[vi + t] / v0));
    }
    EXPECT_EQ(tr.eta_steps[ei], 1.0 / L);
    // Estimators formed in this loop: v_0 plus one per step below the cap.
    vi += 1 + std::min(ts, c.m);
    ei += ts;
  }
  EXPECT_EQ(ei, tr.eta_steps.size());
  EXPECT_EQ(vi, tr.v_norm_sq_steps.size());
}

TEST(Convergence, AllVariantsReduceSuboptimality) {
  const Problem p = ridge(40, 5, 0.1);
  const ReferenceSolution ref = solve_reference(p);
  const double L = p.smoothness().L;
  std::vector<OptimizerConfig> cfgs;
  OptimizerConfig s = base(Algorithm::kSarah, 0.5 / L);
  s.init = DenseVector(5, 0.5);
  s.m = 40;
  s.S = 20;
  cfgs.push_back(s);
  OptimizerConfig sp = s;
  sp.algo = Algorithm::kSarahPlus;
  cfgs.push_back(sp);
  OptimizerConfig pp = s;
  pp.algo = Algorithm::kSarahPlusPlus;
  pp.T = 800;
  cfgs.push_back(pp);
  OptimizerConfig ad = s;
  ad.algo = Algorithm::kSarahAdaptive;
  ad.eta.reset();
  ad.S = 40;
  cfgs.push_back(ad);
  for (const auto& c : cfgs) {
    const RunTrace tr = run(p, c, &ref);
    EXPECT_LT(*tr.records.back().subopt, 1e-8 * *tr.records.front().subopt) << to_string(c.algo);
  }
}

TEST(Budget, MaxEpochsStopsRun) {
  const Problem p = ridge(20, 4);
  for (Algorithm a : {Algorithm::kSarah, Algorithm::kSarahPlus, Algorithm::kSarahPlusPlus,
                      Algorithm::kSarahAdaptive}) {
    OptimizerConfig c = base(a, 0.1);
    if (a == Algorithm::kSarahAdaptive) c.eta.reset();
    c.m = 40;
    c.S = 100;
    c.T = 100000;
    c.gamma = 1e-300;
    c.max_epochs = 3.0;
    const RunTrace tr = run(p, c);
    EXPECT_TRUE(tr.budget_stopped) << to_string(a);
    EXPECT_GE(tr.grad_evals, 60u);
    EXPECT_LE(tr.grad_evals, 60u + 20u);
  }
}

TEST(Converged, ZeroFullGradientStops) {
  // grad F(0) = 0: the two components cancel and lambda w vanishes at 0.
  const Problem p(parse_libsvm_string("1 1:1\n-1 1:1\n"), ProblemKind::kLogisticL2, 0.1);
  for (Algorithm a : {Algorithm::kSarah, Algorithm::kSarahPlus, Algorithm::kSarahPlusPlus,
                      Algorithm::kSarahAdaptive, Algorithm::kGd}) {
    OptimizerConfig c;
    c.algo = a;
    c.eta = 0.5;
    c.m = 3;
    c.S = 3;
    c.T = 5;
    const RunTrace tr = run(p, c);
    EXPECT_TRUE(tr.converged) << to_string(a);
    EXPECT_EQ(tr.final_w, DenseVector(1));
    EXPECT_EQ(tr.grad_evals, 2u);
  }
}

TEST(ResolveConfig, Errors) {
  const Problem p = ridge(10, 4);
  auto bad = [&](auto mutate) {
    OptimizerConfig c = base(Algorithm::kSarah, 0.1);
    c.m = 2;
    c.T = 5;
    mutate(c);
    EXPECT_THROW(resolve_config(p, c), Error);
  };
  bad([](OptimizerConfig& c) { c.b = 0; });
  bad([](OptimizerConfig& c) { c.b = 11; });
  bad([](OptimizerConfig& c) { c.S = 0; });
  bad([](OptimizerConfig& c) { c.eta = -1.0; });
  bad([](OptimizerConfig& c) { c.eta.reset(); });
  bad([](OptimizerConfig& c) { c.gamma = 0.0; });
  bad([](OptimizerConfig& c) { c.gamma = 1.5; });
  bad([](OptimizerConfig& c) { c.theorem_mode = true, c.eta = 10.0; });
  bad([](OptimizerConfig& c) { c.init = DenseVector(3); });
  bad([](OptimizerConfig& c) { c.max_epochs = 0.0; });
  bad([](OptimizerConfig& c) { c.checkpoint_every = 0; });
  bad([](OptimizerConfig& c) { c.algo = Algorithm::kSarahPlusPlus, c.T = 0; });
  bad([](OptimizerConfig& c) { c.algo = Algorithm::kSarahPlusPlus, c.m = 6; });
  bad([](OptimizerConfig& c) {
    c.algo = Algorithm::kSarahPlusPlus, c.theorem_mode = true, c.gamma = 0.1;
  });
  bad([](OptimizerConfig& c) { c.algo = Algorithm::kSarahPlus, c.theorem_mode = true; });
  bad([](OptimizerConfig& c) { c.algo = Algorithm::kGd, c.theorem_mode = true, c.eta = 5.0; });
  bad([](OptimizerConfig& c) { c.algo = Algorithm::kGd, c.output = OutputMode::kUniformIterate; });
}

TEST(ResolveConfig, TheoremModeDerivesSteps) {
  const Problem p = ridge(10, 4);
  const double L = p.smoothness().L;
  OptimizerConfig c;
  c.theorem_mode = true;
  c.m = 4;
  c.b = 2;
  c.T = 10;
  c.algo = Algorithm::kSarah;
  EXPECT_EQ(resolve_config(p, c).eta, eta_max_nonconvex(L, 4, 2, 10));
  c.algo = Algorithm::kSarahPlusPlus;
  EXPECT_EQ(resolve_config(p, c).eta, kDefaultGamma / L);
  EXPECT_EQ(resolve_config(p, c).gamma, kDefaultGamma);
  c.algo = Algorithm::kGd;
  EXPECT_EQ(resolve_config(p, c).eta, 1.0 / L);
  c.algo = Algorithm::kSarahAdaptive;
  EXPECT_EQ(resolve_config(p, c).eta, 1.0 / L);
  // gamma / L itself is accepted.
  c.algo = Algorithm::kSarahPlusPlus;
  c.gamma = 0.3;
  c.eta = 0.3 / L;
  EXPECT_NO_THROW(resolve_config(p, c));
}

TEST(ResolveConfig, PlusPlusGammaDefaultsToLEta) {
  const Problem p = ridge(10, 4);
  OptimizerConfig c = base(Algorithm::kSarahPlusPlus, 0.25 / p.smoothness().L);
  c.T = 5;
  EXPECT_NEAR(resolve_config(p, c).gamma, 0.25, 1e-15);
  c.eta = 3.0 / p.smoothness().L;
  EXPECT_EQ(resolve_config(p, c).gamma, 1.0);
}

TEST(Primitives, EstimatorChecksBatch) {
  const Problem p = ridge(5, 4);
  InnerLoopState st = start_inner_loop(DenseVector(4), p.full_grad(DenseVector(4)));
  take_step(st, 0.1);
  const std::vector<std::size_t> dup{1, 1};
  EXPECT_THROW(update_estimator(p, st, dup), ConfigError);
  EXPECT_THROW(update_estimator(p, st, std::vector<std::size_t>{}), ConfigError);
  EXPECT_THROW(update_estimator(p, st, std::vector<std::size_t>{5}), IndexError);
  EXPECT_EQ(st.t, 1u);
}

TEST(Primitives, ScriptedSamplerExhausts) {
  ScriptedSampler s(std::vector<std::vector<std::size_t>>{{0}});
  EXPECT_EQ(s.next_batch(3, 1), std::vector<std::size_t>{0});
  EXPECT_THROW(s.next_batch(3, 1), ConfigError);
  ScriptedSampler wrong(std::vector<std::vector<std::size_t>>{{0, 1}});
  EXPECT_THROW(wrong.next_batch(3, 1), ConfigError);
}

}  // namespace
