#include <gtest/gtest.h>

#include <cmath>

#include "sarah/dataset.hpp"
#include "sarah/errors.hpp"
#include "sarah/oracle.hpp"
#include "sarah/problem.hpp"
#include "sarah/rng.hpp"

using namespace sarah;

namespace {

Dataset two_rows() { return parse_libsvm_string("1 1:1 2:2\n-1 2:-1\n"); }

TEST(ProblemKind, NamesRoundTrip) {
  for (ProblemKind k : {ProblemKind::kLogisticL2, ProblemKind::kRidge,
                        ProblemKind::kLogisticNonconvex}) {
    EXPECT_EQ(parse_problem_kind(to_string(k)), k);
  }
  EXPECT_EQ(to_string(ProblemKind::kLogisticNonconvex), "logistic-nonconvex-reg");
  EXPECT_THROW(parse_problem_kind("lasso"), ConfigError);
}

TEST(Problem, LogisticAtZeroIsLog2) {
  const Problem p(two_rows(), ProblemKind::kLogisticL2, 0.3);
  EXPECT_DOUBLE_EQ(p.objective(DenseVector(2)), std::log(2.0));
  EXPECT_DOUBLE_EQ(p.component_value(1, DenseVector(2)), std::log(2.0));
}

TEST(Problem, RidgeClosedForm) {
  const Dataset ds = parse_libsvm_string("2 1:1\n-1 2:3\n", ParseOptions{LabelMode::kRaw, {}});
  const Problem p(ds, ProblemKind::kRidge, 0.5);
  const DenseVector w{1.0, 1.0};
  // f_0 = 0.5 (1 - 2)^2 + 0.25 * 2, f_1 = 0.5 (3 + 1)^2 + 0.25 * 2.
  EXPECT_DOUBLE_EQ(p.component_value(0, w), 0.5 + 0.5);
  EXPECT_DOUBLE_EQ(p.component_value(1, w), 8.0 + 0.5);
  EXPECT_EQ(p.component_grad(0, w), (DenseVector{-1.0 + 0.5, 0.5}));
  EXPECT_EQ(p.component_grad(1, w), (DenseVector{0.5, 12.0 + 0.5}));
}

TEST(Problem, NonconvexRegularizer) {
  const Problem p(two_rows(), ProblemKind::kLogisticNonconvex, 2.0);
  const DenseVector w{1.0, 0.0};
  // lambda * (1/2 + 0) on top of the logistic loss.
  const Problem plain(two_rows(), ProblemKind::kLogisticL2, 0.0);
  EXPECT_DOUBLE_EQ(p.objective(w) - plain.objective(w), 1.0);
  // d/dw [w^2 / (1 + w^2)] = 2w / (1 + w^2)^2 = 0.5 at w = 1.
  EXPECT_DOUBLE_EQ(p.full_grad(w)[0] - plain.full_grad(w)[0], 2.0 * 0.5);
}

TEST(Problem, FullGradIsMeanOfComponents) {
  const Problem p(synth_classification(30, 5, 1), ProblemKind::kLogisticL2, 0.1);
  CounterRng rng(4);
  DenseVector w(5);
  for (std::size_t j = 0; j < 5; ++j) w[j] = rng.normal();
  DenseVector mean(5);
  for (std::size_t i = 0; i < p.n(); ++i) axpy_inplace(1.0 / 30.0, p.component_grad(i, w), mean);
  const DenseVector g = p.full_grad(w);
  for (std::size_t j = 0; j < 5; ++j) EXPECT_NEAR(g[j], mean[j], 1e-14);
}

TEST(Problem, GradientsMatchFiniteDifferences) {
  CounterRng rng(77);
  for (ProblemKind kind : {ProblemKind::kLogisticL2, ProblemKind::kRidge,
                           ProblemKind::kLogisticNonconvex}) {
    const Dataset ds = kind == ProblemKind::kRidge ? synth_ridge(20, 6, 2)
                                                   : synth_classification(20, 6, 2);
    const Problem p(ds, kind, 0.3);
    for (int trial = 0; trial < 5; ++trial) {
      DenseVector w(6);
      for (std::size_t j = 0; j < 6; ++j) w[j] = 2.0 * rng.normal();
      const std::size_t i = rng.uniform_index(20);
      const DenseVector fd = finite_diff_grad(p, i, w, 1e-6);
      const DenseVector g = p.component_grad(i, w);
      EXPECT_LE(std::sqrt(dist_sq(fd, g)), 1e-5 * std::max(1.0, std::sqrt(norm_sq(g))));
      const DenseVector fd_full = finite_diff_grad(p, std::nullopt, w, 1e-6);
      EXPECT_LE(std::sqrt(dist_sq(fd_full, p.full_grad(w))), 1e-5);
    }
  }
}

TEST(Problem, StableForHugeMargins) {
  const Problem p(parse_libsvm_string("1 1:1\n"), ProblemKind::kLogisticL2, 0.0);
  EXPECT_NEAR(p.objective(DenseVector{800.0}), 0.0, 1e-300);
  EXPECT_DOUBLE_EQ(p.objective(DenseVector{-800.0}), 800.0);
  EXPECT_DOUBLE_EQ(p.full_grad(DenseVector{-800.0})[0], -1.0);
}

TEST(Problem, Smoothness) {
  const Dataset ds = parse_libsvm_string("1 1:3 2:4\n-1 2:1\n");
  const auto lr = Problem(ds, ProblemKind::kLogisticL2, 0.1).smoothness();
  EXPECT_DOUBLE_EQ(lr.L, 25.0 / 4.0 + 0.1);
  EXPECT_DOUBLE_EQ(lr.mu, 0.1);
  ASSERT_TRUE(lr.kappa);
  EXPECT_DOUBLE_EQ(*lr.kappa, lr.L / 0.1);
  const auto nc = Problem(ds, ProblemKind::kLogisticNonconvex, 0.1).smoothness();
  EXPECT_DOUBLE_EQ(nc.L, 25.0 / 4.0 + 0.2);
  EXPECT_EQ(nc.mu, 0.0);
  EXPECT_FALSE(nc.kappa);
  const auto rr = Problem(ds, ProblemKind::kRidge, 0.0).smoothness();
  EXPECT_DOUBLE_EQ(rr.L, 25.0);
  EXPECT_FALSE(rr.kappa);
}

// Each component's gradient is L-Lipschitz with the reported L.
TEST(Problem, SmoothnessBoundsComponentCurvature) {
  CounterRng rng(8);
  for (ProblemKind kind : {ProblemKind::kLogisticL2, ProblemKind::kRidge,
                           ProblemKind::kLogisticNonconvex}) {
    const Dataset ds = kind == ProblemKind::kRidge ? synth_ridge(10, 3, 9)
                                                   : synth_classification(10, 3, 9);
    const Problem p(ds, kind, 0.4);
    const double L = p.smoothness().L;
    for (int trial = 0; trial < 200; ++trial) {
      DenseVector a(3), b(3);
      for (std::size_t j = 0; j < 3; ++j) a[j] = 3 * rng.normal(), b[j] = 3 * rng.normal();
      const std::size_t i = rng.uniform_index(10);
      const double lhs = dist_sq(p.component_grad(i, a), p.component_grad(i, b));
      EXPECT_LE(lhs, L * L * dist_sq(a, b) * (1 + 1e-12));
    }
  }
}

TEST(Problem, Errors) {
  EXPECT_THROW(Problem(parse_libsvm_string("3 1:1\n", ParseOptions{LabelMode::kRaw, {}}),
                       ProblemKind::kLogisticL2, 0.1),
               DataError);
  EXPECT_THROW(Problem(two_rows(), ProblemKind::kRidge, -1.0), ConfigError);
  const Problem p(two_rows(), ProblemKind::kRidge, 0.1);
  EXPECT_THROW(p.component_grad(2, DenseVector(2)), IndexError);
  EXPECT_THROW(p.full_grad(DenseVector(3)), DimensionError);
}

}  // namespace
