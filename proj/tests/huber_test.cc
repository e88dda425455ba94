// Copyright 2026 The HuberDP Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "huberdp/huber.h"

#include <cmath>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "huberdp/random.h"
#include "test_util.h"

namespace huberdp {
namespace {

using ::huberdp::testing::BalancedSummaries;
using ::huberdp::testing::Uniform;
using ::huberdp::testing::UniformBall;
using ::huberdp::testing::UniformIndex;
using ::testing::DoubleNear;
using ::testing::ElementsAre;
using ::testing::HasSubstr;

TEST(HuberLossTest, ContinuousAtJunction) {
  const Vector s = {0.0, 0.0};
  const Vector y = {0.6, 0.8};
  const double inside = *HuberLoss(s, y, 1.0);
  const double outside = *HuberLoss(s, y, 1.0 - 1e-12);
  EXPECT_DOUBLE_EQ(inside, 0.5);
  EXPECT_NEAR(outside, 0.5, 1e-11);
}

TEST(HuberLossTest, ZeroAtData) {
  const Vector y = {1.5, -2.0};
  EXPECT_EQ(*HuberLoss(y, y, 0.3), 0.0);
}

TEST(HuberLossTest, LinearBranch) {
  EXPECT_DOUBLE_EQ(*HuberLoss(Vector{0.0}, Vector{3.0}, 1.0), 2.5);
}

TEST(HuberLossTest, RejectsNonPositiveThreshold) {
  EXPECT_EQ(HuberLoss(Vector{0.0}, Vector{1.0}, 0.0).status().code(),
            absl::StatusCode::kInvalidArgument);
  EXPECT_FALSE(HuberGradient(Vector{0.0}, Vector{1.0}, -1.0).ok());
}

TEST(HuberGradientTest, ZeroAtData) {
  EXPECT_THAT(*HuberGradient(Vector{2.0, 1.0}, Vector{2.0, 1.0}, 1.0),
              ElementsAre(0.0, 0.0));
}

TEST(HuberGradientTest, ClippedBranch) {
  EXPECT_THAT(*HuberGradient(Vector{0.0, 0.0}, Vector{0.0, -4.0}, 2.0),
              ElementsAre(DoubleNear(0.0, 1e-15), DoubleNear(2.0, 1e-15)));
}

TEST(HuberGradientTest, NormNeverExceedsThresholdOrDistance) {
  CounterRng rng(11);
  for (int i = 0; i < 500; ++i) {
    const size_t d = UniformIndex(rng, 1, 4);
    const Vector s = UniformBall(rng, d, 5.0);
    const Vector y = UniformBall(rng, d, 5.0);
    const double t = Uniform(rng, 0.01, 4.0);
    const double g = Norm(*HuberGradient(s, y, t));
    EXPECT_LE(g, std::min(t, Distance(s, y)) * (1 + 1e-12));
  }
}

TEST(HuberGradientTest, MatchesCentralDifferences) {
  CounterRng rng(12);
  constexpr double kStep = 1e-6;
  int checked = 0;
  while (checked < 1000) {
    const size_t d = UniformIndex(rng, 1, 4);
    const Vector s = UniformBall(rng, d, 5.0);
    const Vector y = UniformBall(rng, d, 5.0);
    const double t = Uniform(rng, 0.1, 5.0);
    if (std::abs(Distance(s, y) - t) <= 1e-4) continue;
    const Vector g = *HuberGradient(s, y, t);
    Vector fd(d);
    for (size_t j = 0; j < d; ++j) {
      Vector up = s, down = s;
      up[j] += kStep;
      down[j] -= kStep;
      fd[j] = (*HuberLoss(up, y, t) - *HuberLoss(down, y, t)) / (2 * kStep);
    }
    EXPECT_LE(Distance(fd, g), 1e-5 * Norm(g));
    ++checked;
  }
}

TEST(ObjectiveTest, SingleUserZeroAtMean) {
  const std::vector<UserSummary> users = {{{1.0, 2.0}, 3, 1.0, 0.5}};
  EXPECT_EQ(*Objective(Vector{1.0, 2.0}, users), 0.0);
}

TEST(ObjectiveTest, GradientMatchesWeightedSum) {
  const std::vector<UserSummary> users = {{{0.0}, 1, 0.25, 1.0},
                                          {{4.0}, 1, 0.75, 1.0}};
  // 0.25 * 1 (clipped) + 0.75 * (-1) (clipped).
  EXPECT_THAT(*ObjectiveGradient(Vector{2.0}, users),
              ElementsAre(DoubleNear(-0.5, 1e-15)));
}

TEST(WeiszfeldTest, ConcentratedDataConvergesToWeightedMeanInOneStep) {
  const std::vector<UserSummary> users = {{{0.0, 0.0}, 1, 0.5, 10.0},
                                          {{1.0, 1.0}, 1, 0.3, 10.0},
                                          {{-1.0, 2.0}, 1, 0.2, 10.0}};
  const MinimizerResult r =
      *WeiszfeldMinimize(users, HuberConfig::ForSummaries(users));
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.iterations, 1);
  EXPECT_THAT(r.point, ElementsAre(DoubleNear(0.1, 1e-15),
                                   DoubleNear(0.7, 1e-15)));
}

TEST(WeiszfeldTest, SingleUser) {
  const std::vector<UserSummary> users = {{{3.0, -1.0}, 5, 1.0, 0.1}};
  EXPECT_THAT(WeiszfeldMinimize(users, HuberConfig{})->point,
              ElementsAre(3.0, -1.0));
}

// Golden-section search on a convex 1-D objective.
double GoldenSectionMin(const std::vector<UserSummary>& users, double lo,
                        double hi) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  auto f = [&](double x) { return *Objective(Vector{x}, users); };
  double a = lo, b = hi;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  while (b - a > 1e-12) {
    if (f(c) < f(d)) {
      b = d;
    } else {
      a = c;
    }
    c = b - phi * (b - a);
    d = a + phi * (b - a);
  }
  return 0.5 * (a + b);
}

TEST(WeiszfeldTest, MatchesBruteForceMinimizer) {
  const std::vector<UserSummary> users = BalancedSummaries(
      {{-10.0}, {0.0}, {10.0}, {1000.0}}, 1.0);
  const double oracle = GoldenSectionMin(users, -20.0, 1010.0);
  const MinimizerResult r =
      *WeiszfeldMinimize(users, HuberConfig::ForSummaries(users));
  EXPECT_TRUE(r.converged);
  // The gradient is +1 + 1 - 1 - 1 = 0 on all of [1, 9], so the minimizer is
  // not unique; compare objective values and membership in that set.
  EXPECT_NEAR(*Objective(r.point, users), *Objective(Vector{oracle}, users),
              1e-9);
  EXPECT_GE(r.point[0], 1.0 - 1e-6);
  EXPECT_LE(r.point[0], 9.0 + 1e-6);
}

TEST(WeiszfeldTest, MatchesBruteForceOnRandomInstances) {
  CounterRng rng(13);
  for (int c = 0; c < 50; ++c) {
    const size_t n = UniformIndex(rng, 2, 15);
    std::vector<Vector> means;
    for (size_t i = 0; i < n; ++i) means.push_back({Uniform(rng, -5, 5)});
    const auto users = BalancedSummaries(means, Uniform(rng, 0.1, 3.0));
    const double oracle = GoldenSectionMin(users, -6.0, 6.0);
    const MinimizerResult r =
        *WeiszfeldMinimize(users, HuberConfig::ForSummaries(users));
    // Compare objective values: flat stretches make the argmin ill-posed.
    EXPECT_LE(*Objective(r.point, users),
              *Objective(Vector{oracle}, users) + 1e-9);
  }
}

TEST(WeiszfeldTest, ObjectiveDecreasesAlongIterates) {
  CounterRng rng(14);
  for (int c = 0; c < 20; ++c) {
    const size_t d = UniformIndex(rng, 1, 3);
    std::vector<Vector> means;
    for (int i = 0; i < 20; ++i) means.push_back(UniformBall(rng, d, 10.0));
    const auto users = BalancedSummaries(means, Uniform(rng, 0.2, 2.0));
    Vector c0 = UniformBall(rng, d, 20.0);
    double prev = *Objective(c0, users);
    for (int it = 0; it < 50; ++it) {
      c0 = WeiszfeldStep(c0, users);
      const double cur = *Objective(c0, users);
      EXPECT_LE(cur, prev + 1e-12);
      prev = cur;
    }
  }
}

TEST(WeiszfeldTest, IterateOnDataPointIsWellDefined) {
  const auto users = BalancedSummaries({{0.0}, {5.0}, {6.0}}, 1.0);
  const Vector next = WeiszfeldStep(Vector{5.0}, users);
  EXPECT_TRUE(AllFinite(next));
  HuberConfig cfg = HuberConfig::ForSummaries(users);
  cfg.init = SolverInit::kExplicit;
  cfg.start = {5.0};
  EXPECT_TRUE(WeiszfeldMinimize(users, cfg)->converged);
}

TEST(WeiszfeldTest, TranslationEquivariant) {
  CounterRng rng(15);
  for (int c = 0; c < 20; ++c) {
    const size_t d = UniformIndex(rng, 1, 3);
    std::vector<Vector> means;
    for (int i = 0; i < 12; ++i) means.push_back(UniformBall(rng, d, 5.0));
    const Vector shift = UniformBall(rng, d, 100.0);
    std::vector<Vector> moved = means;
    for (Vector& y : moved) AddScaled(y, 1.0, shift);
    const double t = Uniform(rng, 0.2, 2.0);
    const auto a = BalancedSummaries(means, t);
    const auto b = BalancedSummaries(moved, t);
    const Vector pa = WeiszfeldMinimize(a, HuberConfig::ForSummaries(a))->point;
    const Vector pb = WeiszfeldMinimize(b, HuberConfig::ForSummaries(b))->point;
    for (size_t j = 0; j < d; ++j) EXPECT_NEAR(pa[j] + shift[j], pb[j], 1e-7);
  }
}

TEST(WeiszfeldTest, OutputBeatsDataPointsAndMean) {
  CounterRng rng(16);
  for (int c = 0; c < 20; ++c) {
    std::vector<Vector> means;
    for (int i = 0; i < 15; ++i) means.push_back(UniformBall(rng, 2, 8.0));
    const auto users = BalancedSummaries(means, 1.0);
    const HuberConfig cfg = HuberConfig::ForSummaries(users);
    const MinimizerResult r = *WeiszfeldMinimize(users, cfg);
    const double best = *Objective(r.point, users);
    Vector mean(2, 0.0);
    for (const auto& u : users) AddScaled(mean, u.weight, u.mean);
    EXPECT_LE(best, *Objective(mean, users) + 1e-8);
    for (const auto& u : users) {
      EXPECT_LE(best, *Objective(u.mean, users) + 1e-8);
    }
  }
}

TEST(WeiszfeldTest, ConvergedGradientIsSmall) {
  const auto users = BalancedSummaries({{-3.0, 0.0}, {0.0, 4.0}, {9.0, 9.0}},
                                       1.5);
  const HuberConfig cfg = HuberConfig::ForSummaries(users);
  const MinimizerResult r = *WeiszfeldMinimize(users, cfg);
  ASSERT_TRUE(r.converged);
  EXPECT_LE(Norm(*ObjectiveGradient(r.point, users)), 2 * cfg.tolerance);
}

TEST(WeiszfeldTest, CoordinateMedianStartReachesSameMinimum) {
  const auto users =
      BalancedSummaries({{-1.0}, {0.0}, {0.5}, {50.0}, {51.0}}, 2.0);
  HuberConfig cfg = HuberConfig::ForSummaries(users);
  const double from_mean = WeiszfeldMinimize(users, cfg)->point[0];
  cfg.init = SolverInit::kCoordinateMedian;
  EXPECT_NEAR(WeiszfeldMinimize(users, cfg)->point[0], from_mean, 1e-7);
}

TEST(WeiszfeldTest, IterationCapReportsNonConvergence) {
  const auto users = BalancedSummaries({{0.0}, {100.0}, {1000.0}}, 1.0);
  HuberConfig cfg = HuberConfig::ForSummaries(users);
  cfg.max_iterations = 1;
  cfg.init = SolverInit::kExplicit;
  cfg.start = {-500.0};
  const MinimizerResult r = *WeiszfeldMinimize(users, cfg);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.iterations, 1);
}

TEST(WeiszfeldTest, RejectsUnnormalizedWeights) {
  const std::vector<UserSummary> users = {{{0.0}, 1, 0.5, 1.0},
                                          {{1.0}, 1, 0.6, 1.0}};
  const auto r = WeiszfeldMinimize(users, HuberConfig{});
  EXPECT_EQ(r.status().code(), absl::StatusCode::kInvalidArgument);
  EXPECT_THAT(r.status().message(), HasSubstr("sum to 1"));
}

TEST(WeiszfeldTest, RejectsEmptyInput) {
  EXPECT_FALSE(WeiszfeldMinimize({}, HuberConfig{}).ok());
}

}  // namespace
}  // namespace huberdp
