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

#include "huberdp/wme.h"

#include <cmath>
#include <random>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "huberdp/distributions.h"
#include "huberdp/experiments.h"
#include "huberdp/random.h"

namespace huberdp {
namespace {

using ::testing::HasSubstr;

TEST(WmeStage1Test, NoiselessLimitCoversTheCommonValue) {
  CounterRng rng(61);
  const std::vector<double> values(50, 0.3);
  const double tau = 0.05;
  const Interval iv = *WmeStage1Interval(values, tau, -1.0, 1.0, 1e9, rng);
  EXPECT_NEAR(iv.hi - iv.lo, 4 * tau, 1e-12);
  EXPECT_LE(iv.lo, 0.3);
  EXPECT_GE(iv.hi, 0.3);
  EXPECT_LE(std::abs(0.5 * (iv.lo + iv.hi) - 0.3), tau + 1e-12);
}

TEST(WmeStage1Test, LargerClusterWins) {
  CounterRng rng(62);
  std::vector<double> values(30, -0.6);
  values.insert(values.end(), 10, 0.7);
  const Interval iv = *WmeStage1Interval(values, 0.02, -1.0, 1.0, 1e9, rng);
  EXPECT_LE(iv.lo, -0.6);
  EXPECT_GE(iv.hi, -0.6);
}

TEST(WmeStage1Test, DeterministicForFixedSeed) {
  const std::vector<double> values = {0.1, 0.2, -0.3, 0.15, 0.12};
  CounterRng a(63), b(63);
  const Interval x = *WmeStage1Interval(values, 0.05, -1, 1, 0.5, a);
  const Interval y = *WmeStage1Interval(values, 0.05, -1, 1, 0.5, b);
  EXPECT_EQ(x.lo, y.lo);
  EXPECT_EQ(x.hi, y.hi);
}

TEST(WmeStage1Test, RejectsDegenerateInputs) {
  CounterRng rng(64);
  const std::vector<double> values = {0.0};
  EXPECT_FALSE(WmeStage1Interval(values, 0.1, 1.0, 1.0, 1.0, rng).ok());
  EXPECT_FALSE(WmeStage1Interval(values, 0.0, -1.0, 1.0, 1.0, rng).ok());
  EXPECT_FALSE(WmeStage1Interval(values, 0.1, -1.0, 1.0, 0.0, rng).ok());
  EXPECT_THAT(WmeStage1Interval(values, 1e-9, -1.0, 1.0, 1.0, rng)
                  .status()
                  .message(),
              HasSubstr("bins"));
}

TEST(WmeStage2Test, NoiselessWeightedMean) {
  CounterRng rng(65);
  const std::vector<double> values = {0.1, 0.4, -0.2};
  const std::vector<size_t> sizes = {1, 2, 3};
  const WmeStage2Result r = *WmeStage2ClippedMean(
      values, sizes, Interval{-1.0, 1.0}, 1e12, 1e-5, rng);
  EXPECT_NEAR(r.clipped_mean, (0.1 + 0.8 - 0.6) / 6, 1e-15);
  EXPECT_NEAR(r.output, r.clipped_mean, 1e-9);
}

TEST(WmeStage2Test, ClipsToInterval) {
  CounterRng rng(66);
  const std::vector<double> values = {0.0, 5.0};
  const std::vector<size_t> sizes = {1, 1};
  const WmeStage2Result r = *WmeStage2ClippedMean(
      values, sizes, Interval{-1.0, 1.0}, 1e12, 1e-5, rng);
  EXPECT_NEAR(r.clipped_mean, 0.5, 1e-15);
}

TEST(WmeStage2Test, BalancedSensitivity) {
  CounterRng rng(67);
  const size_t n = 40;
  const std::vector<double> values(n, 0.0);
  const std::vector<size_t> sizes(n, 7);
  const double eps = 0.8, delta = 1e-6;
  const WmeStage2Result r = *WmeStage2ClippedMean(
      values, sizes, Interval{-0.3, 0.5}, eps, delta, rng);
  const double sensitivity = 0.8 / n;
  EXPECT_NEAR(r.noise_scale,
              sensitivity * std::sqrt(2 * std::log(1.25 / delta)) / eps,
              1e-15);
}

TEST(WmeStage2Test, DeterministicPartStaysInInterval) {
  CounterRng rng(68);
  for (int c = 0; c < 50; ++c) {
    std::vector<double> values(10);
    std::vector<size_t> sizes(10);
    for (size_t i = 0; i < 10; ++i) {
      values[i] = std::normal_distribution<double>(0.0, 3.0)(rng);
      sizes[i] = 1 + i;
    }
    const WmeStage2Result r = *WmeStage2ClippedMean(
        values, sizes, Interval{-1.0, 0.5}, 1.0, 1e-5, rng);
    EXPECT_GE(r.clipped_mean, -1.0);
    EXPECT_LE(r.clipped_mean, 0.5);
  }
}

TEST(WmeEstimateTest, ConcentratedGaussianNearSampleMean) {
  const DistributionSpec dist = *ParseDistribution("gaussian:0.2:0.5", 1);
  const UserDataset ds = *GenBalanced(dist, 500, 50, 69);
  WmeConfig cfg;
  cfg.privacy = *MakePrivacyParams(100.0, 1e-5, 1);
  cfg.tau = 0.2;
  cfg.range = 4.0;
  cfg.seed = 1;
  const EstimationResult r = *WmeEstimate(ds, cfg);
  double mean = 0.0;
  for (const auto& shard : ds.shards()) {
    for (const Vector& x : shard) mean += x[0];
  }
  mean /= static_cast<double>(ds.total_samples());
  EXPECT_NEAR(r.output[0], mean, 1e-3);
  ASSERT_EQ(r.intervals.size(), 1u);
  EXPECT_EQ(r.method, "wme");
}

TEST(WmeEstimateTest, ExactWeightedMeanInNoiselessLimit) {
  std::vector<std::vector<Vector>> shards = {
      {{0.1}}, {{0.12}, {0.14}}, {{0.11}, {0.09}, {0.1}}};
  const UserDataset ds = *UserDataset::Create({}, shards);
  WmeConfig cfg;
  cfg.privacy = *MakePrivacyParams(1e12, 1e-5, 1);
  cfg.tau = 0.1;
  cfg.seed = 2;
  const EstimationResult r = *WmeEstimate(ds, cfg);
  EXPECT_NEAR(r.output[0], (0.1 + 0.26 + 0.3) / 6, 1e-9);
}

TEST(WmeEstimateTest, LomaxClippingBiasIsDownward) {
  const DistributionSpec dist = *ParseDistribution("lomax:2.5", 1);
  WmeConfig cfg;
  cfg.privacy = *MakePrivacyParams(100.0, 1e-5, 1);
  cfg.tau = 0.05;
  cfg.range = DefaultRadius(dist);
  double bias = 0.0;
  constexpr int kReps = 20;
  for (int rep = 0; rep < kReps; ++rep) {
    cfg.seed = rep;
    const UserDataset ds = *GenBalanced(dist, 400, 4, 700 + rep);
    bias += WmeEstimate(ds, cfg)->output[0] - CoordinateMean(dist);
  }
  EXPECT_LT(bias / kReps, 0.0);
}

TEST(WmeEstimateTest, DeterministicAndCoordinatewise) {
  const DistributionSpec dist = *ParseDistribution("uniform", 3);
  const UserDataset ds = *GenBalanced(dist, 100, 5, 71);
  WmeConfig cfg;
  cfg.privacy = *MakePrivacyParams(1.0, 1e-5, 3);
  cfg.tau = 0.2;
  cfg.seed = 3;
  const EstimationResult a = *WmeEstimate(ds, cfg);
  EXPECT_EQ(a.output, WmeEstimate(ds, cfg)->output);
  EXPECT_EQ(a.intervals.size(), 3u);
}

TEST(WmeEstimateTest, RejectsBadConfig) {
  const UserDataset ds = *UserDataset::Create({}, {{{0.0}}, {{0.1}}});
  WmeConfig cfg;
  cfg.privacy = *MakePrivacyParams(1.0, 1e-5, 1);
  cfg.tau = 0.1;
  cfg.stage1_fraction = 1.0;
  EXPECT_FALSE(WmeEstimate(ds, cfg).ok());
  cfg.stage1_fraction = 0.5;
  cfg.tau = 0.0;
  EXPECT_FALSE(WmeEstimate(ds, cfg).ok());
}

}  // namespace
}  // namespace huberdp
