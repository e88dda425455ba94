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

#include <vector>

#include "benchmark/benchmark.h"
#include "huberdp/dataset.h"
#include "huberdp/distributions.h"
#include "huberdp/experiments.h"
#include "huberdp/huber.h"
#include "huberdp/mechanism.h"
#include "huberdp/random.h"
#include "huberdp/sensitivity.h"
#include "huberdp/wme.h"

namespace huberdp {
namespace {

std::vector<Vector> GaussianMeans(size_t n, size_t d, uint64_t seed) {
  CounterRng rng(seed);
  std::vector<Vector> means(n, Vector(d));
  for (Vector& y : means) {
    for (double& v : y) v = SampleGaussian(rng, 1.0);
  }
  return means;
}

std::vector<UserSummary> Summaries(const std::vector<Vector>& means,
                                   double threshold) {
  std::vector<UserSummary> out;
  for (const Vector& y : means) {
    out.push_back({y, 1, 1.0 / static_cast<double>(means.size()), threshold});
  }
  return out;
}

// Small threshold relative to the spread, so the solver needs many steps.
void BM_Weiszfeld(benchmark::State& state) {
  const auto users = Summaries(GaussianMeans(state.range(0), 4, 1), 0.5);
  const HuberConfig cfg = HuberConfig::ForSummaries(users);
  for (auto _ : state) {
    benchmark::DoNotOptimize(WeiszfeldMinimize(users, cfg));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Weiszfeld)->RangeMultiplier(4)->Range(64, 16384)->Complexity();

void BM_DeltaGreedy(benchmark::State& state) {
  auto means = GaussianMeans(state.range(0), 2, 2);
  // A few far outliers for the greedy loop to peel off.
  for (size_t i = 0; i < means.size() / 50; ++i) means[i] = {50.0, 50.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(DeltaGreedy(means, 8.0, means.size() / 4));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_DeltaGreedy)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

void BM_DeltaExact(benchmark::State& state) {
  auto means = GaussianMeans(state.range(0), 1, 3);
  means[0] = {40.0};
  means[1] = {-40.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(DeltaExact(means, 8.0, 3));
  }
}
BENCHMARK(BM_DeltaExact)->DenseRange(8, 20, 4);

void BM_EstimateBalanced(benchmark::State& state) {
  const DistributionSpec dist = *ParseDistribution("uniform", 2);
  const UserDataset ds = *GenBalanced(dist, state.range(0), 20, 4);
  EstimatorConfig cfg;
  cfg.privacy = *MakePrivacyParams(1.0, 1e-5, 2);
  cfg.regime = BoundedRegime{SupportBound(dist)};
  cfg.seed = 5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(Estimate(ds, cfg));
  }
}
BENCHMARK(BM_EstimateBalanced)->Arg(1000)->Arg(10000);

void BM_EstimateImbalanced(benchmark::State& state) {
  const DistributionSpec dist = *ParseDistribution("uniform", 1);
  const UserDataset ds =
      *GenImbalanced(dist, state.range(0), 50 * state.range(0), 2.0, 6);
  EstimatorConfig cfg;
  cfg.privacy = *MakePrivacyParams(1.0, 1e-5, 1);
  cfg.mode = EstimatorMode::kImbalanced;
  cfg.threshold_scale = 1.0;
  cfg.seed = 7;
  for (auto _ : state) {
    benchmark::DoNotOptimize(Estimate(ds, cfg));
  }
}
BENCHMARK(BM_EstimateImbalanced)->Arg(1000)->Arg(10000);

void BM_Wme(benchmark::State& state) {
  const DistributionSpec dist = *ParseDistribution("lomax:4", 1);
  const UserDataset ds = *GenBalanced(dist, state.range(0), 20, 8);
  WmeConfig cfg;
  cfg.privacy = *MakePrivacyParams(1.0, 1e-5, 1);
  cfg.tau = 0.05;
  cfg.range = DefaultRadius(dist);
  cfg.seed = 9;
  for (auto _ : state) {
    benchmark::DoNotOptimize(WmeEstimate(ds, cfg));
  }
}
BENCHMARK(BM_Wme)->Arg(1000)->Arg(10000);

}  // namespace
}  // namespace huberdp

BENCHMARK_MAIN();
