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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails. Every tolerance and budget is pinned below.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "absl/strings/str_format.h"
#include "huberdp/dataset.h"
#include "huberdp/distributions.h"
#include "huberdp/experiments.h"
#include "huberdp/huber.h"
#include "huberdp/mechanism.h"
#include "huberdp/random.h"
#include "huberdp/report.h"
#include "huberdp/sensitivity.h"
#include "test_util.h"

namespace huberdp {
namespace {

using ::huberdp::testing::ClusterWithOutliers;
using ::huberdp::testing::Uniform;
using ::huberdp::testing::UniformBall;
using ::huberdp::testing::UniformIndex;

constexpr uint64_t kSeed = 20240601;

// 1: gradient check.
constexpr int kGradCases = 1000;
constexpr double kFdStep = 1e-6;
constexpr double kJunctionShell = 1e-4;
constexpr double kGradRelTol = 1e-5;
// 2: fixed point.
constexpr int kFixedPointCases = 200;
constexpr double kFixedPointTol = 1e-9;
// 3: outlier count.
constexpr int kDeltaCases = 500;
constexpr double kDeltaAgreement = 0.90;
// 4 and 5: validity and smoothness.
constexpr int kValidityInstances = 200;
constexpr int kValidityReplacements = 50;
// Absolute slack for the approximate minimizer (tolerance 1e-10 * T).
constexpr double kValiditySlack = 1e-9;
constexpr int kSmoothPairs = 1000;
constexpr double kSmoothRelSlack = 1e-12;
constexpr double kEpsilon = 1.0;
constexpr double kDelta = 1e-5;
// 6: concentrated noise bound.
constexpr int kNoiseRuns = 100;
constexpr double kNoiseBoundFraction = 0.99;
// 7: rate.
constexpr double kSlopeLo = -1.35;
constexpr double kSlopeHi = -0.65;
// 8 and 9: tuning grids (threshold scale A for HLM, tau for WME).
const std::vector<double> kHlmGrid = {0.25, 0.5, 1, 2, 4, 8, 16};
const std::vector<double> kWmeGrid = {0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5};
constexpr size_t kTrials = 50;
constexpr double kHlmRatioMax = 3.0;
// 10: reduction.
constexpr int kReductionCases = 100;
constexpr double kReductionTol = 1e-9;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  // Zero: no runtime budget.
  double budget_seconds;
  std::function<Outcome()> run;
};

Outcome GradientCorrectness() {
  CounterRng rng(DeriveSeed(kSeed, 1, 0));
  double worst = 0.0;
  int done = 0;
  while (done < kGradCases) {
    const size_t d = UniformIndex(rng, 1, 5);
    Vector s(d), y(d);
    for (size_t j = 0; j < d; ++j) {
      s[j] = Uniform(rng, -5, 5);
      y[j] = Uniform(rng, -5, 5);
    }
    const double t = Uniform(rng, 0.1, 6);
    if (std::abs(Distance(s, y) - t) <= kJunctionShell) continue;
    const Vector g = *HuberGradient(s, y, t);
    Vector fd(d);
    for (size_t j = 0; j < d; ++j) {
      Vector up = s, down = s;
      up[j] += kFdStep;
      down[j] -= kFdStep;
      fd[j] = (*HuberLoss(up, y, t) - *HuberLoss(down, y, t)) / (2 * kFdStep);
    }
    worst = std::max(worst, Distance(fd, g) / std::max(Norm(g), 1e-300));
    ++done;
  }
  return {worst <= kGradRelTol,
          absl::StrFormat("max relative error %.3g (tol %.0e)", worst,
                          kGradRelTol)};
}

Outcome FixedPoint() {
  CounterRng rng(DeriveSeed(kSeed, 2, 0));
  double worst = 0.0;
  for (int c = 0; c < kFixedPointCases; ++c) {
    const size_t n = UniformIndex(rng, 1, 50);
    const size_t d = UniformIndex(rng, 1, 4);
    std::vector<UserSummary> users(n);
    double wsum = 0.0;
    for (UserSummary& u : users) {
      u.mean = UniformBall(rng, d, Uniform(rng, 0.1, 10));
      u.weight = Uniform(rng, 0.1, 1.0);
      wsum += u.weight;
    }
    Vector center(d, 0.0);
    for (UserSummary& u : users) {
      u.weight /= wsum;
      AddScaled(center, u.weight, u.mean);
    }
    double spread = 0.0;
    for (const UserSummary& u : users) {
      spread = std::max(spread, Distance(u.mean, center));
    }
    for (UserSummary& u : users) {
      u.threshold = spread * Uniform(rng, 1.0, 3.0) + 1e-12;
    }
    const MinimizerResult r =
        *WeiszfeldMinimize(users, HuberConfig::ForSummaries(users));
    for (size_t j = 0; j < d; ++j) {
      worst = std::max(worst, std::abs(r.point[j] - center[j]));
    }
  }
  return {worst <= kFixedPointTol,
          absl::StrFormat("max deviation from weighted mean %.3g (tol %.0e)",
                          worst, kFixedPointTol)};
}

Outcome DeltaOracle() {
  CounterRng rng(DeriveSeed(kSeed, 3, 0));
  int agree = 0, bad_witness = 0, greedy_below = 0;
  for (int c = 0; c < kDeltaCases; ++c) {
    const size_t n = UniformIndex(rng, 2, 12);
    const size_t d = UniformIndex(rng, 1, 3);
    const std::vector<Vector> means = ClusterWithOutliers(
        rng, n, d, Uniform(rng, 0.05, 0.4), 3.0, Uniform(rng, 0.0, 0.4));
    const double t = Uniform(rng, 0.5, 2.0);
    const DeltaResult exact = *DeltaExact(means, t, n - 1);
    const DeltaResult greedy = DeltaGreedy(means, t, n - 1);
    if (!exact.delta.has_value() ||
        !KeptSetConcentrated(means, exact.kept, t) ||
        exact.kept.size() != n - *exact.delta) {
      ++bad_witness;
    }
    if (greedy.delta.has_value() &&
        (!exact.delta.has_value() || *greedy.delta < *exact.delta)) {
      ++greedy_below;
    }
    if (greedy.delta == exact.delta) ++agree;
  }
  const double rate = static_cast<double>(agree) / kDeltaCases;
  return {bad_witness == 0 && greedy_below == 0 && rate >= kDeltaAgreement,
          absl::StrFormat("invalid exact witnesses %d, greedy below exact %d, "
                          "agreement %.3f (min %.2f)",
                          bad_witness, greedy_below, rate, kDeltaAgreement)};
}

struct SmallInstance {
  std::vector<Vector> means;
  double threshold;
  double radius;
  double beta;
};

SmallInstance DrawSmallInstance(CounterRng& rng) {
  SmallInstance s;
  const size_t n = UniformIndex(rng, 4, 12);
  const size_t d = UniformIndex(rng, 1, 3);
  s.radius = 1.0;
  s.means = ClusterWithOutliers(rng, n, d, Uniform(rng, 0.01, 0.3), 1.0,
                                Uniform(rng, 0.0, 0.3));
  s.threshold = Uniform(rng, 0.1, 2.0);
  s.beta = MakePrivacyParams(kEpsilon, kDelta, d)->beta;
  return s;
}

Vector ClippedMinimizer(const std::vector<Vector>& means, double threshold,
                        double radius) {
  const std::vector<UserSummary> users =
      testing::BalancedSummaries(means, threshold);
  return Clip(WeiszfeldMinimize(users, HuberConfig::ForSummaries(users))->point,
              radius);
}

Outcome SensitivityValidity() {
  CounterRng rng(DeriveSeed(kSeed, 4, 0));
  int violations = 0;
  double worst_ratio = 0.0;
  for (int c = 0; c < kValidityInstances; ++c) {
    const SmallInstance s = DrawSmallInstance(rng);
    const double sens =
        BalancedSensitivity(s.means, s.threshold, s.radius, s.beta,
                            DeltaMethod::kGreedy)
            ->smooth_sensitivity;
    const Vector base = ClippedMinimizer(s.means, s.threshold, s.radius);
    for (int r = 0; r < kValidityReplacements; ++r) {
      std::vector<Vector> other = s.means;
      other[UniformIndex(rng, 0, other.size() - 1)] =
          UniformBall(rng, other[0].size(), s.radius);
      const double change =
          Distance(base, ClippedMinimizer(other, s.threshold, s.radius));
      worst_ratio = std::max(worst_ratio, change / sens);
      if (change > sens + kValiditySlack) ++violations;
    }
  }
  return {violations == 0,
          absl::StrFormat("%d violations in %d replacements; max change / S "
                          "= %.3f",
                          violations, kValidityInstances * kValidityReplacements,
                          worst_ratio)};
}

Outcome Smoothness() {
  CounterRng rng(DeriveSeed(kSeed, 5, 0));
  int violations = 0;
  double worst = 0.0;
  for (int c = 0; c < kSmoothPairs; ++c) {
    const SmallInstance s = DrawSmallInstance(rng);
    std::vector<Vector> other = s.means;
    other[UniformIndex(rng, 0, other.size() - 1)] =
        UniformBall(rng, other[0].size(), s.radius);
    const double a = BalancedSensitivity(s.means, s.threshold, s.radius,
                                         s.beta, DeltaMethod::kExact)
                         ->smooth_sensitivity;
    const double b = BalancedSensitivity(other, s.threshold, s.radius, s.beta,
                                         DeltaMethod::kExact)
                         ->smooth_sensitivity;
    const double limit = std::exp(s.beta) * (1.0 + kSmoothRelSlack);
    worst = std::max({worst, a / b, b / a});
    if (a > limit * b || b > limit * a) ++violations;
  }
  return {violations == 0,
          absl::StrFormat("%d violating pairs of %d; max S ratio %.4f vs "
                          "e^beta <= %.4f",
                          violations, kSmoothPairs, worst,
                          std::exp(MakePrivacyParams(kEpsilon, kDelta, 1)->beta))};
}

Outcome ConcentratedNoiseBound() {
  const DistributionSpec dist = *ParseDistribution("uniform:-1:1", 1);
  int within = 0, conditions = 0;
  for (int r = 0; r < kNoiseRuns; ++r) {
    const UserDataset ds = *GenBalanced(dist, 2000, 100, DeriveSeed(kSeed, 6, r));
    EstimatorConfig config;
    config.privacy = *MakePrivacyParams(kEpsilon, kDelta, 1);
    config.regime = BoundedRegime{1.0};
    config.seed = DeriveSeed(kSeed, 60, r);
    const EstimationResult res = *Estimate(ds, config);
    const double bound = 2.0 * res.thresholds.front() / 2000.0;
    if (res.report->smooth_sensitivity <= bound) ++within;
    if (res.conditions_ok) ++conditions;
  }
  const double frac = static_cast<double>(within) / kNoiseRuns;
  return {frac >= kNoiseBoundFraction && conditions == kNoiseRuns,
          absl::StrFormat("S <= 2T/n in %.2f of runs (min %.2f); size "
                          "condition held in %d/%d",
                          frac, kNoiseBoundFraction, conditions, kNoiseRuns)};
}

Outcome MseScaling() {
  std::vector<double> xs, ys;
  std::string table;
  for (size_t m : {10, 100, 1000}) {
    ExperimentSpec spec;
    spec.distribution = *ParseDistribution("uniform:-1:1", 1);
    spec.n = 1000;
    spec.sizes = BalancedSizes{m};
    spec.trials = kTrials;
    spec.seed = DeriveSeed(kSeed, 7, m);
    const TrialStats stats = *RunTrials(spec);
    xs.push_back(std::log10(static_cast<double>(m)));
    ys.push_back(std::log10(stats.mse_mean));
    table += absl::StrFormat(" m=%d:%.3g", m, stats.mse_mean);
  }
  const double xm = (xs[0] + xs[1] + xs[2]) / 3, ym = (ys[0] + ys[1] + ys[2]) / 3;
  double sxy = 0, sxx = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - xm) * (ys[i] - ym);
    sxx += (xs[i] - xm) * (xs[i] - xm);
  }
  const double slope = sxy / sxx;
  return {slope >= kSlopeLo && slope <= kSlopeHi,
          absl::StrFormat("slope %.3f in [%.2f, %.2f];%s", slope, kSlopeLo,
                          kSlopeHi, table)};
}

// Median MSE of the mean-MSE-optimal grid value.
std::pair<TuneResult, TuneResult> TuneBoth(ExperimentSpec spec) {
  spec.method = Method::kHlm;
  TuneResult hlm = *TuneHyperparameter(spec, kHlmGrid);
  spec.method = Method::kWme;
  TuneResult wme = *TuneHyperparameter(spec, kWmeGrid);
  return {std::move(hlm), std::move(wme)};
}

Outcome HeavyTailAdvantage() {
  ExperimentSpec spec;
  spec.distribution = *ParseDistribution("lomax:4", 1);
  spec.n = 1000;
  spec.sizes = BalancedSizes{100};
  spec.trials = kTrials;
  spec.epsilon = kEpsilon;
  spec.delta = kDelta;
  spec.seed = DeriveSeed(kSeed, 8, 0);
  const auto [hlm, wme] = TuneBoth(spec);
  const double h = hlm.best_stats.mse_median, w = wme.best_stats.mse_median;
  return {h < w, absl::StrFormat("median MSE hlm %.3g (A=%g) vs wme %.3g "
                                 "(tau=%g)",
                                 h, hlm.best, w, wme.best)};
}

Outcome ImbalanceRobustness() {
  double hlm_mse[3], wme_mse[3];
  std::string detail;
  int slot = 0;
  for (double gamma : {1.0, 2.0, 4.0}) {
    ExperimentSpec spec;
    spec.distribution = *ParseDistribution("uniform:-1:1", 1);
    spec.n = 1000;
    spec.sizes = PowerLawSizes{100000, gamma};
    spec.trials = kTrials;
    spec.seed = DeriveSeed(kSeed, 9, slot);
    const auto [hlm, wme] = TuneBoth(spec);
    hlm_mse[slot] = hlm.best_stats.mse_median;
    wme_mse[slot] = wme.best_stats.mse_median;
    detail += absl::StrFormat(" gamma=%g: hlm %.3g (A=%g), wme %.3g (tau=%g);",
                              gamma, hlm_mse[slot], hlm.best, wme_mse[slot],
                              wme.best);
    ++slot;
  }
  const double hlm_ratio = hlm_mse[2] / hlm_mse[0];
  const double wme_ratio = wme_mse[2] / wme_mse[0];
  return {wme_ratio > hlm_ratio && hlm_ratio <= kHlmRatioMax,
          absl::StrFormat("ratio gamma 4/1: hlm %.2f (max %.1f), wme %.2f;%s",
                          hlm_ratio, kHlmRatioMax, wme_ratio, detail)};
}

Outcome ReductionConsistency() {
  CounterRng rng(DeriveSeed(kSeed, 10, 0));
  double worst_raw = 0.0, worst_s = 0.0;
  for (int c = 0; c < kReductionCases; ++c) {
    const size_t n = UniformIndex(rng, 8, 40);
    const size_t m = UniformIndex(rng, 1, 20);
    const size_t d = UniformIndex(rng, 1, 3);
    std::vector<std::vector<Vector>> shards(n);
    const bool heavy = Uniform(rng, 0, 1) < 0.5;
    for (auto& shard : shards) {
      for (size_t j = 0; j < m; ++j) {
        shard.push_back(UniformBall(rng, d, heavy ? 3.0 : 1.0));
      }
    }
    const UserDataset ds = *UserDataset::Create({}, std::move(shards));
    EstimatorConfig config;
    config.privacy = *MakePrivacyParams(kEpsilon, kDelta, d);
    config.regime = BoundedRegime{1.0};
    config.seed = c;
    config.threshold_scale = Uniform(rng, 0.2, 4.0);
    const EstimationResult balanced = *Estimate(ds, config);
    config.mode = EstimatorMode::kImbalanced;
    config.gamma = 1.0;
    const EstimationResult imbalanced = *Estimate(ds, config);
    for (size_t j = 0; j < d; ++j) {
      worst_raw =
          std::max(worst_raw, std::abs(balanced.raw[j] - imbalanced.raw[j]));
    }
    worst_s = std::max(worst_s,
                       std::abs(balanced.report->smooth_sensitivity -
                                imbalanced.report->smooth_sensitivity));
  }
  return {worst_raw <= kReductionTol && worst_s <= kReductionTol,
          absl::StrFormat("max |raw diff| %.3g, max |S diff| %.3g (tol %.0e)",
                          worst_raw, worst_s, kReductionTol)};
}

Outcome Determinism() {
  std::vector<ExperimentSpec> specs;
  for (const char* name : {"uniform:-1:1", "lomax:4"}) {
    for (Method method : {Method::kHlm, Method::kWme}) {
      ExperimentSpec spec;
      spec.distribution = *ParseDistribution(name, 2);
      spec.n = 200;
      spec.sizes = BalancedSizes{20};
      spec.method = method;
      spec.trials = 5;
      spec.seed = DeriveSeed(kSeed, 11, specs.size());
      spec.tuning_grid = method == Method::kHlm ? std::vector<double>{1, 4}
                                                : std::vector<double>{0.05, 0.2};
      specs.push_back(spec);
    }
  }
  std::ostringstream first, second;
  WriteCsv(MseSweep(specs), first);
  WriteCsv(MseSweep(specs), second);
  return {first.str() == second.str() && !first.str().empty(),
          absl::StrFormat("%d-byte CSV, runs %s", first.str().size(),
                          first.str() == second.str() ? "identical"
                                                      : "differ")};
}

}  // namespace
}  // namespace huberdp

int main() {
  using huberdp::Criterion;
  const std::vector<Criterion> criteria = {
      {1, "gradient correctness", 1.0, huberdp::GradientCorrectness},
      {2, "fixed-point oracle", 5.0, huberdp::FixedPoint},
      {3, "outlier-count oracle equivalence", 30.0, huberdp::DeltaOracle},
      {4, "sensitivity validity", 0.0, huberdp::SensitivityValidity},
      {5, "smoothness", 0.0, huberdp::Smoothness},
      {6, "concentrated noise bound", 0.0, huberdp::ConcentratedNoiseBound},
      {7, "MSE scaling in m", 300.0, huberdp::MseScaling},
      {8, "heavy-tail advantage", 600.0, huberdp::HeavyTailAdvantage},
      {9, "imbalance robustness", 600.0, huberdp::ImbalanceRobustness},
      {10, "balanced/imbalanced reduction", 0.0,
       huberdp::ReductionConsistency},
      {11, "determinism", 0.0, huberdp::Determinism},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    huberdp::Outcome outcome = c.run();
    const double seconds = std::chrono::duration<double>(
                               std::chrono::steady_clock::now() - start)
                               .count();
    bool pass = outcome.pass;
    std::string budget;
    if (c.budget_seconds > 0.0) {
      budget = absl::StrFormat(", budget %.0f s", c.budget_seconds);
      pass = pass && seconds <= c.budget_seconds;
    }
    if (!pass) ++failed;
    std::printf("[%s] %2d %s: %s (%.2f s%s)\n", pass ? "PASS" : "FAIL", c.id,
                c.name.c_str(), outcome.detail.c_str(), seconds,
                budget.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n",
              static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
