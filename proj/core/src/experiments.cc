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

#include "huberdp/experiments.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

#include "absl/strings/str_cat.h"
#include "huberdp/mechanism.h"
#include "huberdp/random.h"
#include "huberdp/status_macros.h"
#include "huberdp/wme.h"

namespace huberdp {
namespace {

// Seed streams within a trial.
constexpr uint64_t kDataStream = 0;
constexpr uint64_t kNoiseStream = 1;

absl::StatusOr<UserDataset> GenerateWithSizes(const DistributionSpec& dist,
                                              std::span<const size_t> sizes,
                                              uint64_t seed) {
  CounterRng rng(seed);
  std::vector<std::vector<Vector>> shards(sizes.size());
  for (size_t i = 0; i < sizes.size(); ++i) {
    shards[i].reserve(sizes[i]);
    for (size_t j = 0; j < sizes[i]; ++j) shards[i].push_back(Sample(dist, rng));
  }
  return UserDataset::Create({}, std::move(shards));
}

// ceil(x), treating values within rounding noise of an integer as that
// integer.
double RobustCeil(double x) {
  const double r = std::round(x);
  if (std::abs(x - r) <= 1e-9 * std::max(1.0, std::abs(x))) return r;
  return std::ceil(x);
}

EstimatorConfig HlmConfig(const ExperimentSpec& spec, const PrivacyParams& p,
                          double radius, std::optional<double> param,
                          uint64_t noise_seed) {
  EstimatorConfig config;
  config.privacy = p;
  config.radius = radius;
  const DistributionSpec& dist = spec.distribution;
  if (IsBounded(dist)) {
    config.regime = BoundedRegime{radius};
  } else {
    // Second moments always exist for the supported laws.
    const double mu = CoordinateMean(dist);
    const double second =
        static_cast<double>(dist.dim) * (CoordinateVariance(dist) + mu * mu);
    config.regime = HeavyTailRegime{radius, 2.0, second};
  }
  config.mode = std::holds_alternative<BalancedSizes>(spec.sizes)
                    ? EstimatorMode::kBalanced
                    : EstimatorMode::kImbalanced;
  config.seed = noise_seed;
  config.threshold_scale = param;
  config.delta_method = spec.delta_method;
  return config;
}

// Without tuning, tau covers the user-mean spread with a union bound over
// users: sqrt(2 var ln(2n) / m_avg).
double DefaultTau(const ExperimentSpec& spec, const UserDataset& dataset) {
  const double n = static_cast<double>(dataset.num_users());
  const double m_avg = static_cast<double>(dataset.total_samples()) / n;
  const double var = CoordinateVariance(spec.distribution);
  const double tau = std::sqrt(2.0 * var * std::log(2.0 * n) / m_avg);
  return tau > 0.0 ? tau : 1e-3;
}

}  // namespace

std::string_view MethodName(Method method) {
  return method == Method::kHlm ? "hlm" : "wme";
}

absl::StatusOr<Method> ParseMethod(std::string_view name) {
  if (name == "hlm") return Method::kHlm;
  if (name == "wme") return Method::kWme;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown method '", std::string(name), "'"));
}

absl::StatusOr<UserDataset> GenBalanced(const DistributionSpec& dist, size_t n,
                                        size_t m, uint64_t seed) {
  if (n < 1 || m < 1) {
    return absl::InvalidArgumentError("n and m must be at least 1");
  }
  const std::vector<size_t> sizes(n, m);
  return GenerateWithSizes(dist, sizes, seed);
}

absl::StatusOr<std::vector<size_t>> ImbalancedSizes(size_t n, size_t total,
                                                    double gamma) {
  if (n < 1) return absl::InvalidArgumentError("n must be at least 1");
  if (total < n) {
    return absl::InvalidArgumentError(absl::StrCat(
        "N = ", total, " cannot give each of n = ", n, " users a sample"));
  }
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    return absl::InvalidArgumentError("gamma must be positive");
  }
  const double nd = static_cast<double>(n);
  const double td = static_cast<double>(total);
  std::vector<size_t> sizes(n);
  size_t prev = 0;
  size_t surplus = 0;
  for (size_t i = 1; i <= n; ++i) {
    const size_t s =
        i == n ? total
               : static_cast<size_t>(RobustCeil(
                     td * std::pow(static_cast<double>(i) / nd, gamma)));
    size_t m = s - std::min(s, prev);
    prev = std::max(prev, s);
    if (m == 0) {
      m = 1;
      ++surplus;
    }
    sizes[i - 1] = m;
  }
  // Ceiling differences can dip by one; order users by size.
  std::sort(sizes.begin(), sizes.end());
  while (surplus > 0) {
    // Decrementing the first maximal entry keeps the vector sorted.
    --*std::lower_bound(sizes.begin(), sizes.end(), sizes.back());
    --surplus;
  }
  return sizes;
}

absl::StatusOr<UserDataset> GenImbalanced(const DistributionSpec& dist,
                                          size_t n, size_t total, double gamma,
                                          uint64_t seed) {
  HUBERDP_ASSIGN_OR_RETURN(const std::vector<size_t> sizes,
                           ImbalancedSizes(n, total, gamma));
  return GenerateWithSizes(dist, sizes, seed);
}

double SizeAxisValue(const SizeSpec& sizes) {
  if (const auto* b = std::get_if<BalancedSizes>(&sizes)) {
    return static_cast<double>(b->m);
  }
  return std::get<PowerLawSizes>(sizes).gamma;
}

absl::StatusOr<UserDataset> TrialDataset(const ExperimentSpec& spec,
                                         size_t trial) {
  const uint64_t seed = DeriveSeed(spec.seed, kDataStream, trial);
  if (const auto* b = std::get_if<BalancedSizes>(&spec.sizes)) {
    return GenBalanced(spec.distribution, spec.n, b->m, seed);
  }
  const auto& p = std::get<PowerLawSizes>(spec.sizes);
  return GenImbalanced(spec.distribution, spec.n, p.total, p.gamma, seed);
}

absl::StatusOr<double> TrialError(const ExperimentSpec& spec,
                                  const UserDataset& dataset,
                                  std::optional<double> param,
                                  uint64_t noise_seed) {
  HUBERDP_ASSIGN_OR_RETURN(
      const PrivacyParams privacy,
      MakePrivacyParams(spec.epsilon, spec.delta, dataset.dim()));
  const double radius =
      spec.radius > 0.0 ? spec.radius : DefaultRadius(spec.distribution);
  EstimationResult result;
  if (spec.method == Method::kHlm) {
    HUBERDP_ASSIGN_OR_RETURN(
        result, Estimate(dataset, HlmConfig(spec, privacy, radius, param,
                                            noise_seed)));
  } else {
    WmeConfig config;
    config.privacy = privacy;
    config.tau = param.has_value() ? *param : DefaultTau(spec, dataset);
    config.range = radius;
    config.seed = noise_seed;
    HUBERDP_ASSIGN_OR_RETURN(result, WmeEstimate(dataset, config));
  }
  const Vector truth = TrueMean(spec.distribution);
  const double err = Distance(result.output, truth);
  return err * err;
}

TrialStats Summarize(std::vector<double> errors) {
  TrialStats stats;
  const size_t t = errors.size();
  if (t == 0) {
    stats.mse_mean = stats.mse_stderr = stats.mse_median =
        std::numeric_limits<double>::quiet_NaN();
    return stats;
  }
  stats.mse_mean = std::accumulate(errors.begin(), errors.end(), 0.0) /
                   static_cast<double>(t);
  if (t > 1) {
    double ss = 0.0;
    for (double e : errors) ss += (e - stats.mse_mean) * (e - stats.mse_mean);
    stats.mse_stderr = std::sqrt(ss / static_cast<double>(t - 1)) /
                       std::sqrt(static_cast<double>(t));
  }
  std::vector<double> sorted = errors;
  std::sort(sorted.begin(), sorted.end());
  stats.mse_median = t % 2 == 1
                         ? sorted[t / 2]
                         : 0.5 * (sorted[t / 2 - 1] + sorted[t / 2]);
  stats.errors = std::move(errors);
  return stats;
}

absl::StatusOr<TrialStats> RunTrials(const ExperimentSpec& spec) {
  if (spec.trials < 1) return absl::InvalidArgumentError("trials must be >= 1");
  std::vector<double> errors;
  errors.reserve(spec.trials);
  for (size_t t = 0; t < spec.trials; ++t) {
    HUBERDP_ASSIGN_OR_RETURN(const UserDataset dataset, TrialDataset(spec, t));
    HUBERDP_ASSIGN_OR_RETURN(
        const double err,
        TrialError(spec, dataset, spec.param,
                   DeriveSeed(spec.seed, kNoiseStream, t)));
    errors.push_back(err);
  }
  return Summarize(std::move(errors));
}

absl::StatusOr<TuneResult> TuneHyperparameter(const ExperimentSpec& spec,
                                              std::span<const double> grid) {
  if (grid.empty()) return absl::InvalidArgumentError("empty tuning grid");
  if (spec.trials < 1) return absl::InvalidArgumentError("trials must be >= 1");
  std::vector<std::vector<double>> errors(grid.size());
  for (size_t t = 0; t < spec.trials; ++t) {
    HUBERDP_ASSIGN_OR_RETURN(const UserDataset dataset, TrialDataset(spec, t));
    const uint64_t noise_seed = DeriveSeed(spec.seed, kNoiseStream, t);
    for (size_t g = 0; g < grid.size(); ++g) {
      HUBERDP_ASSIGN_OR_RETURN(const double err,
                               TrialError(spec, dataset, grid[g], noise_seed));
      errors[g].push_back(err);
    }
  }
  TuneResult result;
  size_t best = 0;
  for (size_t g = 0; g < grid.size(); ++g) {
    result.table.emplace_back(grid[g], Summarize(std::move(errors[g])));
    const double mse = result.table[g].second.mse_mean;
    const double best_mse = result.table[best].second.mse_mean;
    if (mse < best_mse || (mse == best_mse && grid[g] < grid[best])) best = g;
  }
  result.best = grid[best];
  result.best_stats = result.table[best].second;
  return result;
}

std::vector<SweepRow> MseSweep(std::span<const ExperimentSpec> specs) {
  std::vector<SweepRow> rows;
  rows.reserve(specs.size());
  for (const ExperimentSpec& spec : specs) {
    SweepRow row;
    row.method = std::string(MethodName(spec.method));
    row.dist = DistributionName(spec.distribution);
    row.d = spec.distribution.dim;
    row.n = spec.n;
    row.m_or_gamma = SizeAxisValue(spec.sizes);
    row.trials = spec.trials;
    absl::StatusOr<TrialStats> stats;
    if (!spec.tuning_grid.empty()) {
      absl::StatusOr<TuneResult> tuned =
          TuneHyperparameter(spec, spec.tuning_grid);
      if (tuned.ok()) {
        row.tuned_param = tuned->best;
        stats = std::move(tuned->best_stats);
      } else {
        stats = tuned.status();
      }
    } else {
      row.tuned_param = spec.param;
      stats = RunTrials(spec);
    }
    if (stats.ok()) {
      row.mse_mean = stats->mse_mean;
      row.mse_stderr = stats->mse_stderr;
    } else {
      row.mse_mean = row.mse_stderr = std::numeric_limits<double>::quiet_NaN();
      row.error = std::string(stats.status().message());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace huberdp
