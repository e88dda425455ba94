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

#ifndef HUBERDP_EXPERIMENTS_H_
#define HUBERDP_EXPERIMENTS_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "absl/status/statusor.h"
#include "huberdp/dataset.h"
#include "huberdp/distributions.h"
#include "huberdp/sensitivity.h"

namespace huberdp {

enum class Method { kHlm, kWme };
std::string_view MethodName(Method method);
absl::StatusOr<Method> ParseMethod(std::string_view name);

// n shards of m i.i.d. draws each.
absl::StatusOr<UserDataset> GenBalanced(const DistributionSpec& dist, size_t n,
                                        size_t m, uint64_t seed);

// m_i = s_i - s_{i-1} with s_i = ceil(N (i/n)^gamma). Zero sizes (small i,
// large gamma) are raised to one and the surplus is taken from the largest
// users, so the result still sums to N and stays nondecreasing.
absl::StatusOr<std::vector<size_t>> ImbalancedSizes(size_t n, size_t total,
                                                    double gamma);

absl::StatusOr<UserDataset> GenImbalanced(const DistributionSpec& dist,
                                          size_t n, size_t total, double gamma,
                                          uint64_t seed);

struct BalancedSizes {
  size_t m = 1;
};
struct PowerLawSizes {
  size_t total = 1;
  double gamma = 1.0;
};
using SizeSpec = std::variant<BalancedSizes, PowerLawSizes>;

struct ExperimentSpec {
  DistributionSpec distribution;
  size_t n = 100;
  SizeSpec sizes = BalancedSizes{};
  Method method = Method::kHlm;
  size_t trials = 10;
  uint64_t seed = 0;
  double epsilon = 1.0;
  double delta = 1e-5;
  // Zero means DefaultRadius(distribution). Also the WME histogram range.
  double radius = 0.0;
  DeltaMethod delta_method = DeltaMethod::kGreedy;
  // The tuned hyperparameter: the threshold scale A (T = A / sqrt(m)) for
  // HLM, tau for WME. Unset HLM falls back to the regime rule; unset WME
  // uses a variance-based tau.
  std::optional<double> param;
  std::vector<double> tuning_grid;
};

// Value of the size spec as it appears in the results table: m or gamma.
double SizeAxisValue(const SizeSpec& sizes);

// Trial t draws its dataset from DeriveSeed(seed, 0, t) and its noise from
// DeriveSeed(seed, 1, t), so both methods see the same data for equal seeds.
absl::StatusOr<UserDataset> TrialDataset(const ExperimentSpec& spec,
                                         size_t trial);

// Squared error |output - true mean|^2 of one run on `dataset`.
absl::StatusOr<double> TrialError(const ExperimentSpec& spec,
                                  const UserDataset& dataset,
                                  std::optional<double> param,
                                  uint64_t noise_seed);

struct TrialStats {
  double mse_mean = 0.0;
  double mse_stderr = 0.0;
  double mse_median = 0.0;
  std::vector<double> errors;
};

TrialStats Summarize(std::vector<double> errors);

absl::StatusOr<TrialStats> RunTrials(const ExperimentSpec& spec);

struct TuneResult {
  double best = 0.0;
  TrialStats best_stats;
  // (grid value, stats) in grid order.
  std::vector<std::pair<double, TrialStats>> table;
};

// Runs every grid value on the same trial datasets and returns the value
// with the smallest mean squared error (ties: the smaller value).
absl::StatusOr<TuneResult> TuneHyperparameter(const ExperimentSpec& spec,
                                              std::span<const double> grid);

struct SweepRow {
  std::string method;
  std::string dist;
  size_t d = 1;
  size_t n = 0;
  double m_or_gamma = 0.0;
  size_t trials = 0;
  double mse_mean = 0.0;
  double mse_stderr = 0.0;
  std::optional<double> tuned_param;
  // Empty on success; a failed cell keeps NaN statistics.
  std::string error;
};

// One row per spec. Specs with a tuning grid are tuned first. A failing cell
// is recorded and the sweep continues.
std::vector<SweepRow> MseSweep(std::span<const ExperimentSpec> specs);

}  // namespace huberdp

#endif  // HUBERDP_EXPERIMENTS_H_
