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

#ifndef HUBERDP_SENSITIVITY_H_
#define HUBERDP_SENSITIVITY_H_

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "huberdp/dataset.h"
#include "huberdp/vector_ops.h"

namespace huberdp {

// (epsilon, delta) together with the Gaussian smooth-sensitivity constants:
//   d = 1: alpha = eps / sqrt(ln(1/delta)),        beta = eps / (2 ln(1/delta))
//   d > 1: alpha = eps / (5 sqrt(2 ln(2/delta))),  beta = eps / (4 (d + ln(2/delta)))
// Adding N(0, (S/alpha)^2 I) to a statistic with beta-smooth sensitivity S
// gives (epsilon, delta)-DP.
struct PrivacyParams {
  double epsilon = 0.0;
  double delta = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  size_t dimension = 1;
};

absl::StatusOr<PrivacyParams> MakePrivacyParams(double epsilon, double delta,
                                                size_t dimension);

// Z(D) = max_i |y_i - ybar| with ybar the unweighted average of user means.
struct Spread {
  double z = 0.0;
  Vector mean;
};
Spread SpreadBalanced(std::span<const Vector> means);

// |y_i - ybar| against the unweighted average.
std::vector<double> ResidualsBalanced(std::span<const Vector> means);

// Z_i = |y_i - ybar_w| with ybar_w = sum_i w_i y_i.
std::vector<double> ResidualsWeighted(std::span<const UserSummary> summaries);

// h(D, k) = sum_{i > n-k} w_i (T_i + Z_i) / sum_{i <= n-k} w_i for users in
// ascending order of m_i. Requires 1 <= k <= n - 1.
absl::StatusOr<double> HStatistic(std::span<const UserSummary> sorted,
                                  std::span<const double> residuals, size_t k);

// Upper bound on the modulus of continuity after k replacements:
// (sum of the k largest w_i (T_i + Z_i)) / (1 - sum of the k largest w_i).
// Agrees with HStatistic whenever the largest-m users also carry the largest
// w_i (T_i + Z_i), and dominates it otherwise. Requires 1 <= k <= n - 1.
absl::StatusOr<double> HStatisticBound(std::span<const UserSummary> summaries,
                                       std::span<const double> residuals,
                                       size_t k);

enum class DeltaMethod { kExact, kGreedy };
std::string_view DeltaMethodName(DeltaMethod method);
absl::StatusOr<DeltaMethod> ParseDeltaMethod(std::string_view name);

// Outlier count and the users kept in its witness. Replaced users are placed
// at the kept-set (weighted) mean, which is then also the mean of the
// modified dataset.
struct DeltaResult {
  std::optional<size_t> delta;
  std::vector<size_t> kept;
};

// Exhaustive search is always allowed up to this many users; beyond it only
// when the number of candidate subsets stays small.
inline constexpr size_t kExhaustiveUserLimit = 20;
inline constexpr double kExhaustiveSubsetBudget = 5e6;

// True iff max_{i in kept} |y_i - mean(kept)| < T/2.
bool KeptSetConcentrated(std::span<const Vector> means,
                         std::span<const size_t> kept, double threshold);

// Minimum k <= k_max with a concentrated kept set of size n - k.
absl::StatusOr<DeltaResult> DeltaExact(std::span<const Vector> means,
                                       double threshold, size_t k_max);

// Removes the point farthest from the current kept mean (ties: lowest index)
// until the kept set is concentrated. Never below the exact value.
DeltaResult DeltaGreedy(std::span<const Vector> means, double threshold,
                        size_t k_max);

// Imbalanced witness condition: with replaced users at the weighted kept
// mean, HStatisticBound(D*, k0) < min_i (T_i - Z_i(D*)).
bool KeptSetConcentratedImbalanced(std::span<const UserSummary> summaries,
                                   std::span<const size_t> kept, size_t k0);

absl::StatusOr<DeltaResult> DeltaExactImbalanced(
    std::span<const UserSummary> summaries, size_t k0, size_t k_max);

// Removes the kept user with the smallest margin T_i - Z_i(D*) (ties: lowest
// index) until the imbalanced witness condition holds.
DeltaResult DeltaGreedyImbalanced(std::span<const UserSummary> summaries,
                                  size_t k0, size_t k_max);

enum class GCase { kNoOutliers, kFewOutliers, kFallback };
std::string_view GCaseName(GCase c);

struct GValue {
  double value = 0.0;
  GCase which = GCase::kFallback;
};

// Balanced case split:
//   (a) k = 0 and Z < (1 - 2/n) T:             (T + Z) / (n - 1)
//   (b) delta exists, k <= n/4 - 1 - delta:    2T / (n - k - delta)
//   (c) otherwise:                             2 R_c
GValue GBalanced(double z, std::optional<size_t> delta, double threshold,
                 double clip_radius, size_t n, size_t k);

// Imbalanced case split over users sorted ascending by m_i:
//   (a) k = 0 and h(D,1) <= min_i (T_i - Z_i):   h(D,1)
//   (b) delta exists, k <= k0 - delta - 1:
//         2 max_i (w_i T_i) / sum_{i <= n - delta - k - 1} w_i
//   (c) otherwise (including an empty denominator): 2 R_c
// h is evaluated with HStatisticBound.
GValue GImbalanced(std::span<const UserSummary> sorted,
                   std::span<const double> residuals,
                   std::optional<size_t> delta, size_t k0, double clip_radius,
                   size_t k);

struct SmoothSensitivityResult {
  double value = 0.0;
  // (k, G(D, k)) for every k visited.
  std::vector<std::pair<size_t, double>> profile;
  GCase case_at_zero = GCase::kFallback;
};

// S = max_{k = 0..n} e^{-beta k} G(D, k). Once G falls into the fallback case
// it stays there, so the scan stops at the first fallback k.
SmoothSensitivityResult SmoothSensitivity(
    const std::function<GValue(size_t)>& g, double beta, size_t n);

struct SensitivityReport {
  double z_max = 0.0;
  std::vector<double> residuals;
  std::optional<size_t> delta_hat;
  DeltaMethod delta_method = DeltaMethod::kGreedy;
  std::vector<size_t> witness;
  std::vector<std::pair<size_t, double>> g_profile;
  double smooth_sensitivity = 0.0;
  GCase case_taken = GCase::kFallback;
  bool imbalanced = false;
  size_t k0 = 0;
};

absl::StatusOr<SensitivityReport> BalancedSensitivity(
    std::span<const Vector> means, double threshold, double clip_radius,
    double beta, DeltaMethod method);

// `sorted` must be in ascending order of size with weights and thresholds set.
absl::StatusOr<SensitivityReport> ImbalancedSensitivity(
    std::span<const UserSummary> sorted, size_t k0, double clip_radius,
    double beta, DeltaMethod method);

}  // namespace huberdp

#endif  // HUBERDP_SENSITIVITY_H_
