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

#ifndef HUBERDP_MECHANISM_H_
#define HUBERDP_MECHANISM_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "absl/status/statusor.h"
#include "huberdp/dataset.h"
#include "huberdp/huber.h"
#include "huberdp/sensitivity.h"
#include "huberdp/vector_ops.h"

namespace huberdp {

// Samples lie in B(0, R).
struct BoundedRegime {
  double bound = 1.0;
};

// |mu| <= R and E|X|^p <= M_p for some p >= 2.
struct HeavyTailRegime {
  double bound = 1.0;
  double p = 2.0;
  double moment = 1.0;
};

using Regime = std::variant<BoundedRegime, HeavyTailRegime>;

enum class EstimatorMode { kBalanced, kImbalanced };
std::string_view EstimatorModeName(EstimatorMode mode);
absl::StatusOr<EstimatorMode> ParseEstimatorMode(std::string_view name);

// Smallest admissible C_T for each regime, and the defaults 10% above them.
double MinConstantBounded();
double MinConstantHeavyTail(double p, double moment);
double DefaultConstant(const Regime& regime);

struct EstimatorConfig {
  PrivacyParams privacy;
  // Clipping radius R_c; zero means "use the regime's bound R".
  double radius = 0.0;
  Regime regime = BoundedRegime{};
  // Zero means DefaultConstant(regime).
  double c_t = 0.0;
  EstimatorMode mode = EstimatorMode::kBalanced;
  // Imbalanced mode only; unset means the dataset's imbalance degree.
  std::optional<double> gamma;
  uint64_t seed = 0;
  // When set, replaces the regime rule: T = A / sqrt(m) in balanced mode and
  // T_i = A / sqrt(m_i ^ m_c) in imbalanced mode. This is how experiments
  // tune the threshold.
  std::optional<double> threshold_scale;
  DeltaMethod delta_method = DeltaMethod::kGreedy;
  // Imbalanced mode only: replaces the default k0 = floor(n / (8 gamma)).
  // Any fixed k0 >= 1 keeps the privacy guarantee; it trades how early G
  // falls back to 2 R_c against how easily the outlier witness is found.
  std::optional<size_t> k0;
};

// T = C_T R ln(m n^3 (d+1)) / sqrt(m).
double SelectThresholdBounded(double bound, double m, double n, double d,
                              double c_t);

// T = C_T max{ sqrt(ln(3(d+1)/nu) / m),
//              2 (3m)^{1/p - 1} nu^{-1/p} ln(3(d+1)/nu) }
// with nu = sqrt(d) / (n epsilon). Fails when the logarithm is not positive.
absl::StatusOr<double> SelectThresholdHeavyTail(double m, double n, double d,
                                                double epsilon, double p,
                                                double moment, double c_t);

struct ImbalancedParams {
  // Aligned with the input sizes.
  std::vector<double> weights;
  std::vector<double> thresholds;
  double gamma = 1.0;
  double capped_size = 0.0;
  size_t k0 = 0;
};

// w_i = (m_i ^ m_c) / sum_j (m_j ^ m_c) with m_c = gamma N / n,
// T_i = C_T sqrt(R^2 ln(N n^2 (d+1)) / (m_i ^ m_c)), k0 = floor(n / (8 gamma)).
// k0 = 0 is an error: there are too few users for this gamma.
absl::StatusOr<ImbalancedParams> SelectImbalancedParams(
    std::span<const size_t> sizes, double gamma, double bound, double c_t,
    size_t dim);

// Same weights and k0, thresholds T_i = scale / sqrt(m_i ^ m_c).
absl::StatusOr<ImbalancedParams> SelectImbalancedParamsScaled(
    std::span<const size_t> sizes, double gamma, double scale);

// v * min(1, R_c / |v|).
Vector Clip(std::span<const double> v, double radius);

struct ConditionCheck {
  bool ok = true;
  std::string diagnostic;
};

// Sample-size conditions under which the accuracy guarantees apply. They
// never gate privacy, so a failure is only reported.
//   bounded:    n > (4 / beta) ln(n R_c / T)
//   heavy tail: n > 8 (1 + ln(n / 2T) / beta)
//   imbalanced: n > 8 gamma (1 + ln(N n) / (2 beta))
ConditionCheck CheckConditionsBalanced(const EstimatorConfig& config, size_t n,
                                       double threshold);
ConditionCheck CheckConditionsImbalanced(const EstimatorConfig& config,
                                         size_t n, size_t total,
                                         double gamma);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct EstimationResult {
  std::string method;
  Vector raw;
  Vector clipped;
  Vector output;
  double noise_scale = 0.0;
  double radius = 0.0;
  // One entry in balanced mode, one per user (input order) otherwise.
  std::vector<double> thresholds;
  std::optional<SensitivityReport> report;
  std::optional<MinimizerResult> solver;
  // WME only: the stage-1 interval per coordinate.
  std::vector<Interval> intervals;
  std::optional<double> gamma;
  bool conditions_ok = true;
  std::vector<std::string> diagnostics;
};

// user means -> parameters -> Huber minimizer -> smooth sensitivity -> clip
// -> Gaussian noise with per-coordinate std S / alpha drawn from the seed.
absl::StatusOr<EstimationResult> Estimate(const UserDataset& dataset,
                                          const EstimatorConfig& config);

}  // namespace huberdp

#endif  // HUBERDP_MECHANISM_H_
