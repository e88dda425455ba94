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

#ifndef HUBERDP_HUBER_H_
#define HUBERDP_HUBER_H_

#include <cstdint>
#include <span>

#include "absl/status/statusor.h"
#include "huberdp/dataset.h"
#include "huberdp/vector_ops.h"

namespace huberdp {

// Huber loss with connecting point T:
//   0.5 * |s - y|^2          if |s - y| <= T
//   T * |s - y| - 0.5 * T^2  otherwise.
absl::StatusOr<double> HuberLoss(std::span<const double> s,
                                 std::span<const double> y, double threshold);

// Gradient in s. Its norm never exceeds min(T, |s - y|).
absl::StatusOr<Vector> HuberGradient(std::span<const double> s,
                                     std::span<const double> y,
                                     double threshold);

// sum_i w_i * HuberLoss(s, y_i, T_i).
absl::StatusOr<double> Objective(std::span<const double> s,
                                 std::span<const UserSummary> summaries);

// sum_i w_i * HuberGradient(s, y_i, T_i).
absl::StatusOr<Vector> ObjectiveGradient(std::span<const double> s,
                                         std::span<const UserSummary> summaries);

enum class SolverInit {
  kWeightedMean,
  kCoordinateMedian,
  kExplicit,
};

struct HuberConfig {
  // Absolute stopping tolerance on |c_{k+1} - c_k|.
  double tolerance = 1e-10;
  int64_t max_iterations = 1'000'000;
  SolverInit init = SolverInit::kWeightedMean;
  // Starting point when init == kExplicit.
  Vector start;

  // tolerance = 1e-10 * max_i T_i, iteration cap 10^6.
  static HuberConfig ForSummaries(std::span<const UserSummary> summaries);
};

struct MinimizerResult {
  Vector point;
  int64_t iterations = 0;
  double final_step_norm = 0.0;
  bool converged = false;
};

// One reweighting step
//   c' = sum_i a_i y_i / sum_i a_i,  a_i = w_i * min(1, T_i / |c - y_i|).
// A user sitting exactly on c gets a_i = w_i, so there is no singularity.
// Note that grad F(c) = (sum_i a_i) * (c - c'), so |grad F(c)| <= |c - c'|.
Vector WeiszfeldStep(std::span<const double> c,
                     std::span<const UserSummary> summaries);

// Minimizes the weighted Huber objective by iterating WeiszfeldStep until the
// step norm falls below cfg.tolerance. Because grad F is 1-Lipschitz when the
// weights sum to one, a converged result has |grad F(point)| <= 2 * tolerance.
// Hitting max_iterations returns the last iterate with converged = false.
absl::StatusOr<MinimizerResult> WeiszfeldMinimize(
    std::span<const UserSummary> summaries, const HuberConfig& cfg);

// Validates what WeiszfeldMinimize needs: nonempty, consistent dimension,
// positive thresholds, nonnegative weights summing to one within 1e-9.
absl::Status ValidateSummaries(std::span<const UserSummary> summaries);

}  // namespace huberdp

#endif  // HUBERDP_HUBER_H_
