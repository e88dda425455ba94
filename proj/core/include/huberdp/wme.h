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

#ifndef HUBERDP_WME_H_
#define HUBERDP_WME_H_

#include <cstddef>
#include <cstdint>
#include <span>

#include "absl/status/statusor.h"
#include "huberdp/dataset.h"
#include "huberdp/mechanism.h"
#include "huberdp/random.h"
#include "huberdp/sensitivity.h"

namespace huberdp {

// Two-stage winsorized mean estimator: a private histogram locates an
// interval of width 4 tau, then clipped user means are averaged with
// Gaussian noise. Runs coordinate-wise when d > 1, splitting each stage's
// budget evenly across coordinates.
struct WmeConfig {
  PrivacyParams privacy;
  // Concentration radius of the user means.
  double tau = 0.0;
  // Fraction of epsilon spent on stage 1; stage 2 gets the rest. Stage 1 is
  // pure DP, so all of delta goes to stage 2.
  double stage1_fraction = 0.5;
  // The histogram covers [-range, range] in every coordinate.
  double range = 1.0;
  uint64_t seed = 0;
};

// Bins of width 2 tau tile [lo, hi] (values outside are counted in the end
// bins). Each count gets Laplace noise of scale 2 / epsilon1, since replacing
// one user moves one unit between two bins. Returns the width-4 tau interval
// centred on the midpoint of the bin with the largest noisy count.
absl::StatusOr<Interval> WmeStage1Interval(std::span<const double> values,
                                           double tau, double lo, double hi,
                                           double epsilon1, CounterRng& rng);

struct WmeStage2Result {
  // sum_i m_i clip(y_i, [a, b]) / N.
  double clipped_mean = 0.0;
  double output = 0.0;
  double noise_scale = 0.0;
};

// Sensitivity max_i(m_i) (b - a) / N; noise std
// sensitivity * sqrt(2 ln(1.25 / delta2)) / epsilon2.
absl::StatusOr<WmeStage2Result> WmeStage2ClippedMean(
    std::span<const double> values, std::span<const size_t> sizes,
    Interval interval, double epsilon2, double delta2, CounterRng& rng);

absl::StatusOr<EstimationResult> WmeEstimate(const UserDataset& dataset,
                                             const WmeConfig& config);

}  // namespace huberdp

#endif  // HUBERDP_WME_H_
