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

#include <algorithm>
#include <cmath>
#include <vector>

#include "absl/strings/str_cat.h"
#include "huberdp/status_macros.h"

namespace huberdp {
namespace {

// Guards against tau so small that the histogram cannot be allocated.
constexpr double kMaxBins = 1e7;

}  // namespace

absl::StatusOr<Interval> WmeStage1Interval(std::span<const double> values,
                                           double tau, double lo, double hi,
                                           double epsilon1, CounterRng& rng) {
  if (!(tau > 0.0)) return absl::InvalidArgumentError("tau must be positive");
  if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
    return absl::InvalidArgumentError(
        absl::StrCat("degenerate histogram range [", lo, ", ", hi, "]"));
  }
  if (!(epsilon1 > 0.0)) {
    return absl::InvalidArgumentError("stage-1 epsilon must be positive");
  }
  const double width = 2.0 * tau;
  const double bins_real = std::ceil((hi - lo) / width);
  if (bins_real > kMaxBins) {
    return absl::InvalidArgumentError(absl::StrCat(
        "tau = ", tau, " needs ", bins_real, " histogram bins; increase tau"));
  }
  const size_t bins = std::max<size_t>(1, static_cast<size_t>(bins_real));
  std::vector<double> counts(bins, 0.0);
  for (double v : values) {
    const double pos = std::floor((v - lo) / width);
    const size_t b = pos <= 0.0 ? 0
                                : std::min(bins - 1, static_cast<size_t>(pos));
    counts[b] += 1.0;
  }
  for (double& c : counts) c += SampleLaplace(rng, 2.0 / epsilon1);
  const size_t best = static_cast<size_t>(
      std::max_element(counts.begin(), counts.end()) - counts.begin());
  const double mid = lo + (static_cast<double>(best) + 0.5) * width;
  return Interval{mid - 2.0 * tau, mid + 2.0 * tau};
}

absl::StatusOr<WmeStage2Result> WmeStage2ClippedMean(
    std::span<const double> values, std::span<const size_t> sizes,
    Interval interval, double epsilon2, double delta2, CounterRng& rng) {
  if (values.size() != sizes.size() || values.empty()) {
    return absl::InvalidArgumentError("values and sizes must align");
  }
  if (!(epsilon2 > 0.0) || !(delta2 > 0.0 && delta2 < 1.0)) {
    return absl::InvalidArgumentError("invalid stage-2 privacy budget");
  }
  if (!(interval.hi >= interval.lo)) {
    return absl::InvalidArgumentError("empty interval");
  }
  double total = 0.0;
  double m_max = 0.0;
  double acc = 0.0;
  for (size_t i = 0; i < values.size(); ++i) {
    const double m = static_cast<double>(sizes[i]);
    total += m;
    m_max = std::max(m_max, m);
    acc += m * std::clamp(values[i], interval.lo, interval.hi);
  }
  WmeStage2Result out;
  out.clipped_mean = acc / total;
  const double sensitivity = m_max * (interval.hi - interval.lo) / total;
  out.noise_scale =
      sensitivity * std::sqrt(2.0 * std::log(1.25 / delta2)) / epsilon2;
  out.output = out.clipped_mean + SampleGaussian(rng, out.noise_scale);
  return out;
}

absl::StatusOr<EstimationResult> WmeEstimate(const UserDataset& dataset,
                                             const WmeConfig& config) {
  const PrivacyParams& privacy = config.privacy;
  if (privacy.dimension != dataset.dim()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "dimension error: privacy parameters are for d = ", privacy.dimension,
        " but the dataset has d = ", dataset.dim()));
  }
  if (!(config.stage1_fraction > 0.0 && config.stage1_fraction < 1.0)) {
    return absl::InvalidArgumentError("stage-1 fraction must lie in (0, 1)");
  }
  if (!(config.range > 0.0)) {
    return absl::InvalidArgumentError("histogram range must be positive");
  }
  const double dims = static_cast<double>(dataset.dim());
  const double epsilon1 = privacy.epsilon * config.stage1_fraction / dims;
  const double epsilon2 =
      privacy.epsilon * (1.0 - config.stage1_fraction) / dims;
  const double delta2 = privacy.delta / dims;

  const std::vector<UserSummary> summaries = UserMeans(dataset);
  const std::vector<size_t> sizes = dataset.sizes();
  CounterRng rng(config.seed);
  EstimationResult result;
  result.method = "wme";
  result.radius = config.range;
  std::vector<double> values(summaries.size());
  for (size_t j = 0; j < dataset.dim(); ++j) {
    for (size_t i = 0; i < summaries.size(); ++i) {
      values[i] = summaries[i].mean[j];
    }
    HUBERDP_ASSIGN_OR_RETURN(
        const Interval interval,
        WmeStage1Interval(values, config.tau, -config.range, config.range,
                          epsilon1, rng));
    HUBERDP_ASSIGN_OR_RETURN(
        const WmeStage2Result stage2,
        WmeStage2ClippedMean(values, sizes, interval, epsilon2, delta2, rng));
    result.intervals.push_back(interval);
    result.raw.push_back(stage2.clipped_mean);
    result.output.push_back(stage2.output);
    result.noise_scale = stage2.noise_scale;
  }
  result.clipped = result.raw;
  if (dataset.dim() > 1) {
    result.diagnostics.push_back(
        "coordinate-wise composition: each coordinate uses epsilon / d and "
        "delta / d");
  }
  return result;
}

}  // namespace huberdp
