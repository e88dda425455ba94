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

#include "huberdp/huber.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"
#include "huberdp/status_macros.h"

namespace huberdp {
namespace {

absl::Status CheckThreshold(double threshold) {
  if (!(threshold > 0.0) || !std::isfinite(threshold)) {
    return absl::InvalidArgumentError(
        absl::StrCat("Huber threshold must be positive, got ", threshold));
  }
  return absl::OkStatus();
}

absl::Status CheckDims(std::span<const double> s, std::span<const double> y) {
  if (s.size() != y.size()) {
    return absl::InvalidArgumentError("dimension mismatch");
  }
  return absl::OkStatus();
}

Vector CoordinateMedian(std::span<const UserSummary> summaries) {
  const size_t d = summaries.front().mean.size();
  Vector out(d);
  std::vector<double> column(summaries.size());
  for (size_t j = 0; j < d; ++j) {
    for (size_t i = 0; i < summaries.size(); ++i) {
      column[i] = summaries[i].mean[j];
    }
    const size_t mid = column.size() / 2;
    std::nth_element(column.begin(), column.begin() + mid, column.end());
    double med = column[mid];
    if (column.size() % 2 == 0) {
      med = 0.5 * (med + *std::max_element(column.begin(),
                                            column.begin() + mid));
    }
    out[j] = med;
  }
  return out;
}

}  // namespace

absl::StatusOr<double> HuberLoss(std::span<const double> s,
                                 std::span<const double> y, double threshold) {
  HUBERDP_RETURN_IF_ERROR(CheckThreshold(threshold));
  HUBERDP_RETURN_IF_ERROR(CheckDims(s, y));
  const double r = Distance(s, y);
  if (r <= threshold) return 0.5 * r * r;
  return threshold * r - 0.5 * threshold * threshold;
}

absl::StatusOr<Vector> HuberGradient(std::span<const double> s,
                                     std::span<const double> y,
                                     double threshold) {
  HUBERDP_RETURN_IF_ERROR(CheckThreshold(threshold));
  HUBERDP_RETURN_IF_ERROR(CheckDims(s, y));
  Vector g = Subtract(s, y);
  const double r = Norm(g);
  if (r > threshold) {
    for (double& v : g) v *= threshold / r;
  }
  return g;
}

absl::StatusOr<double> Objective(std::span<const double> s,
                                 std::span<const UserSummary> summaries) {
  double total = 0.0;
  for (const UserSummary& u : summaries) {
    HUBERDP_ASSIGN_OR_RETURN(const double loss,
                             HuberLoss(s, u.mean, u.threshold));
    total += u.weight * loss;
  }
  return total;
}

absl::StatusOr<Vector> ObjectiveGradient(
    std::span<const double> s, std::span<const UserSummary> summaries) {
  Vector total(s.size(), 0.0);
  for (const UserSummary& u : summaries) {
    HUBERDP_ASSIGN_OR_RETURN(const Vector g,
                             HuberGradient(s, u.mean, u.threshold));
    AddScaled(total, u.weight, g);
  }
  return total;
}

HuberConfig HuberConfig::ForSummaries(std::span<const UserSummary> summaries) {
  HuberConfig cfg;
  double max_threshold = 0.0;
  for (const UserSummary& u : summaries) {
    max_threshold = std::max(max_threshold, u.threshold);
  }
  constexpr double kRelativeTolerance = 1e-10;
  cfg.tolerance = kRelativeTolerance * max_threshold;
  // 10 * ceil(1 / xi_rel) steps, capped.
  cfg.max_iterations = std::min<int64_t>(
      10 * static_cast<int64_t>(std::ceil(1.0 / kRelativeTolerance)),
      1'000'000);
  return cfg;
}

absl::Status ValidateSummaries(std::span<const UserSummary> summaries) {
  if (summaries.empty()) {
    return absl::InvalidArgumentError("no user summaries");
  }
  const size_t d = summaries.front().mean.size();
  if (d == 0) return absl::InvalidArgumentError("zero-dimensional means");
  double weight_sum = 0.0;
  for (const UserSummary& u : summaries) {
    if (u.mean.size() != d) {
      return absl::InvalidArgumentError("inconsistent summary dimensions");
    }
    if (!AllFinite(u.mean)) {
      return absl::InvalidArgumentError("non-finite user mean");
    }
    HUBERDP_RETURN_IF_ERROR(CheckThreshold(u.threshold));
    if (!(u.weight >= 0.0)) {
      return absl::InvalidArgumentError("negative user weight");
    }
    weight_sum += u.weight;
  }
  if (std::abs(weight_sum - 1.0) > 1e-9) {
    return absl::InvalidArgumentError(
        absl::StrCat("weights must sum to 1, got ", weight_sum));
  }
  return absl::OkStatus();
}

Vector WeiszfeldStep(std::span<const double> c,
                     std::span<const UserSummary> summaries) {
  Vector numerator(c.size(), 0.0);
  double denominator = 0.0;
  for (const UserSummary& u : summaries) {
    const double r = Distance(c, u.mean);
    const double factor = r <= u.threshold ? 1.0 : u.threshold / r;
    const double a = u.weight * factor;
    AddScaled(numerator, a, u.mean);
    denominator += a;
  }
  for (double& v : numerator) v /= denominator;
  return numerator;
}

absl::StatusOr<MinimizerResult> WeiszfeldMinimize(
    std::span<const UserSummary> summaries, const HuberConfig& cfg) {
  HUBERDP_RETURN_IF_ERROR(ValidateSummaries(summaries));
  if (!(cfg.tolerance > 0.0) || cfg.max_iterations < 1) {
    return absl::InvalidArgumentError(
        "solver needs tolerance > 0 and max_iterations >= 1");
  }
  const size_t d = summaries.front().mean.size();

  MinimizerResult result;
  switch (cfg.init) {
    case SolverInit::kWeightedMean:
      result.point.assign(d, 0.0);
      for (const UserSummary& u : summaries) {
        AddScaled(result.point, u.weight, u.mean);
      }
      break;
    case SolverInit::kCoordinateMedian:
      result.point = CoordinateMedian(summaries);
      break;
    case SolverInit::kExplicit:
      if (cfg.start.size() != d || !AllFinite(cfg.start)) {
        return absl::InvalidArgumentError("invalid explicit start point");
      }
      result.point = cfg.start;
      break;
  }

  for (int64_t it = 1; it <= cfg.max_iterations; ++it) {
    Vector next = WeiszfeldStep(result.point, summaries);
    if (!AllFinite(next)) {
      return absl::InternalError(
          absl::StrCat("numerical error: non-finite iterate at step ", it));
    }
    result.final_step_norm = Distance(next, result.point);
    result.point = std::move(next);
    result.iterations = it;
    if (result.final_step_norm < cfg.tolerance) {
      result.converged = true;
      break;
    }
  }
  return result;
}

}  // namespace huberdp
