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

#include "huberdp/sensitivity.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "absl/strings/str_cat.h"

namespace huberdp {
namespace {

// Calls fn(removed) for every k-subset of {0..n-1} in lexicographic order
// until fn returns true. Returns whether fn stopped the enumeration.
bool ForEachCombination(size_t n, size_t k,
                        const std::function<bool(std::span<const size_t>)>& fn) {
  std::vector<size_t> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  if (k > n) return false;
  while (true) {
    if (fn(idx)) return true;
    if (k == 0) return false;
    size_t pos = k;
    while (pos > 0 && idx[pos - 1] == n - k + pos - 1) --pos;
    if (pos == 0) return false;
    ++idx[pos - 1];
    for (size_t j = pos; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

std::vector<size_t> Complement(size_t n, std::span<const size_t> removed) {
  std::vector<bool> gone(n, false);
  for (size_t i : removed) gone[i] = true;
  std::vector<size_t> kept;
  kept.reserve(n - removed.size());
  for (size_t i = 0; i < n; ++i) {
    if (!gone[i]) kept.push_back(i);
  }
  return kept;
}

absl::Status CheckExhaustiveBudget(size_t n, size_t k_max) {
  if (n <= kExhaustiveUserLimit) return absl::OkStatus();
  double count = 0.0;
  double binom = 1.0;
  for (size_t k = 0; k <= k_max; ++k) {
    count += binom;
    binom = binom * static_cast<double>(n - k) / static_cast<double>(k + 1);
  }
  if (count > kExhaustiveSubsetBudget) {
    return absl::FailedPreconditionError(absl::StrCat(
        "exact outlier count needs ", count, " subset checks for n = ", n,
        "; use the greedy method"));
  }
  return absl::OkStatus();
}

double Sum(std::span<const double> v) {
  return std::accumulate(v.begin(), v.end(), 0.0);
}

// Sum of the `count` largest entries.
double TopSum(std::vector<double> values, size_t count) {
  count = std::min(count, values.size());
  std::partial_sort(values.begin(), values.begin() + count, values.end(),
                    std::greater<>());
  return std::accumulate(values.begin(), values.begin() + count, 0.0);
}

double HBoundImpl(std::span<const double> weights,
                  std::span<const double> thresholds,
                  std::span<const double> residuals, size_t k) {
  const size_t n = weights.size();
  std::vector<double> contrib(n);
  for (size_t i = 0; i < n; ++i) {
    contrib[i] = weights[i] * (thresholds[i] + residuals[i]);
  }
  const double numerator = TopSum(std::move(contrib), k);
  const double total = Sum(weights);
  const double denominator =
      total - TopSum(std::vector<double>(weights.begin(), weights.end()), k);
  if (!(denominator > 0.0)) return std::numeric_limits<double>::infinity();
  return numerator / denominator;
}

struct ImbalancedFields {
  std::vector<double> weights;
  std::vector<double> thresholds;
};

ImbalancedFields Fields(std::span<const UserSummary> summaries) {
  ImbalancedFields f;
  f.weights.reserve(summaries.size());
  f.thresholds.reserve(summaries.size());
  for (const UserSummary& u : summaries) {
    f.weights.push_back(u.weight);
    f.thresholds.push_back(u.threshold);
  }
  return f;
}

// Residuals of the modified dataset in which users outside `kept` sit at the
// weighted kept mean.
std::vector<double> WitnessResiduals(std::span<const UserSummary> summaries,
                                     std::span<const size_t> kept) {
  const size_t d = summaries.front().mean.size();
  Vector center(d, 0.0);
  double mass = 0.0;
  for (size_t i : kept) {
    AddScaled(center, summaries[i].weight, summaries[i].mean);
    mass += summaries[i].weight;
  }
  for (double& v : center) v /= mass;
  std::vector<double> z(summaries.size(), 0.0);
  for (size_t i : kept) z[i] = Distance(summaries[i].mean, center);
  return z;
}

// Precomputes the pieces of the imbalanced G so that each k costs O(1).
class ImbalancedGTable {
 public:
  ImbalancedGTable(std::span<const UserSummary> sorted,
                   std::span<const double> residuals,
                   std::optional<size_t> delta, size_t k0, double clip_radius)
      : n_(sorted.size()), delta_(delta), k0_(k0), clip_radius_(clip_radius) {
    ImbalancedFields f = Fields(sorted);
    double min_margin = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < n_; ++i) {
      max_wt_ = std::max(max_wt_, f.weights[i] * f.thresholds[i]);
      min_margin = std::min(min_margin, f.thresholds[i] - residuals[i]);
    }
    if (n_ >= 2) {
      h1_ = HBoundImpl(f.weights, f.thresholds, residuals, 1);
      case_a_ = h1_ <= min_margin;
    }
    std::vector<double> ascending = f.weights;
    std::sort(ascending.begin(), ascending.end());
    prefix_.assign(n_ + 1, 0.0);
    for (size_t i = 0; i < n_; ++i) prefix_[i + 1] = prefix_[i] + ascending[i];
  }

  GValue At(size_t k) const {
    if (k == 0 && case_a_) return {h1_, GCase::kNoOutliers};
    if (delta_.has_value() && k + *delta_ + 1 <= k0_) {
      const size_t keep = n_ - std::min(n_, *delta_ + k + 1);
      // An empty denominator leaves only the fallback.
      if (keep >= 1 && prefix_[keep] > 0.0) {
        return {2.0 * max_wt_ / prefix_[keep], GCase::kFewOutliers};
      }
    }
    return {2.0 * clip_radius_, GCase::kFallback};
  }

 private:
  size_t n_;
  std::optional<size_t> delta_;
  size_t k0_;
  double clip_radius_;
  double max_wt_ = 0.0;
  double h1_ = 0.0;
  bool case_a_ = false;
  std::vector<double> prefix_;
};

}  // namespace

absl::StatusOr<PrivacyParams> MakePrivacyParams(double epsilon, double delta,
                                                size_t dimension) {
  if (!(epsilon > 0.0) || std::isnan(epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be positive, got ", epsilon));
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must lie in (0, 1), got ", delta));
  }
  if (dimension < 1) {
    return absl::InvalidArgumentError("dimension must be at least 1");
  }
  PrivacyParams p;
  p.epsilon = epsilon;
  p.delta = delta;
  p.dimension = dimension;
  if (dimension == 1) {
    const double log_inv_delta = std::log(1.0 / delta);
    p.alpha = epsilon / std::sqrt(log_inv_delta);
    p.beta = epsilon / (2.0 * log_inv_delta);
  } else {
    const double log_two_over_delta = std::log(2.0 / delta);
    p.alpha = epsilon / (5.0 * std::sqrt(2.0 * log_two_over_delta));
    p.beta = epsilon /
             (4.0 * (static_cast<double>(dimension) + log_two_over_delta));
  }
  return p;
}

Spread SpreadBalanced(std::span<const Vector> means) {
  Spread out;
  out.mean.assign(means.front().size(), 0.0);
  const double inv_n = 1.0 / static_cast<double>(means.size());
  for (const Vector& y : means) AddScaled(out.mean, inv_n, y);
  for (const Vector& y : means) out.z = std::max(out.z, Distance(y, out.mean));
  return out;
}

std::vector<double> ResidualsBalanced(std::span<const Vector> means) {
  const Spread spread = SpreadBalanced(means);
  std::vector<double> z;
  z.reserve(means.size());
  for (const Vector& y : means) z.push_back(Distance(y, spread.mean));
  return z;
}

std::vector<double> ResidualsWeighted(std::span<const UserSummary> summaries) {
  Vector center(summaries.front().mean.size(), 0.0);
  for (const UserSummary& u : summaries) AddScaled(center, u.weight, u.mean);
  std::vector<double> z;
  z.reserve(summaries.size());
  for (const UserSummary& u : summaries) z.push_back(Distance(u.mean, center));
  return z;
}

absl::StatusOr<double> HStatistic(std::span<const UserSummary> sorted,
                                  std::span<const double> residuals,
                                  size_t k) {
  const size_t n = sorted.size();
  if (k < 1 || k + 1 > n) {
    return absl::InvalidArgumentError(
        absl::StrCat("h statistic needs 1 <= k <= n - 1, got k = ", k,
                     " with n = ", n));
  }
  double numerator = 0.0;
  for (size_t i = n - k; i < n; ++i) {
    numerator += sorted[i].weight * (sorted[i].threshold + residuals[i]);
  }
  double denominator = 0.0;
  for (size_t i = 0; i < n - k; ++i) denominator += sorted[i].weight;
  return numerator / denominator;
}

absl::StatusOr<double> HStatisticBound(std::span<const UserSummary> summaries,
                                       std::span<const double> residuals,
                                       size_t k) {
  const size_t n = summaries.size();
  if (k < 1 || k + 1 > n) {
    return absl::InvalidArgumentError(
        absl::StrCat("h bound needs 1 <= k <= n - 1, got k = ", k,
                     " with n = ", n));
  }
  const ImbalancedFields f = Fields(summaries);
  return HBoundImpl(f.weights, f.thresholds, residuals, k);
}

std::string_view DeltaMethodName(DeltaMethod method) {
  return method == DeltaMethod::kExact ? "exact" : "greedy";
}

absl::StatusOr<DeltaMethod> ParseDeltaMethod(std::string_view name) {
  if (name == "exact") return DeltaMethod::kExact;
  if (name == "greedy") return DeltaMethod::kGreedy;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown delta method '", std::string(name), "'"));
}

bool KeptSetConcentrated(std::span<const Vector> means,
                         std::span<const size_t> kept, double threshold) {
  if (kept.empty()) return false;
  Vector center(means.front().size(), 0.0);
  for (size_t i : kept) AddScaled(center, 1.0, means[i]);
  for (double& v : center) v /= static_cast<double>(kept.size());
  for (size_t i : kept) {
    if (!(Distance(means[i], center) < 0.5 * threshold)) return false;
  }
  return true;
}

absl::StatusOr<DeltaResult> DeltaExact(std::span<const Vector> means,
                                       double threshold, size_t k_max) {
  const size_t n = means.size();
  if (n == 0) return absl::InvalidArgumentError("no user means");
  k_max = std::min(k_max, n - 1);
  if (absl::Status s = CheckExhaustiveBudget(n, k_max); !s.ok()) return s;
  DeltaResult result;
  for (size_t k = 0; k <= k_max; ++k) {
    const bool found = ForEachCombination(n, k, [&](std::span<const size_t> r) {
      std::vector<size_t> kept = Complement(n, r);
      if (!KeptSetConcentrated(means, kept, threshold)) return false;
      result.delta = k;
      result.kept = std::move(kept);
      return true;
    });
    if (found) break;
  }
  return result;
}

DeltaResult DeltaGreedy(std::span<const Vector> means, double threshold,
                        size_t k_max) {
  const size_t n = means.size();
  DeltaResult result;
  if (n == 0) return result;
  const size_t d = means.front().size();
  std::vector<bool> alive(n, true);
  Vector sum(d, 0.0);
  for (const Vector& y : means) AddScaled(sum, 1.0, y);
  size_t removed = 0;
  while (true) {
    const double count = static_cast<double>(n - removed);
    const Vector center = Scaled(sum, 1.0 / count);
    double farthest = -1.0;
    size_t arg = n;
    for (size_t i = 0; i < n; ++i) {
      if (!alive[i]) continue;
      const double r = Distance(means[i], center);
      if (r > farthest) {
        farthest = r;
        arg = i;
      }
    }
    if (farthest < 0.5 * threshold) {
      result.delta = removed;
      for (size_t i = 0; i < n; ++i) {
        if (alive[i]) result.kept.push_back(i);
      }
      return result;
    }
    if (removed >= k_max || removed + 1 >= n) return result;
    alive[arg] = false;
    AddScaled(sum, -1.0, means[arg]);
    ++removed;
  }
}

bool KeptSetConcentratedImbalanced(std::span<const UserSummary> summaries,
                                   std::span<const size_t> kept, size_t k0) {
  const size_t n = summaries.size();
  if (kept.empty() || k0 < 1 || k0 + 1 > n) return false;
  const std::vector<double> z = WitnessResiduals(summaries, kept);
  const ImbalancedFields f = Fields(summaries);
  double margin = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < n; ++i) {
    margin = std::min(margin, f.thresholds[i] - z[i]);
  }
  return HBoundImpl(f.weights, f.thresholds, z, k0) < margin;
}

absl::StatusOr<DeltaResult> DeltaExactImbalanced(
    std::span<const UserSummary> summaries, size_t k0, size_t k_max) {
  const size_t n = summaries.size();
  if (n == 0) return absl::InvalidArgumentError("no user summaries");
  k_max = std::min(k_max, n - 1);
  if (absl::Status s = CheckExhaustiveBudget(n, k_max); !s.ok()) return s;
  DeltaResult result;
  for (size_t k = 0; k <= k_max; ++k) {
    const bool found = ForEachCombination(n, k, [&](std::span<const size_t> r) {
      std::vector<size_t> kept = Complement(n, r);
      if (!KeptSetConcentratedImbalanced(summaries, kept, k0)) return false;
      result.delta = k;
      result.kept = std::move(kept);
      return true;
    });
    if (found) break;
  }
  return result;
}

DeltaResult DeltaGreedyImbalanced(std::span<const UserSummary> summaries,
                                  size_t k0, size_t k_max) {
  const size_t n = summaries.size();
  DeltaResult result;
  if (n == 0 || k0 < 1 || k0 + 1 > n) return result;
  const ImbalancedFields f = Fields(summaries);
  std::vector<size_t> kept(n);
  std::iota(kept.begin(), kept.end(), 0);
  while (true) {
    const std::vector<double> z = WitnessResiduals(summaries, kept);
    double margin = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < n; ++i) {
      margin = std::min(margin, f.thresholds[i] - z[i]);
    }
    if (HBoundImpl(f.weights, f.thresholds, z, k0) < margin) {
      result.delta = n - kept.size();
      result.kept = kept;
      return result;
    }
    if (n - kept.size() >= k_max || kept.size() <= 1) return result;
    size_t worst = 0;
    double worst_margin = std::numeric_limits<double>::infinity();
    for (size_t pos = 0; pos < kept.size(); ++pos) {
      const size_t i = kept[pos];
      const double m = f.thresholds[i] - z[i];
      if (m < worst_margin) {
        worst_margin = m;
        worst = pos;
      }
    }
    kept.erase(kept.begin() + static_cast<std::ptrdiff_t>(worst));
  }
}

std::string_view GCaseName(GCase c) {
  switch (c) {
    case GCase::kNoOutliers:
      return "no-outliers";
    case GCase::kFewOutliers:
      return "few-outliers";
    case GCase::kFallback:
      return "fallback";
  }
  return "fallback";
}

GValue GBalanced(double z, std::optional<size_t> delta, double threshold,
                 double clip_radius, size_t n, size_t k) {
  const double nd = static_cast<double>(n);
  if (k == 0 && n >= 2 && z < (1.0 - 2.0 / nd) * threshold) {
    return {(threshold + z) / (nd - 1.0), GCase::kNoOutliers};
  }
  if (delta.has_value() &&
      static_cast<double>(k) <= nd / 4.0 - 1.0 - static_cast<double>(*delta)) {
    return {2.0 * threshold / (nd - static_cast<double>(k + *delta)),
            GCase::kFewOutliers};
  }
  return {2.0 * clip_radius, GCase::kFallback};
}

GValue GImbalanced(std::span<const UserSummary> sorted,
                   std::span<const double> residuals,
                   std::optional<size_t> delta, size_t k0, double clip_radius,
                   size_t k) {
  return ImbalancedGTable(sorted, residuals, delta, k0, clip_radius).At(k);
}

SmoothSensitivityResult SmoothSensitivity(
    const std::function<GValue(size_t)>& g, double beta, size_t n) {
  SmoothSensitivityResult out;
  for (size_t k = 0; k <= n; ++k) {
    const GValue gk = g(k);
    if (k == 0) out.case_at_zero = gk.which;
    out.profile.emplace_back(k, gk.value);
    out.value =
        std::max(out.value, std::exp(-beta * static_cast<double>(k)) * gk.value);
    // Past this point G is the constant fallback and its envelope only
    // shrinks.
    if (gk.which == GCase::kFallback) break;
  }
  return out;
}

absl::StatusOr<SensitivityReport> BalancedSensitivity(
    std::span<const Vector> means, double threshold, double clip_radius,
    double beta, DeltaMethod method) {
  if (means.empty()) return absl::InvalidArgumentError("no user means");
  if (!(threshold > 0.0) || !(clip_radius > 0.0) || !(beta > 0.0)) {
    return absl::InvalidArgumentError(
        "threshold, clip radius and beta must be positive");
  }
  const size_t n = means.size();
  SensitivityReport report;
  report.delta_method = method;
  report.residuals = ResidualsBalanced(means);
  report.z_max =
      *std::max_element(report.residuals.begin(), report.residuals.end());

  // Only outlier counts with n/4 - 1 - delta >= 0 can reach case (b).
  const double usable = std::floor(static_cast<double>(n) / 4.0 - 1.0);
  if (usable >= 0.0) {
    const size_t k_max = static_cast<size_t>(usable);
    DeltaResult delta;
    if (method == DeltaMethod::kExact) {
      auto exact = DeltaExact(means, threshold, k_max);
      if (!exact.ok()) return exact.status();
      delta = *std::move(exact);
    } else {
      delta = DeltaGreedy(means, threshold, k_max);
    }
    report.delta_hat = delta.delta;
    report.witness = std::move(delta.kept);
  }

  const double z = report.z_max;
  const std::optional<size_t> d_hat = report.delta_hat;
  SmoothSensitivityResult s = SmoothSensitivity(
      [&](size_t k) { return GBalanced(z, d_hat, threshold, clip_radius, n, k); },
      beta, n);
  report.smooth_sensitivity = s.value;
  report.g_profile = std::move(s.profile);
  report.case_taken = s.case_at_zero;
  return report;
}

absl::StatusOr<SensitivityReport> ImbalancedSensitivity(
    std::span<const UserSummary> sorted, size_t k0, double clip_radius,
    double beta, DeltaMethod method) {
  if (sorted.empty()) return absl::InvalidArgumentError("no user summaries");
  if (!(clip_radius > 0.0) || !(beta > 0.0)) {
    return absl::InvalidArgumentError("clip radius and beta must be positive");
  }
  for (size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].size < sorted[i - 1].size) {
      return absl::InvalidArgumentError(
          "summaries must be sorted ascending by size");
    }
  }
  const size_t n = sorted.size();
  SensitivityReport report;
  report.imbalanced = true;
  report.k0 = k0;
  report.delta_method = method;
  report.residuals = ResidualsWeighted(sorted);
  report.z_max =
      *std::max_element(report.residuals.begin(), report.residuals.end());

  if (k0 >= 1) {
    const size_t k_max = k0 - 1;
    DeltaResult delta;
    if (method == DeltaMethod::kExact) {
      auto exact = DeltaExactImbalanced(sorted, k0, k_max);
      if (!exact.ok()) return exact.status();
      delta = *std::move(exact);
    } else {
      delta = DeltaGreedyImbalanced(sorted, k0, k_max);
    }
    report.delta_hat = delta.delta;
    report.witness = std::move(delta.kept);
  }

  const ImbalancedGTable table(sorted, report.residuals, report.delta_hat, k0,
                               clip_radius);
  SmoothSensitivityResult s = SmoothSensitivity(
      [&](size_t k) { return table.At(k); }, beta, n);
  report.smooth_sensitivity = s.value;
  report.g_profile = std::move(s.profile);
  report.case_taken = s.case_at_zero;
  return report;
}

}  // namespace huberdp
