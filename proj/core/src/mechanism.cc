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

#include "huberdp/mechanism.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "huberdp/random.h"
#include "huberdp/status_macros.h"

namespace huberdp {
namespace {

double RegimeBound(const Regime& regime) {
  if (const auto* b = std::get_if<BoundedRegime>(&regime)) return b->bound;
  return std::get<HeavyTailRegime>(regime).bound;
}

absl::Status ValidateRegime(const Regime& regime) {
  if (!(RegimeBound(regime) > 0.0)) {
    return absl::InvalidArgumentError("regime bound R must be positive");
  }
  if (const auto* h = std::get_if<HeavyTailRegime>(&regime)) {
    if (!(h->p >= 2.0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("heavy-tail moment order p must be >= 2, got ", h->p));
    }
    if (!(h->moment > 0.0)) {
      return absl::InvalidArgumentError("heavy-tail moment M_p must be positive");
    }
  }
  return absl::OkStatus();
}

// Capped sizes m_i ^ m_c and the cap itself.
struct Capped {
  std::vector<double> sizes;
  double cap = 0.0;
  size_t k0 = 0;
};

absl::StatusOr<Capped> CapSizes(std::span<const size_t> sizes, double gamma) {
  if (sizes.empty()) return absl::InvalidArgumentError("no users");
  if (!(gamma >= 1.0) || !std::isfinite(gamma)) {
    return absl::InvalidArgumentError(
        absl::StrCat("gamma must be a finite value >= 1, got ", gamma));
  }
  const double n = static_cast<double>(sizes.size());
  double total = 0.0;
  for (size_t m : sizes) {
    if (m == 0) return absl::InvalidArgumentError("user with zero samples");
    total += static_cast<double>(m);
  }
  Capped out;
  out.cap = gamma * total / n;
  out.k0 = static_cast<size_t>(std::floor(n / (8.0 * gamma)));
  if (out.k0 == 0) {
    return absl::FailedPreconditionError(absl::StrCat(
        "condition error: too few users for gamma = ", gamma, " (n = ",
        sizes.size(), " gives floor(n / (8 gamma)) = 0)"));
  }
  for (size_t m : sizes) {
    out.sizes.push_back(std::min(static_cast<double>(m), out.cap));
  }
  return out;
}

std::vector<double> NormalizedWeights(std::span<const double> capped) {
  const double sum = std::accumulate(capped.begin(), capped.end(), 0.0);
  std::vector<double> w;
  w.reserve(capped.size());
  for (double c : capped) w.push_back(c / sum);
  return w;
}

// Indices ordered by ascending size; ties keep input order.
std::vector<size_t> AscendingBySize(std::span<const UserSummary> summaries) {
  std::vector<size_t> order(summaries.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return summaries[a].size < summaries[b].size;
  });
  return order;
}

void AddNoise(EstimationResult& result, double stddev, uint64_t seed) {
  CounterRng rng(seed);
  result.noise_scale = stddev;
  result.output = result.clipped;
  for (double& v : result.output) v += SampleGaussian(rng, stddev);
}

absl::StatusOr<double> BalancedThreshold(const EstimatorConfig& config,
                                         double c_t, double m, double n,
                                         double d) {
  if (config.threshold_scale.has_value()) {
    if (!(*config.threshold_scale > 0.0)) {
      return absl::InvalidArgumentError("threshold scale must be positive");
    }
    return *config.threshold_scale / std::sqrt(m);
  }
  if (const auto* b = std::get_if<BoundedRegime>(&config.regime)) {
    return SelectThresholdBounded(b->bound, m, n, d, c_t);
  }
  const auto& h = std::get<HeavyTailRegime>(config.regime);
  return SelectThresholdHeavyTail(m, n, d, config.privacy.epsilon, h.p,
                                  h.moment, c_t);
}

absl::StatusOr<ImbalancedParams> ImbalancedParamsFor(
    const EstimatorConfig& config, std::span<const size_t> sizes,
    double gamma, double c_t, size_t dim) {
  if (config.threshold_scale.has_value()) {
    return SelectImbalancedParamsScaled(sizes, gamma, *config.threshold_scale);
  }
  if (const auto* b = std::get_if<BoundedRegime>(&config.regime)) {
    return SelectImbalancedParams(sizes, gamma, b->bound, c_t, dim);
  }
  // Heavy tails: the balanced rule evaluated at each user's capped size.
  const auto& h = std::get<HeavyTailRegime>(config.regime);
  HUBERDP_ASSIGN_OR_RETURN(ImbalancedParams params,
                           SelectImbalancedParamsScaled(sizes, gamma, 1.0));
  HUBERDP_ASSIGN_OR_RETURN(Capped capped, CapSizes(sizes, gamma));
  for (size_t i = 0; i < sizes.size(); ++i) {
    HUBERDP_ASSIGN_OR_RETURN(
        params.thresholds[i],
        SelectThresholdHeavyTail(capped.sizes[i],
                                 static_cast<double>(sizes.size()),
                                 static_cast<double>(dim),
                                 config.privacy.epsilon, h.p, h.moment, c_t));
  }
  return params;
}

}  // namespace

std::string_view EstimatorModeName(EstimatorMode mode) {
  return mode == EstimatorMode::kBalanced ? "balanced" : "imbalanced";
}

absl::StatusOr<EstimatorMode> ParseEstimatorMode(std::string_view name) {
  if (name == "balanced") return EstimatorMode::kBalanced;
  if (name == "imbalanced") return EstimatorMode::kImbalanced;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown mode '", std::string(name), "'"));
}

double MinConstantBounded() { return 16.0 * std::sqrt(2.0 / 3.0); }

double MinConstantHeavyTail(double p, double moment) {
  return 8.0 * std::pow(moment, 1.0 / p);
}

double DefaultConstant(const Regime& regime) {
  if (std::holds_alternative<BoundedRegime>(regime)) {
    return 1.1 * MinConstantBounded();
  }
  const auto& h = std::get<HeavyTailRegime>(regime);
  return 1.1 * MinConstantHeavyTail(h.p, h.moment);
}

double SelectThresholdBounded(double bound, double m, double n, double d,
                              double c_t) {
  return c_t * bound * std::log(m * n * n * n * (d + 1.0)) / std::sqrt(m);
}

absl::StatusOr<double> SelectThresholdHeavyTail(double m, double n, double d,
                                                double epsilon, double p,
                                                double moment, double c_t) {
  if (!(p >= 2.0) || !(moment > 0.0)) {
    return absl::InvalidArgumentError("heavy tails need p >= 2 and M_p > 0");
  }
  const double nu = std::sqrt(d) / (n * epsilon);
  const double log_term = std::log(3.0 * (d + 1.0) / nu);
  if (!(log_term > 0.0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "heavy-tail threshold undefined: nu = sqrt(d) / (n epsilon) = ", nu,
        " is not below 3(d+1); use more users or a larger epsilon"));
  }
  const double gaussian_part = std::sqrt(log_term / m);
  const double tail_part = 2.0 * std::pow(3.0 * m, 1.0 / p - 1.0) *
                           std::pow(nu, -1.0 / p) * log_term;
  return c_t * std::max(gaussian_part, tail_part);
}

absl::StatusOr<ImbalancedParams> SelectImbalancedParams(
    std::span<const size_t> sizes, double gamma, double bound, double c_t,
    size_t dim) {
  HUBERDP_ASSIGN_OR_RETURN(Capped capped, CapSizes(sizes, gamma));
  const double n = static_cast<double>(sizes.size());
  const double total =
      static_cast<double>(std::accumulate(sizes.begin(), sizes.end(),
                                          size_t{0}));
  const double log_term =
      std::log(total * n * n * (static_cast<double>(dim) + 1.0));
  ImbalancedParams params;
  params.gamma = gamma;
  params.capped_size = capped.cap;
  params.k0 = capped.k0;
  params.weights = NormalizedWeights(capped.sizes);
  for (double c : capped.sizes) {
    params.thresholds.push_back(c_t * std::sqrt(bound * bound * log_term / c));
  }
  return params;
}

absl::StatusOr<ImbalancedParams> SelectImbalancedParamsScaled(
    std::span<const size_t> sizes, double gamma, double scale) {
  if (!(scale > 0.0)) {
    return absl::InvalidArgumentError("threshold scale must be positive");
  }
  HUBERDP_ASSIGN_OR_RETURN(Capped capped, CapSizes(sizes, gamma));
  ImbalancedParams params;
  params.gamma = gamma;
  params.capped_size = capped.cap;
  params.k0 = capped.k0;
  params.weights = NormalizedWeights(capped.sizes);
  for (double c : capped.sizes) params.thresholds.push_back(scale / std::sqrt(c));
  return params;
}

Vector Clip(std::span<const double> v, double radius) {
  const double norm = Norm(v);
  if (norm <= radius) return Vector(v.begin(), v.end());
  return Scaled(v, radius / norm);
}

ConditionCheck CheckConditionsBalanced(const EstimatorConfig& config, size_t n,
                                       double threshold) {
  const double nd = static_cast<double>(n);
  const double beta = config.privacy.beta;
  const double radius =
      config.radius > 0.0 ? config.radius : RegimeBound(config.regime);
  ConditionCheck check;
  double required;
  std::string form;
  if (std::holds_alternative<BoundedRegime>(config.regime)) {
    required = (4.0 / beta) * std::log(nd * radius / threshold);
    form = "n > (4/beta) ln(n R_c / T)";
  } else {
    required = 8.0 * (1.0 + std::log(nd / (2.0 * threshold)) / beta);
    form = "n > 8 (1 + ln(n / 2T) / beta)";
  }
  check.ok = nd > required;
  check.diagnostic =
      absl::StrFormat("%s %s: n = %d, bound = %.6g", form,
                      check.ok ? "holds" : "fails", n, required);
  return check;
}

ConditionCheck CheckConditionsImbalanced(const EstimatorConfig& config,
                                         size_t n, size_t total,
                                         double gamma) {
  const double nd = static_cast<double>(n);
  const double required =
      8.0 * gamma *
      (1.0 + std::log(static_cast<double>(total) * nd) /
                 (2.0 * config.privacy.beta));
  ConditionCheck check;
  check.ok = nd > required;
  check.diagnostic = absl::StrFormat(
      "n > 8 gamma (1 + ln(N n) / (2 beta)) %s: n = %d, bound = %.6g",
      check.ok ? "holds" : "fails", n, required);
  return check;
}

absl::StatusOr<EstimationResult> Estimate(const UserDataset& dataset,
                                          const EstimatorConfig& config) {
  const PrivacyParams& privacy = config.privacy;
  if (privacy.dimension != dataset.dim()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "dimension error: privacy parameters are for d = ", privacy.dimension,
        " but the dataset has d = ", dataset.dim()));
  }
  if (!(privacy.alpha > 0.0) || !(privacy.beta > 0.0)) {
    return absl::InvalidArgumentError("privacy parameters are not initialized");
  }
  HUBERDP_RETURN_IF_ERROR(ValidateRegime(config.regime));
  const double radius =
      config.radius > 0.0 ? config.radius : RegimeBound(config.regime);
  if (config.radius < 0.0) {
    return absl::InvalidArgumentError("clipping radius must be positive");
  }
  const double c_t =
      config.c_t > 0.0 ? config.c_t : DefaultConstant(config.regime);
  if (config.c_t < 0.0) {
    return absl::InvalidArgumentError("C_T must be positive");
  }

  EstimationResult result;
  result.method = "hlm";
  result.radius = radius;
  if (!config.threshold_scale.has_value()) {
    const double floor =
        std::holds_alternative<BoundedRegime>(config.regime)
            ? MinConstantBounded()
            : MinConstantHeavyTail(
                  std::get<HeavyTailRegime>(config.regime).p,
                  std::get<HeavyTailRegime>(config.regime).moment);
    if (!(c_t > floor)) {
      result.diagnostics.push_back(absl::StrFormat(
          "C_T = %.6g is not above the regime minimum %.6g", c_t, floor));
    }
  }

  std::vector<UserSummary> summaries = UserMeans(dataset);
  const size_t n = summaries.size();
  const double nd = static_cast<double>(n);
  const double dd = static_cast<double>(dataset.dim());
  std::vector<Vector> means;
  means.reserve(n);
  for (const UserSummary& u : summaries) means.push_back(u.mean);

  if (config.mode == EstimatorMode::kBalanced) {
    size_t m_min = summaries.front().size;
    size_t m_max = m_min;
    for (const UserSummary& u : summaries) {
      m_min = std::min(m_min, u.size);
      m_max = std::max(m_max, u.size);
    }
    if (m_min != m_max) {
      result.diagnostics.push_back(absl::StrCat(
          "unequal user sizes in balanced mode; threshold uses m = min m_i = ",
          m_min));
    }
    HUBERDP_ASSIGN_OR_RETURN(
        const double threshold,
        BalancedThreshold(config, c_t, static_cast<double>(m_min), nd, dd));
    for (UserSummary& u : summaries) {
      u.weight = 1.0 / nd;
      u.threshold = threshold;
    }
    result.thresholds = {threshold};
    HUBERDP_ASSIGN_OR_RETURN(
        MinimizerResult solver,
        WeiszfeldMinimize(summaries, HuberConfig::ForSummaries(summaries)));
    HUBERDP_ASSIGN_OR_RETURN(
        SensitivityReport report,
        BalancedSensitivity(means, threshold, radius, privacy.beta,
                            config.delta_method));
    const ConditionCheck check =
        CheckConditionsBalanced(config, n, threshold);
    result.conditions_ok = check.ok;
    result.diagnostics.push_back(check.diagnostic);
    result.raw = solver.point;
    result.solver = std::move(solver);
    result.report = std::move(report);
  } else {
    const std::vector<size_t> sizes = dataset.sizes();
    double gamma;
    if (config.gamma.has_value()) {
      gamma = *config.gamma;
    } else {
      const ImbalanceProfile profile = ImbalanceDegree(sizes);
      if (!profile.valid) {
        return absl::InvalidArgumentError("could not compute imbalance degree");
      }
      gamma = profile.gamma;
    }
    result.gamma = gamma;
    HUBERDP_ASSIGN_OR_RETURN(
        ImbalancedParams params,
        ImbalancedParamsFor(config, sizes, gamma, c_t, dataset.dim()));
    if (config.k0.has_value()) {
      if (*config.k0 < 1) {
        return absl::InvalidArgumentError("k0 must be at least 1");
      }
      params.k0 = *config.k0;
    }
    for (size_t i = 0; i < n; ++i) {
      summaries[i].weight = params.weights[i];
      summaries[i].threshold = params.thresholds[i];
    }
    result.thresholds = params.thresholds;
    HUBERDP_ASSIGN_OR_RETURN(
        MinimizerResult solver,
        WeiszfeldMinimize(summaries, HuberConfig::ForSummaries(summaries)));

    SensitivityReport report;
    const bool equal_sizes =
        std::all_of(sizes.begin(), sizes.end(),
                    [&](size_t m) { return m == sizes.front(); });
    if (equal_sizes) {
      // Equal sizes make the weighted problem the balanced one; the balanced
      // bound is then both valid and tighter.
      HUBERDP_ASSIGN_OR_RETURN(
          report, BalancedSensitivity(means, params.thresholds.front(), radius,
                                      privacy.beta, config.delta_method));
      report.k0 = params.k0;
      result.diagnostics.push_back(
          "equal user sizes: balanced sensitivity analysis used");
    } else {
      const std::vector<size_t> order = AscendingBySize(summaries);
      std::vector<UserSummary> sorted;
      sorted.reserve(n);
      for (size_t i : order) sorted.push_back(summaries[i]);
      HUBERDP_ASSIGN_OR_RETURN(
          report, ImbalancedSensitivity(sorted, params.k0, radius,
                                        privacy.beta, config.delta_method));
      // Report per-user quantities in input order.
      std::vector<double> residuals(n);
      for (size_t pos = 0; pos < n; ++pos) {
        residuals[order[pos]] = report.residuals[pos];
      }
      report.residuals = std::move(residuals);
      for (size_t& w : report.witness) w = order[w];
      std::sort(report.witness.begin(), report.witness.end());
    }
    const ConditionCheck check =
        CheckConditionsImbalanced(config, n, dataset.total_samples(), gamma);
    result.conditions_ok = check.ok;
    result.diagnostics.push_back(check.diagnostic);
    result.raw = solver.point;
    result.solver = std::move(solver);
    result.report = std::move(report);
  }

  if (!result.solver->converged) {
    result.diagnostics.push_back(absl::StrCat(
        "solver stopped after ", result.solver->iterations,
        " iterations without reaching the tolerance"));
  }
  result.clipped = Clip(result.raw, radius);
  AddNoise(result, result.report->smooth_sensitivity / privacy.alpha,
           config.seed);
  return result;
}

}  // namespace huberdp
