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

#include "huberdp/serialization.h"

#include <type_traits>
#include <utility>

#include "absl/strings/str_cat.h"
#include "huberdp/status_macros.h"
#include "nlohmann/json.hpp"

namespace huberdp {
namespace {

using nlohmann::json;

absl::Status TypeError(const std::string& key, std::string_view want) {
  return absl::InvalidArgumentError(absl::StrCat(
      "config key '", key, "' must be ", std::string(want)));
}

absl::Status ReadNumber(const json& v, const std::string& key, double& out) {
  if (!v.is_number()) return TypeError(key, "a number");
  out = v.get<double>();
  return absl::OkStatus();
}

absl::Status ReadString(const json& v, const std::string& key,
                        std::string& out) {
  if (!v.is_string()) return TypeError(key, "a string");
  out = v.get<std::string>();
  return absl::OkStatus();
}

template <typename T>
absl::Status ReadOptional(const json& v, const std::string& key,
                          std::optional<T>& out) {
  if (v.is_null()) {
    out.reset();
    return absl::OkStatus();
  }
  if constexpr (std::is_same_v<T, uint64_t>) {
    if (!v.is_number_unsigned()) return TypeError(key, "a nonnegative integer");
    out = v.get<uint64_t>();
  } else {
    if (!v.is_number()) return TypeError(key, "a number or null");
    out = v.get<T>();
  }
  return absl::OkStatus();
}

template <typename T>
json OptionalJson(const std::optional<T>& v) {
  return v.has_value() ? json(*v) : json(nullptr);
}

json SensitivityJson(const SensitivityReport& r) {
  json g = json::array();
  for (const auto& [k, value] : r.g_profile) g.push_back({k, value});
  return {
      {"z_max", r.z_max},
      {"residuals", r.residuals},
      {"delta_hat", OptionalJson(r.delta_hat)},
      {"delta_method", std::string(DeltaMethodName(r.delta_method))},
      {"witness", r.witness},
      {"g_profile", g},
      {"smooth_sensitivity", r.smooth_sensitivity},
      {"case_taken", std::string(GCaseName(r.case_taken))},
      {"imbalanced", r.imbalanced},
      {"k0", r.k0},
  };
}

}  // namespace

absl::StatusOr<ConfigValues> MergeConfigJson(std::string_view text,
                                             const ConfigValues& base) {
  const json doc = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) {
    return absl::InvalidArgumentError("parse error: config is not valid JSON");
  }
  if (!doc.is_object()) {
    return absl::InvalidArgumentError("parse error: config must be an object");
  }
  ConfigValues v = base;
  for (const auto& [key, value] : doc.items()) {
    if (key == "method") {
      HUBERDP_RETURN_IF_ERROR(ReadString(value, key, v.method));
    } else if (key == "epsilon") {
      HUBERDP_RETURN_IF_ERROR(ReadNumber(value, key, v.epsilon));
    } else if (key == "delta") {
      HUBERDP_RETURN_IF_ERROR(ReadNumber(value, key, v.delta));
    } else if (key == "radius") {
      HUBERDP_RETURN_IF_ERROR(ReadNumber(value, key, v.radius));
    } else if (key == "regime") {
      HUBERDP_RETURN_IF_ERROR(ReadString(value, key, v.regime));
    } else if (key == "bound") {
      HUBERDP_RETURN_IF_ERROR(ReadNumber(value, key, v.bound));
    } else if (key == "p") {
      HUBERDP_RETURN_IF_ERROR(ReadNumber(value, key, v.p));
    } else if (key == "moment") {
      HUBERDP_RETURN_IF_ERROR(ReadNumber(value, key, v.moment));
    } else if (key == "c_t") {
      HUBERDP_RETURN_IF_ERROR(ReadNumber(value, key, v.c_t));
    } else if (key == "mode") {
      HUBERDP_RETURN_IF_ERROR(ReadString(value, key, v.mode));
    } else if (key == "gamma") {
      HUBERDP_RETURN_IF_ERROR(ReadOptional(value, key, v.gamma));
    } else if (key == "seed") {
      HUBERDP_RETURN_IF_ERROR(ReadOptional(value, key, v.seed));
    } else if (key == "threshold_scale") {
      HUBERDP_RETURN_IF_ERROR(ReadOptional(value, key, v.threshold_scale));
    } else if (key == "delta_method") {
      HUBERDP_RETURN_IF_ERROR(ReadString(value, key, v.delta_method));
    } else if (key == "k0") {
      HUBERDP_RETURN_IF_ERROR(ReadOptional(value, key, v.k0));
    } else if (key == "tau") {
      HUBERDP_RETURN_IF_ERROR(ReadNumber(value, key, v.tau));
    } else if (key == "stage1_fraction") {
      HUBERDP_RETURN_IF_ERROR(ReadNumber(value, key, v.stage1_fraction));
    } else {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown config key '", key, "'"));
    }
  }
  return v;
}

std::string ConfigValuesToJson(const ConfigValues& v) {
  const json doc = {
      {"method", v.method},
      {"epsilon", v.epsilon},
      {"delta", v.delta},
      {"radius", v.radius},
      {"regime", v.regime},
      {"bound", v.bound},
      {"p", v.p},
      {"moment", v.moment},
      {"c_t", v.c_t},
      {"mode", v.mode},
      {"gamma", OptionalJson(v.gamma)},
      {"seed", OptionalJson(v.seed)},
      {"threshold_scale", OptionalJson(v.threshold_scale)},
      {"delta_method", v.delta_method},
      {"k0", OptionalJson(v.k0)},
      {"tau", v.tau},
      {"stage1_fraction", v.stage1_fraction},
  };
  return doc.dump(2);
}

absl::StatusOr<EstimatorConfig> ToEstimatorConfig(const ConfigValues& v,
                                                  size_t dim) {
  EstimatorConfig config;
  HUBERDP_ASSIGN_OR_RETURN(config.privacy,
                           MakePrivacyParams(v.epsilon, v.delta, dim));
  if (!v.seed.has_value()) {
    return absl::InvalidArgumentError("a seed is required");
  }
  config.seed = *v.seed;
  config.radius = v.radius;
  if (v.regime == "bounded") {
    config.regime = BoundedRegime{v.bound};
  } else if (v.regime == "heavy-tail") {
    config.regime = HeavyTailRegime{v.bound, v.p, v.moment};
  } else {
    return absl::InvalidArgumentError(absl::StrCat(
        "unknown regime '", v.regime, "' (expected bounded or heavy-tail)"));
  }
  config.c_t = v.c_t;
  HUBERDP_ASSIGN_OR_RETURN(config.mode, ParseEstimatorMode(v.mode));
  config.gamma = v.gamma;
  config.threshold_scale = v.threshold_scale;
  HUBERDP_ASSIGN_OR_RETURN(config.delta_method,
                           ParseDeltaMethod(v.delta_method));
  if (v.k0.has_value()) config.k0 = static_cast<size_t>(*v.k0);
  return config;
}

absl::StatusOr<WmeConfig> ToWmeConfig(const ConfigValues& v, size_t dim) {
  WmeConfig config;
  HUBERDP_ASSIGN_OR_RETURN(config.privacy,
                           MakePrivacyParams(v.epsilon, v.delta, dim));
  if (!v.seed.has_value()) {
    return absl::InvalidArgumentError("a seed is required");
  }
  if (!(v.tau > 0.0)) {
    return absl::InvalidArgumentError("WME needs a positive tau");
  }
  config.seed = *v.seed;
  config.tau = v.tau;
  config.stage1_fraction = v.stage1_fraction;
  config.range = v.radius > 0.0 ? v.radius : v.bound;
  return config;
}

std::string EstimationResultToJson(const EstimationResult& r) {
  json doc = {
      {"method", r.method},
      {"raw", r.raw},
      {"clipped", r.clipped},
      {"output", r.output},
      {"noise_scale", r.noise_scale},
      {"radius", r.radius},
      {"thresholds", r.thresholds},
      {"gamma", OptionalJson(r.gamma)},
      {"conditions_ok", r.conditions_ok},
      {"diagnostics", r.diagnostics},
  };
  if (r.report.has_value()) doc["sensitivity"] = SensitivityJson(*r.report);
  if (r.solver.has_value()) {
    doc["solver"] = {
        {"iterations", r.solver->iterations},
        {"final_step_norm", r.solver->final_step_norm},
        {"converged", r.solver->converged},
    };
  }
  if (!r.intervals.empty()) {
    json intervals = json::array();
    for (const Interval& i : r.intervals) intervals.push_back({i.lo, i.hi});
    doc["intervals"] = intervals;
  }
  return doc.dump(2);
}

}  // namespace huberdp
