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

#ifndef HUBERDP_SERIALIZATION_H_
#define HUBERDP_SERIALIZATION_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "absl/status/statusor.h"
#include "huberdp/mechanism.h"
#include "huberdp/wme.h"

namespace huberdp {

// Flat key-value form of an estimator configuration, shared by both
// methods. Keys in the JSON document match the field names. The dimension is
// not part of the document; it comes from the dataset.
struct ConfigValues {
  std::string method = "hlm";
  double epsilon = 1.0;
  double delta = 1e-5;
  // Zero: the regime bound R.
  double radius = 0.0;
  std::string regime = "bounded";
  double bound = 1.0;
  double p = 2.0;
  double moment = 1.0;
  // Zero: the regime default.
  double c_t = 0.0;
  std::string mode = "balanced";
  std::optional<double> gamma;
  std::optional<uint64_t> seed;
  std::optional<double> threshold_scale;
  std::string delta_method = "greedy";
  std::optional<uint64_t> k0;
  // WME only.
  double tau = 0.0;
  double stage1_fraction = 0.5;
};

// Starts from `base` and overwrites the keys present in `json`. Unknown keys
// and wrongly typed values are errors.
absl::StatusOr<ConfigValues> MergeConfigJson(std::string_view json,
                                             const ConfigValues& base);
std::string ConfigValuesToJson(const ConfigValues& values);

absl::StatusOr<EstimatorConfig> ToEstimatorConfig(const ConfigValues& values,
                                                  size_t dim);
absl::StatusOr<WmeConfig> ToWmeConfig(const ConfigValues& values, size_t dim);

// Full audit trail: outputs, parameters, sensitivity report, solver state.
std::string EstimationResultToJson(const EstimationResult& result);

}  // namespace huberdp

#endif  // HUBERDP_SERIALIZATION_H_
