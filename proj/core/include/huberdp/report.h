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

#ifndef HUBERDP_REPORT_H_
#define HUBERDP_REPORT_H_

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "huberdp/experiments.h"

namespace huberdp {

inline constexpr std::string_view kSweepCsvHeader =
    "method,dist,d,n,m_or_gamma,trials,mse_mean,mse_stderr,tuned_param";

// Numbers use the shortest round-trip form, so equal tables give identical
// bytes. A missing tuned_param is an empty field; failed cells print "nan".
void WriteCsv(std::span<const SweepRow> rows, std::ostream& out);
absl::StatusOr<std::vector<SweepRow>> ReadCsv(std::istream& in);

// Writes to `path`, or to stdout when path is empty or "-".
absl::Status EmitCsv(std::span<const SweepRow> rows, const std::string& path);

// Standalone SVG with log-scaled axes: MSE against m (or gamma), one series
// per (method, dist, d, n). Rows with non-positive or non-finite values are
// skipped.
void WritePlotSvg(std::span<const SweepRow> rows, std::string_view title,
                  std::ostream& out);
absl::Status EmitPlot(std::span<const SweepRow> rows, std::string_view title,
                      const std::string& path);

}  // namespace huberdp

#endif  // HUBERDP_REPORT_H_
