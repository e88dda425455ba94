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

#ifndef HUBERDP_DISTRIBUTIONS_H_
#define HUBERDP_DISTRIBUTIONS_H_

#include <cstddef>
#include <string>
#include <string_view>

#include "absl/status/statusor.h"
#include "huberdp/random.h"
#include "huberdp/vector_ops.h"

namespace huberdp {

enum class DistributionKind {
  kUniform,      // a = lo, b = hi
  kGaussian,     // a = mean, b = std
  kLomax,        // a = shape; density a / (1 + x)^(a + 1) on x >= 0
  kExponential,  // a = rate
  kConstant,     // a = value
};

// Product law with i.i.d. coordinates in R^dim.
struct DistributionSpec {
  DistributionKind kind = DistributionKind::kUniform;
  double a = -1.0;
  double b = 1.0;
  size_t dim = 1;
};

// Accepts "uniform[:lo:hi]", "gaussian[:mean:std]", "lomax:a",
// "exponential[:rate]" and "constant:c". Lomax needs a > 2 so that the
// variance is finite.
absl::StatusOr<DistributionSpec> ParseDistribution(std::string_view text,
                                                   size_t dim);

// Canonical text form, e.g. "lomax:4".
std::string DistributionName(const DistributionSpec& spec);

double CoordinateMean(const DistributionSpec& spec);
double CoordinateVariance(const DistributionSpec& spec);
Vector TrueMean(const DistributionSpec& spec);

bool IsBounded(const DistributionSpec& spec);

// Bound on |x| over the support; only meaningful when IsBounded.
double SupportBound(const DistributionSpec& spec);

// The support bound for bounded laws, otherwise
// 1 + |mu| + 3 sqrt(trace of the covariance).
double DefaultRadius(const DistributionSpec& spec);

double SampleCoordinate(const DistributionSpec& spec, CounterRng& rng);
Vector Sample(const DistributionSpec& spec, CounterRng& rng);

}  // namespace huberdp

#endif  // HUBERDP_DISTRIBUTIONS_H_
