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

#include "huberdp/distributions.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"

namespace huberdp {
namespace {

absl::Status Bad(std::string_view text, std::string_view why) {
  return absl::InvalidArgumentError(absl::StrCat(
      "bad distribution '", std::string(text), "': ", std::string(why)));
}

bool ToDouble(absl::string_view s, double& out) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

std::string Num(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

double Uniform01(CounterRng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace

absl::StatusOr<DistributionSpec> ParseDistribution(std::string_view text,
                                                   size_t dim) {
  if (dim < 1) return Bad(text, "dimension must be at least 1");
  const std::vector<absl::string_view> parts =
      absl::StrSplit(absl::string_view(text.data(), text.size()), ':');
  std::vector<double> args;
  for (size_t i = 1; i < parts.size(); ++i) {
    double v;
    if (!ToDouble(parts[i], v)) return Bad(text, "parameter is not a number");
    args.push_back(v);
  }
  DistributionSpec spec;
  spec.dim = dim;
  const absl::string_view kind = parts[0];
  auto arity = [&](size_t allowed_a, size_t allowed_b) {
    return args.size() == allowed_a || args.size() == allowed_b;
  };
  if (kind == "uniform") {
    if (!arity(0, 2)) return Bad(text, "expected uniform or uniform:lo:hi");
    if (args.size() == 2) {
      spec.a = args[0];
      spec.b = args[1];
    }
    if (!(spec.b > spec.a)) return Bad(text, "need lo < hi");
    spec.kind = DistributionKind::kUniform;
  } else if (kind == "gaussian") {
    if (!arity(0, 2)) return Bad(text, "expected gaussian or gaussian:mean:std");
    spec.kind = DistributionKind::kGaussian;
    spec.a = args.empty() ? 0.0 : args[0];
    spec.b = args.empty() ? 1.0 : args[1];
    if (!(spec.b >= 0.0)) return Bad(text, "std must be nonnegative");
  } else if (kind == "lomax") {
    if (args.size() != 1) return Bad(text, "expected lomax:a");
    spec.kind = DistributionKind::kLomax;
    spec.a = args[0];
    spec.b = 0.0;
    if (!(spec.a > 2.0)) return Bad(text, "lomax needs a > 2");
  } else if (kind == "exponential") {
    if (!arity(0, 1)) return Bad(text, "expected exponential or exponential:rate");
    spec.kind = DistributionKind::kExponential;
    spec.a = args.empty() ? 1.0 : args[0];
    spec.b = 0.0;
    if (!(spec.a > 0.0)) return Bad(text, "rate must be positive");
  } else if (kind == "constant") {
    if (args.size() != 1) return Bad(text, "expected constant:c");
    spec.kind = DistributionKind::kConstant;
    spec.a = args[0];
    spec.b = 0.0;
  } else {
    return Bad(text, "unknown kind");
  }
  return spec;
}

std::string DistributionName(const DistributionSpec& spec) {
  switch (spec.kind) {
    case DistributionKind::kUniform:
      return absl::StrCat("uniform:", Num(spec.a), ":", Num(spec.b));
    case DistributionKind::kGaussian:
      return absl::StrCat("gaussian:", Num(spec.a), ":", Num(spec.b));
    case DistributionKind::kLomax:
      return absl::StrCat("lomax:", Num(spec.a));
    case DistributionKind::kExponential:
      return absl::StrCat("exponential:", Num(spec.a));
    case DistributionKind::kConstant:
      return absl::StrCat("constant:", Num(spec.a));
  }
  return "unknown";
}

double CoordinateMean(const DistributionSpec& spec) {
  switch (spec.kind) {
    case DistributionKind::kUniform:
      return 0.5 * (spec.a + spec.b);
    case DistributionKind::kGaussian:
    case DistributionKind::kConstant:
      return spec.a;
    case DistributionKind::kLomax:
      return 1.0 / (spec.a - 1.0);
    case DistributionKind::kExponential:
      return 1.0 / spec.a;
  }
  return 0.0;
}

double CoordinateVariance(const DistributionSpec& spec) {
  switch (spec.kind) {
    case DistributionKind::kUniform:
      return (spec.b - spec.a) * (spec.b - spec.a) / 12.0;
    case DistributionKind::kGaussian:
      return spec.b * spec.b;
    case DistributionKind::kConstant:
      return 0.0;
    case DistributionKind::kLomax:
      return spec.a / ((spec.a - 1.0) * (spec.a - 1.0) * (spec.a - 2.0));
    case DistributionKind::kExponential:
      return 1.0 / (spec.a * spec.a);
  }
  return 0.0;
}

Vector TrueMean(const DistributionSpec& spec) {
  return Vector(spec.dim, CoordinateMean(spec));
}

bool IsBounded(const DistributionSpec& spec) {
  return spec.kind == DistributionKind::kUniform ||
         spec.kind == DistributionKind::kConstant ||
         (spec.kind == DistributionKind::kGaussian && spec.b == 0.0);
}

double SupportBound(const DistributionSpec& spec) {
  const double root_d = std::sqrt(static_cast<double>(spec.dim));
  switch (spec.kind) {
    case DistributionKind::kUniform:
      return std::max(std::abs(spec.a), std::abs(spec.b)) * root_d;
    case DistributionKind::kGaussian:
    case DistributionKind::kConstant:
      return std::abs(spec.a) * root_d;
    default:
      return std::numeric_limits<double>::infinity();
  }
}

double DefaultRadius(const DistributionSpec& spec) {
  if (IsBounded(spec)) {
    // A point mass at the origin still needs a positive radius.
    return std::max(SupportBound(spec), 1e-12);
  }
  const double d = static_cast<double>(spec.dim);
  return 1.0 + Norm(TrueMean(spec)) + 3.0 * std::sqrt(d * CoordinateVariance(spec));
}

double SampleCoordinate(const DistributionSpec& spec, CounterRng& rng) {
  switch (spec.kind) {
    case DistributionKind::kUniform:
      return spec.a + (spec.b - spec.a) * Uniform01(rng);
    case DistributionKind::kGaussian:
      return spec.a + SampleGaussian(rng, spec.b);
    case DistributionKind::kLomax:
      return std::pow(1.0 - Uniform01(rng), -1.0 / spec.a) - 1.0;
    case DistributionKind::kExponential:
      return -std::log1p(-Uniform01(rng)) / spec.a;
    case DistributionKind::kConstant:
      return spec.a;
  }
  return 0.0;
}

Vector Sample(const DistributionSpec& spec, CounterRng& rng) {
  Vector x(spec.dim);
  for (double& v : x) v = SampleCoordinate(spec, rng);
  return x;
}

}  // namespace huberdp
