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

#ifndef HUBERDP_VECTOR_OPS_H_
#define HUBERDP_VECTOR_OPS_H_

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace huberdp {

// Dense real vector. Dimensions in this library are small (d is rarely more
// than a few dozen), so a plain std::vector is used throughout.
using Vector = std::vector<double>;

inline double Dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double Norm(std::span<const double> a) { return std::sqrt(Dot(a, a)); }

inline double Distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double t = a[i] - b[i];
    s += t * t;
  }
  return std::sqrt(s);
}

// acc += scale * x
inline void AddScaled(Vector& acc, double scale, std::span<const double> x) {
  for (size_t i = 0; i < acc.size(); ++i) acc[i] += scale * x[i];
}

inline Vector Subtract(std::span<const double> a, std::span<const double> b) {
  Vector out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

inline Vector Scaled(std::span<const double> a, double s) {
  Vector out(a.begin(), a.end());
  for (double& v : out) v *= s;
  return out;
}

inline bool AllFinite(std::span<const double> a) {
  for (double v : a) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace huberdp

#endif  // HUBERDP_VECTOR_OPS_H_
