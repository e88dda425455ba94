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

#ifndef HUBERDP_RANDOM_H_
#define HUBERDP_RANDOM_H_

#include <cstdint>
#include <limits>

namespace huberdp {

// Counter-based generator: the i-th draw is a bijective 64-bit mix of
// (key, i), so any draw can be reproduced from the seed and its position
// alone. Satisfies UniformRandomBitGenerator and can drive the <random>
// distributions.
class CounterRng {
 public:
  using result_type = uint64_t;

  explicit CounterRng(uint64_t seed, uint64_t stream = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()();

  uint64_t counter() const { return counter_; }

 private:
  uint64_t key_;
  uint64_t counter_ = 0;
};

// 64-bit finalizer from SplitMix64.
uint64_t Mix64(uint64_t x);

// Derives an independent seed for (cell, trial) from a master seed.
uint64_t DeriveSeed(uint64_t master_seed, uint64_t cell_id, uint64_t trial_id);

// Draws from a zero-mean Gaussian with the given standard deviation.
double SampleGaussian(CounterRng& rng, double stddev);

// Draws from a zero-mean Laplace distribution with the given scale.
double SampleLaplace(CounterRng& rng, double scale);

}  // namespace huberdp

#endif  // HUBERDP_RANDOM_H_
