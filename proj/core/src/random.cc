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

#include "huberdp/random.h"

#include <random>

namespace huberdp {

uint64_t Mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

CounterRng::CounterRng(uint64_t seed, uint64_t stream)
    : key_(Mix64(seed ^ Mix64(stream + 0x632be59bd9b4e019ULL))) {}

CounterRng::result_type CounterRng::operator()() {
  // Weyl sequence on the key followed by a strong finalizer.
  const uint64_t x = key_ + (++counter_) * 0xd1b54a32d192ed03ULL;
  return Mix64(x ^ (x >> 29));
}

uint64_t DeriveSeed(uint64_t master_seed, uint64_t cell_id,
                    uint64_t trial_id) {
  return Mix64(Mix64(Mix64(master_seed) ^ cell_id) + trial_id);
}

double SampleGaussian(CounterRng& rng, double stddev) {
  if (stddev == 0.0) return 0.0;
  std::normal_distribution<double> normal(0.0, stddev);
  return normal(rng);
}

double SampleLaplace(CounterRng& rng, double scale) {
  std::exponential_distribution<double> exponential(1.0);
  return scale * (exponential(rng) - exponential(rng));
}

}  // namespace huberdp
