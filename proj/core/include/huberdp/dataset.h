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

#ifndef HUBERDP_DATASET_H_
#define HUBERDP_DATASET_H_

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "huberdp/vector_ops.h"

namespace huberdp {

// A dataset split into per-user shards. User i holds m_i >= 1 samples in R^d.
// Local sizes m_i are public metadata. User order is stable: index i always
// refers to the same shard, which is what user-level neighbouring compares.
// Immutable after construction.
class UserDataset {
 public:
  // Validates the invariants: at least one user, no empty shard, a common
  // dimension d >= 1 and finite coordinates. `ids` may be empty, in which
  // case users are named "0", "1", ...
  static absl::StatusOr<UserDataset> Create(
      std::vector<std::string> ids, std::vector<std::vector<Vector>> shards);

  size_t num_users() const { return shards_.size(); }
  size_t dim() const { return dim_; }
  size_t total_samples() const { return total_; }

  const std::vector<Vector>& shard(size_t i) const { return shards_[i]; }
  const std::string& user_id(size_t i) const { return ids_[i]; }
  const std::vector<std::vector<Vector>>& shards() const { return shards_; }

  // m_i in user order.
  std::vector<size_t> sizes() const;

 private:
  UserDataset() = default;

  std::vector<std::string> ids_;
  std::vector<std::vector<Vector>> shards_;
  size_t dim_ = 0;
  size_t total_ = 0;
};

// Per-user statistics consumed by the estimators. `weight` and `threshold`
// start at zero and are filled in by parameter selection.
struct UserSummary {
  Vector mean;
  size_t size = 0;
  double weight = 0.0;
  double threshold = 0.0;
};

// Degree of imbalance of a size profile: the smallest gamma >= 1 such that
// users with more than gamma * N / n samples hold at most N / 2 samples.
struct ImbalanceProfile {
  double gamma = 1.0;
  // gamma * N / n.
  double capped_size = 0.0;
  // First index, in ascending size order, of a user above the cap;
  // equals n when no user is above it.
  size_t cut_index = 0;
  // Samples held by users at or after cut_index.
  size_t tail_mass = 0;
  bool valid = false;
};

enum class DatasetFormat {
  // Header `user_id,x_0,...,x_{d-1}`, one sample per row.
  kCsvLong,
  // One JSON object per line: {"id": ..., "rows": [[...], ...]}.
  kJsonlShards,
};

absl::StatusOr<DatasetFormat> ParseDatasetFormat(std::string_view name);
std::string_view DatasetFormatName(DatasetFormat format);

// Shards are grouped by user id in order of first appearance. Errors carry a
// "parse error", "dimension error" or "validation error" prefix and, where
// applicable, the offending line number.
absl::StatusOr<UserDataset> ReadDataset(std::istream& in, DatasetFormat format);
absl::StatusOr<UserDataset> LoadDataset(const std::string& path,
                                        DatasetFormat format);

// Writes with shortest round-trip formatting, so reading the output back
// reproduces every coordinate exactly.
absl::Status WriteDataset(const UserDataset& dataset, DatasetFormat format,
                          std::ostream& out);
absl::Status ExportDataset(const UserDataset& dataset, const std::string& path,
                           DatasetFormat format);

// y_i = (1/m_i) * sum of user i's samples, with size m_i. Weights and
// thresholds are left unset.
std::vector<UserSummary> UserMeans(const UserDataset& dataset);

// Permutation- and scale-invariant in `sizes`. Sizes must be nonempty and
// positive; zero entries are treated as invalid and produce valid=false.
ImbalanceProfile ImbalanceDegree(std::span<const size_t> sizes);

}  // namespace huberdp

#endif  // HUBERDP_DATASET_H_
