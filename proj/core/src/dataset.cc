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

#include "huberdp/dataset.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <utility>

#include "absl/strings/ascii.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "nlohmann/json.hpp"

namespace huberdp {
namespace {

absl::Status ParseError(size_t line, absl::string_view what) {
  return absl::InvalidArgumentError(
      absl::StrCat("parse error: line ", line, ": ", what));
}

absl::Status DimensionError(size_t line, size_t expected, size_t got) {
  return absl::InvalidArgumentError(
      absl::StrCat("dimension error: line ", line, ": expected ", expected,
                   " coordinates, got ", got));
}

bool ParseDouble(absl::string_view text, double& out) {
  text = absl::StripAsciiWhitespace(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return false;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

std::string FormatDouble(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

// Accumulates samples by user id in first-appearance order.
class ShardBuilder {
 public:
  void Add(const std::string& id, Vector sample) {
    auto [it, inserted] = index_.emplace(id, ids_.size());
    if (inserted) {
      ids_.push_back(id);
      shards_.emplace_back();
    }
    shards_[it->second].push_back(std::move(sample));
  }

  // Registers a user even if it contributes no samples, so that validation
  // can report it.
  void Touch(const std::string& id) {
    auto [it, inserted] = index_.emplace(id, ids_.size());
    if (inserted) {
      ids_.push_back(id);
      shards_.emplace_back();
    }
  }

  absl::StatusOr<UserDataset> Build() && {
    return UserDataset::Create(std::move(ids_), std::move(shards_));
  }

 private:
  std::unordered_map<std::string, size_t> index_;
  std::vector<std::string> ids_;
  std::vector<std::vector<Vector>> shards_;
};

absl::StatusOr<UserDataset> ReadCsv(std::istream& in) {
  std::string line;
  size_t line_no = 0;
  size_t dim = 0;
  bool have_header = false;
  ShardBuilder builder;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (absl::StripAsciiWhitespace(line).empty()) continue;
    std::vector<absl::string_view> fields = absl::StrSplit(line, ',');
    if (!have_header) {
      if (absl::StripAsciiWhitespace(fields[0]) != "user_id") {
        return ParseError(line_no, "expected header starting with user_id");
      }
      if (fields.size() < 2) {
        return ParseError(line_no, "header declares no coordinates");
      }
      dim = fields.size() - 1;
      have_header = true;
      continue;
    }
    if (fields.size() != dim + 1) {
      return DimensionError(line_no, dim, fields.size() - 1);
    }
    const std::string id(absl::StripAsciiWhitespace(fields[0]));
    if (id.empty()) return ParseError(line_no, "empty user_id");
    Vector sample(dim);
    for (size_t j = 0; j < dim; ++j) {
      if (!ParseDouble(fields[j + 1], sample[j])) {
        return ParseError(line_no, absl::StrCat("not a number: '",
                                                fields[j + 1], "'"));
      }
    }
    builder.Add(id, std::move(sample));
  }
  if (!have_header) return ParseError(line_no, "empty input");
  return std::move(builder).Build();
}

absl::StatusOr<UserDataset> ReadJsonl(std::istream& in) {
  std::string line;
  size_t line_no = 0;
  size_t dim = 0;
  bool seen_any = false;
  ShardBuilder builder;
  while (std::getline(in, line)) {
    ++line_no;
    if (absl::StripAsciiWhitespace(line).empty()) continue;
    seen_any = true;
    nlohmann::json record = nlohmann::json::parse(line, nullptr, false);
    if (record.is_discarded() || !record.is_object()) {
      return ParseError(line_no, "not a JSON object");
    }
    if (!record.contains("id") || !record.contains("rows") ||
        !record["rows"].is_array()) {
      return ParseError(line_no, "record needs \"id\" and \"rows\" array");
    }
    const nlohmann::json& id_field = record["id"];
    const std::string id = id_field.is_string() ? id_field.get<std::string>()
                                                : id_field.dump();
    builder.Touch(id);
    for (const nlohmann::json& row : record["rows"]) {
      if (!row.is_array()) return ParseError(line_no, "row is not an array");
      if (dim == 0) dim = row.size();
      if (row.size() != dim) return DimensionError(line_no, dim, row.size());
      Vector sample;
      sample.reserve(dim);
      for (const nlohmann::json& v : row) {
        if (!v.is_number()) return ParseError(line_no, "non-numeric entry");
        sample.push_back(v.get<double>());
      }
      builder.Add(id, std::move(sample));
    }
  }
  if (!seen_any) return ParseError(line_no, "empty input");
  return std::move(builder).Build();
}

}  // namespace

absl::StatusOr<UserDataset> UserDataset::Create(
    std::vector<std::string> ids, std::vector<std::vector<Vector>> shards) {
  if (shards.empty()) {
    return absl::InvalidArgumentError("validation error: dataset has no users");
  }
  if (ids.empty()) {
    ids.reserve(shards.size());
    for (size_t i = 0; i < shards.size(); ++i) ids.push_back(absl::StrCat(i));
  }
  if (ids.size() != shards.size()) {
    return absl::InvalidArgumentError(
        "validation error: id count does not match shard count");
  }
  UserDataset ds;
  for (size_t i = 0; i < shards.size(); ++i) {
    if (shards[i].empty()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "validation error: user '", ids[i], "' has no samples"));
    }
    for (const Vector& x : shards[i]) {
      if (ds.dim_ == 0) ds.dim_ = x.size();
      if (x.size() != ds.dim_ || x.empty()) {
        return absl::InvalidArgumentError(absl::StrCat(
            "dimension error: user '", ids[i], "' has a sample of dimension ",
            x.size(), ", expected ", ds.dim_));
      }
      if (!AllFinite(x)) {
        return absl::InvalidArgumentError(absl::StrCat(
            "validation error: user '", ids[i], "' has a non-finite value"));
      }
    }
    ds.total_ += shards[i].size();
  }
  ds.ids_ = std::move(ids);
  ds.shards_ = std::move(shards);
  return ds;
}

std::vector<size_t> UserDataset::sizes() const {
  std::vector<size_t> out;
  out.reserve(shards_.size());
  for (const auto& s : shards_) out.push_back(s.size());
  return out;
}

absl::StatusOr<DatasetFormat> ParseDatasetFormat(std::string_view name) {
  if (name == "csv" || name == "csv-long") return DatasetFormat::kCsvLong;
  if (name == "jsonl" || name == "jsonl-shards") {
    return DatasetFormat::kJsonlShards;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown dataset format '", std::string(name), "'"));
}

std::string_view DatasetFormatName(DatasetFormat format) {
  return format == DatasetFormat::kCsvLong ? "csv-long" : "jsonl-shards";
}

absl::StatusOr<UserDataset> ReadDataset(std::istream& in,
                                        DatasetFormat format) {
  return format == DatasetFormat::kCsvLong ? ReadCsv(in) : ReadJsonl(in);
}

absl::StatusOr<UserDataset> LoadDataset(const std::string& path,
                                        DatasetFormat format) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  return ReadDataset(in, format);
}

absl::Status WriteDataset(const UserDataset& dataset, DatasetFormat format,
                          std::ostream& out) {
  if (format == DatasetFormat::kCsvLong) {
    out << "user_id";
    for (size_t j = 0; j < dataset.dim(); ++j) out << ",x_" << j;
    out << '\n';
    for (size_t i = 0; i < dataset.num_users(); ++i) {
      for (const Vector& x : dataset.shard(i)) {
        out << dataset.user_id(i);
        for (double v : x) out << ',' << FormatDouble(v);
        out << '\n';
      }
    }
  } else {
    for (size_t i = 0; i < dataset.num_users(); ++i) {
      nlohmann::json record;
      record["id"] = dataset.user_id(i);
      record["rows"] = dataset.shard(i);
      out << record.dump() << '\n';
    }
  }
  if (!out) return absl::DataLossError("write failed");
  return absl::OkStatus();
}

absl::Status ExportDataset(const UserDataset& dataset, const std::string& path,
                           DatasetFormat format) {
  std::ofstream out(path);
  if (!out) {
    return absl::PermissionDeniedError(
        absl::StrCat("io error: cannot write ", path));
  }
  return WriteDataset(dataset, format, out);
}

std::vector<UserSummary> UserMeans(const UserDataset& dataset) {
  std::vector<UserSummary> out;
  out.reserve(dataset.num_users());
  for (const auto& shard : dataset.shards()) {
    UserSummary s;
    s.size = shard.size();
    s.mean.assign(dataset.dim(), 0.0);
    for (const Vector& x : shard) AddScaled(s.mean, 1.0, x);
    for (double& v : s.mean) v /= static_cast<double>(s.size);
    out.push_back(std::move(s));
  }
  return out;
}

ImbalanceProfile ImbalanceDegree(std::span<const size_t> sizes) {
  ImbalanceProfile profile;
  if (sizes.empty() ||
      std::any_of(sizes.begin(), sizes.end(), [](size_t m) { return m == 0; })) {
    return profile;
  }
  std::vector<size_t> sorted(sizes.begin(), sizes.end());
  std::sort(sorted.begin(), sorted.end());
  const size_t n = sorted.size();
  const double total = std::accumulate(sorted.begin(), sorted.end(), 0.0);
  const double nd = static_cast<double>(n);

  // The tail mass only changes when the cap gamma*N/n crosses a size, so the
  // smallest admissible gamma is 1 or one of m_j * n / N. Comparisons are
  // done on integers so that a cap sitting exactly on a size is exact.
  const unsigned __int128 n128 = n;
  const unsigned __int128 total128 = static_cast<size_t>(total);
  auto accept = [&](size_t cut, double gamma) {
    size_t tail = 0;
    for (size_t i = cut; i < n; ++i) tail += sorted[i];
    if (2.0 * static_cast<double>(tail) > total) return false;
    profile.gamma = gamma;
    profile.capped_size = gamma * total / nd;
    profile.cut_index = cut;
    profile.tail_mass = tail;
    profile.valid = true;
    return true;
  };

  // gamma = 1: users with m_i * n > N are above the cap.
  size_t cut = 0;
  while (cut < n && sorted[cut] * n128 <= total128) ++cut;
  if (accept(cut, 1.0)) return profile;

  for (size_t j = 0; j < n; ++j) {
    if (j + 1 < n && sorted[j + 1] == sorted[j]) continue;
    if (sorted[j] * n128 < total128) continue;  // gamma_j < 1
    if (accept(j + 1, static_cast<double>(sorted[j]) * nd / total)) {
      return profile;
    }
  }
  return profile;  // unreachable: the largest candidate empties the tail
}

}  // namespace huberdp
