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

#ifndef HUBERDP_STATUS_MACROS_H_
#define HUBERDP_STATUS_MACROS_H_

#include <utility>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

#define HUBERDP_CONCAT_INNER_(a, b) a##b
#define HUBERDP_CONCAT_(a, b) HUBERDP_CONCAT_INNER_(a, b)

#define HUBERDP_RETURN_IF_ERROR(expr)              \
  do {                                             \
    const ::absl::Status huberdp_status_ = (expr); \
    if (!huberdp_status_.ok()) return huberdp_status_; \
  } while (0)

#define HUBERDP_ASSIGN_OR_RETURN_IMPL_(tmp, lhs, expr) \
  auto tmp = (expr);                                   \
  if (!tmp.ok()) return std::move(tmp).status();       \
  lhs = std::move(tmp).value()

#define HUBERDP_ASSIGN_OR_RETURN(lhs, expr) \
  HUBERDP_ASSIGN_OR_RETURN_IMPL_(           \
      HUBERDP_CONCAT_(huberdp_statusor_, __LINE__), lhs, expr)

#endif  // HUBERDP_STATUS_MACROS_H_
