// Copyright 2026 The gmpr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not use this file except in compliance with
// the License. You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License is distributed on
// an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the License for the
// specific language governing permissions and limitations under the License.

// Versioned JSON model documents:
//   {"version": 1, "kind": "flat"|"hier", "M": int, "d": int, "alpha": [..],
//    "classes": [{"pi": [..], "means": [[..]..], "covs": [[[..]..]..]}]}
// A flat model stores one cluster per class with pi = [1].

#pragma once

#include <string>
#include <variant>

#include "gmpr/model.hpp"

namespace gmpr {

inline constexpr int kModelSchemaVersion = 1;

using AnyModel = std::variant<FlatModel, HierModel>;

std::string serialize_model(const FlatModel& model);
std::string serialize_model(const HierModel& model);
std::string serialize_model(const AnyModel& model);

/// Throws SchemaMismatch (bad JSON, version, kind, shapes) or InvariantViolation (parameter invariants).
AnyModel deserialize_model(const std::string& document);

/// Hierarchical view of either model kind.
HierModel as_hier(const AnyModel& model);

}  // namespace gmpr
