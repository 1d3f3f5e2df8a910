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

// Dataset CSV, relation files and atomic output. Indices in every file are 0-based; line and column numbers in
// error messages are 1-based.

#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "gmpr/model.hpp"

namespace gmpr {

struct CsvData {
  Dataset dataset;
  std::vector<std::string> feature_names;  ///< from the header, or x0, x1, ...
  std::vector<std::string> label_names;    ///< label_names[id] is the original value of dense label id
};

/// A first row with any non-numeric cell is a header. `label_column` is a header name or a 0-based index. Label
/// values are mapped to dense ids in sorted order (numeric order when every value is an integer). Blank lines are
/// skipped. Throws ParseError, RaggedRows, NonNumericFeature (nan/inf), InvalidConfig (unknown label column), Io.
CsvData parse_csv(std::istream& in, const std::optional<std::string>& label_column = std::nullopt);
CsvData load_csv(const std::string& path, const std::optional<std::string>& label_column = std::nullopt);

/// Lines `ml,i,j` or `cl,a,b`; `#` starts a comment. Validated against `n` points when given, otherwise only the
/// self-pair and conflict rules apply. Throws ParseError (index = line) and the validate_relations errors.
RelationSet parse_relations(std::istream& in, std::optional<Index> n = std::nullopt);
RelationSet load_relations(const std::string& path, std::optional<Index> n = std::nullopt);
void write_relations(std::ostream& os, const RelationSet& rel);

/// Shortest round-trip decimal form.
std::string format_double(double v);

/// Header x0..x{d-1}[,label], one row per point.
void write_points_csv(std::ostream& os, const RowMatrix& points, const std::vector<int>* labels = nullptr,
                      const std::vector<std::string>* names = nullptr);

/// Writes to `path.tmp.<pid>` in the same directory, then renames. Throws Io.
void atomic_write(const std::string& path, const std::string& content);

std::string read_file(const std::string& path);

}  // namespace gmpr
