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

#include "gmpr/csv_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <unistd.h>

#include "gmpr/error.hpp"

namespace gmpr {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto p = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, p == std::string::npos ? std::string::npos : p - start)));
    if (p == std::string::npos) break;
    start = p + 1;
  }
  return out;
}

bool parse_number(const std::string& s, double& v) {
  if (s.empty()) return false;
  const char* b = s.data();
  const char* e = b + s.size();
  if (*b == '+') ++b;
  const auto r = std::from_chars(b, e, v);
  return r.ec == std::errc() && r.ptr == e;
}

bool parse_integer(const std::string& s, long long& v) {
  if (s.empty()) return false;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

std::string where(std::size_t line, std::size_t col) {
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

CsvData parse_csv(std::istream& in, const std::optional<std::string>& label_column) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_of;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    rows.push_back(split(line));
    line_of.push_back(lineno);
  }
  if (rows.empty()) throw Error(ErrorCode::EmptyInput, "CSV has no rows");

  std::vector<std::string> header;
  bool has_header = false;
  for (const auto& cell : rows.front()) {
    double v;
    if (!parse_number(cell, v)) has_header = true;
  }
  std::size_t first = 0;
  const std::size_t width = rows.front().size();
  if (has_header) {
    header = rows.front();
    first = 1;
  }

  std::optional<std::size_t> label_idx;
  if (label_column) {
    long long idx;
    if (has_header) {
      auto it = std::find(header.begin(), header.end(), *label_column);
      if (it != header.end()) label_idx = static_cast<std::size_t>(it - header.begin());
    }
    if (!label_idx && parse_integer(*label_column, idx) && idx >= 0 && static_cast<std::size_t>(idx) < width)
      label_idx = static_cast<std::size_t>(idx);
    if (!label_idx) throw Error(ErrorCode::InvalidConfig, "label column '" + *label_column + "' not found");
  }

  const std::size_t n = rows.size() - first;
  if (n == 0) throw Error(ErrorCode::EmptyInput, "CSV has a header but no data rows");
  const std::size_t d = width - (label_idx ? 1 : 0);
  if (d == 0) throw Error(ErrorCode::EmptyInput, "CSV has no feature columns");
  RowMatrix pts(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  std::vector<std::string> raw_labels;
  for (std::size_t r = first; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::size_t ln = line_of[r];
    if (row.size() != width)
      throw Error(ErrorCode::RaggedRows,
                  "line " + std::to_string(ln) + " has " + std::to_string(row.size()) + " fields, expected " +
                      std::to_string(width),
                  static_cast<long long>(ln));
    std::size_t out_c = 0;
    for (std::size_t c = 0; c < width; ++c) {
      if (label_idx && c == *label_idx) {
        if (row[c].empty()) throw Error(ErrorCode::ParseError, where(ln, c + 1) + ": empty label", static_cast<long long>(ln));
        raw_labels.push_back(row[c]);
        continue;
      }
      double v;
      if (!parse_number(row[c], v))
        throw Error(ErrorCode::ParseError, where(ln, c + 1) + ": '" + row[c] + "' is not a number",
                    static_cast<long long>(ln));
      if (!std::isfinite(v))
        throw Error(ErrorCode::NonNumericFeature, where(ln, c + 1) + ": feature is not finite",
                    static_cast<long long>(ln));
      pts(static_cast<Eigen::Index>(r - first), static_cast<Eigen::Index>(out_c++)) = v;
    }
  }

  std::vector<std::string> names;
  for (std::size_t c = 0, k = 0; c < width; ++c) {
    if (label_idx && c == *label_idx) continue;
    names.push_back(has_header ? header[c] : "x" + std::to_string(k));
    ++k;
  }

  std::optional<std::vector<int>> labels;
  std::vector<std::string> label_names;
  if (label_idx) {
    bool all_int = true;
    for (const auto& s : raw_labels) {
      long long v;
      all_int = all_int && parse_integer(s, v);
    }
    std::vector<std::string> uniq(raw_labels);
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    if (all_int)
      std::sort(uniq.begin(), uniq.end(), [](const std::string& a, const std::string& b) {
        return std::stoll(a) < std::stoll(b);
      });
    std::map<std::string, int> id;
    for (std::size_t i = 0; i < uniq.size(); ++i) id[uniq[i]] = static_cast<int>(i);
    std::vector<int> lab;
    for (const auto& s : raw_labels) lab.push_back(id[s]);
    labels = std::move(lab);
    label_names = std::move(uniq);
  }
  return CsvData{Dataset(std::move(pts), std::move(labels)), std::move(names), std::move(label_names)};
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::Io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

CsvData load_csv(const std::string& path, const std::optional<std::string>& label_column) {
  std::istringstream in(read_file(path));
  return parse_csv(in, label_column);
}

RelationSet parse_relations(std::istream& in, std::optional<Index> n) {
  RelationSet rel;
  std::string line;
  long long lineno = 0;
  Index max_index = -1;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    if (trim(line).empty()) continue;
    const auto f = split(line);
    long long a, b;
    if (f.size() != 3 || (f[0] != "ml" && f[0] != "cl") || !parse_integer(f[1], a) || !parse_integer(f[2], b))
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": expected ml,i,j or cl,a,b", lineno);
    if (a < 0 || b < 0)
      throw Error(ErrorCode::IndexOutOfRange, "line " + std::to_string(lineno) + ": negative index", lineno);
    (f[0] == "ml" ? rel.must : rel.cannot).push_back({static_cast<Index>(a), static_cast<Index>(b)});
    max_index = std::max<Index>(max_index, std::max(a, b));
  }
  return validate_relations(rel, n ? *n : max_index + 1);
}

RelationSet load_relations(const std::string& path, std::optional<Index> n) {
  std::istringstream in(read_file(path));
  return parse_relations(in, n);
}

void write_relations(std::ostream& os, const RelationSet& rel) {
  for (const Pair& p : rel.must) os << "ml," << p.first << ',' << p.second << '\n';
  for (const Pair& p : rel.cannot) os << "cl," << p.first << ',' << p.second << '\n';
}

void write_points_csv(std::ostream& os, const RowMatrix& points, const std::vector<int>* labels,
                      const std::vector<std::string>* names) {
  for (Eigen::Index c = 0; c < points.cols(); ++c) {
    if (c) os << ',';
    os << (names ? (*names)[static_cast<std::size_t>(c)] : "x" + std::to_string(c));
  }
  if (labels) os << ",label";
  os << '\n';
  for (Eigen::Index r = 0; r < points.rows(); ++r) {
    for (Eigen::Index c = 0; c < points.cols(); ++c) {
      if (c) os << ',';
      os << format_double(points(r, c));
    }
    if (labels) os << ',' << (*labels)[static_cast<std::size_t>(r)];
    os << '\n';
  }
}

void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::Io, "cannot write '" + tmp.string() + "'");
    f << content;
    f.flush();
    if (!f) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error(ErrorCode::Io, "write to '" + tmp.string() + "' failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::Io, "cannot rename onto '" + path + "'");
  }
}

}  // namespace gmpr
