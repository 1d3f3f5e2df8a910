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

#include "gmpr/model_io.hpp"

#include <json.hpp>

#include "gmpr/error.hpp"

namespace gmpr {

namespace {

using nlohmann::json;

json vec_json(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

json mat_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index c = 0; c < m.cols(); ++c) row[c] = m(r, c);
    rows.push_back(row);
  }
  return rows;
}

json class_json(const SubMixture& s) {
  json means = json::array();
  json covs = json::array();
  for (const Vector& mu : s.means) means.push_back(vec_json(mu));
  for (const Matrix& c : s.covs) covs.push_back(mat_json(c));
  return json{{"pi", vec_json(s.pi)}, {"means", means}, {"covs", covs}};
}

std::string dump(const char* kind, const HierModel& h) {
  json classes = json::array();
  for (int m = 0; m < h.classes(); ++m) classes.push_back(class_json(h.sub(m)));
  json doc{{"version", kModelSchemaVersion}, {"kind", kind},        {"M", h.classes()},
           {"d", h.dim()},                  {"alpha", vec_json(h.alpha())}, {"classes", classes}};
  return doc.dump(2);
}

[[noreturn]] void schema(const std::string& what) { throw Error(ErrorCode::SchemaMismatch, "model document: " + what); }

Vector parse_vec(const json& j, Eigen::Index expect, const char* what) {
  if (!j.is_array()) schema(std::string(what) + " must be an array");
  if (expect >= 0 && static_cast<Eigen::Index>(j.size()) != expect) schema(std::string(what) + " has wrong length");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) {
    if (!j[k].is_number()) schema(std::string(what) + " must hold numbers");
    v[static_cast<Eigen::Index>(k)] = j[k].get<double>();
  }
  return v;
}

Matrix parse_mat(const json& j, Eigen::Index d) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != d) schema("covariance must be d rows");
  Matrix m(d, d);
  for (Eigen::Index r = 0; r < d; ++r) m.row(r) = parse_vec(j[r], d, "covariance row").transpose();
  return m;
}

}  // namespace

std::string serialize_model(const FlatModel& model) { return dump("flat", HierModel::from_flat(model)); }

std::string serialize_model(const HierModel& model) { return dump("hier", model); }

std::string serialize_model(const AnyModel& model) {
  return std::visit([](const auto& m) { return serialize_model(m); }, model);
}

AnyModel deserialize_model(const std::string& document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    schema(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) schema("top level must be an object");
  for (const char* key : {"version", "kind", "M", "d", "alpha", "classes"}) {
    if (!doc.contains(key)) schema(std::string("missing field '") + key + "'");
  }
  if (!doc["version"].is_number_integer() || doc["version"].get<int>() != kModelSchemaVersion) {
    schema("unsupported version");
  }
  if (!doc["kind"].is_string()) schema("kind must be a string");
  const std::string kind = doc["kind"].get<std::string>();
  if (kind != "flat" && kind != "hier") schema("kind must be 'flat' or 'hier'");
  if (!doc["M"].is_number_integer() || !doc["d"].is_number_integer()) schema("M and d must be integers");
  const auto M = doc["M"].get<Eigen::Index>();
  const auto d = doc["d"].get<Eigen::Index>();
  if (M < 1 || d < 1) schema("M and d must be positive");
  Vector alpha = parse_vec(doc["alpha"], M, "alpha");
  const json& cj = doc["classes"];
  if (!cj.is_array() || static_cast<Eigen::Index>(cj.size()) != M) schema("classes must have M entries");

  std::vector<SubMixture> classes;
  for (const json& c : cj) {
    if (!c.is_object() || !c.contains("pi") || !c.contains("means") || !c.contains("covs")) {
      schema("class entries need pi, means and covs");
    }
    SubMixture s;
    s.pi = parse_vec(c["pi"], -1, "pi");
    const auto K = s.pi.size();
    if (K < 1) schema("pi must be non-empty");
    if (kind == "flat" && K != 1) schema("flat models carry exactly one cluster per class");
    if (!c["means"].is_array() || static_cast<Eigen::Index>(c["means"].size()) != K) schema("means count != pi");
    if (!c["covs"].is_array() || static_cast<Eigen::Index>(c["covs"].size()) != K) schema("covs count != pi");
    for (Eigen::Index k = 0; k < K; ++k) {
      s.means.push_back(parse_vec(c["means"][k], d, "mean"));
      s.covs.push_back(parse_mat(c["covs"][k], d));
    }
    classes.push_back(std::move(s));
  }
  HierModel h(std::move(alpha), std::move(classes));
  if (kind == "flat") return h.to_flat();
  return h;
}

HierModel as_hier(const AnyModel& model) {
  if (const auto* f = std::get_if<FlatModel>(&model)) return HierModel::from_flat(*f);
  return std::get<HierModel>(model);
}

}  // namespace gmpr
