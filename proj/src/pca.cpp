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

#include "gmpr/pca.hpp"

#include <algorithm>

#include <json.hpp>

#include "gmpr/error.hpp"

namespace gmpr {

PcaTransform fit_pca(const Dataset& data, int k) {
  const int d = data.d();
  if (k < 1 || k > d || k > data.n()) throw Error(ErrorCode::KTooLarge, "k must be in [1, min(N, d)]");
  PcaTransform t;
  t.mean = data.points().colwise().mean().transpose();
  const RowMatrix centered = data.points().rowwise() - t.mean.transpose();
  const Matrix cov = (centered.transpose() * centered) / static_cast<double>(data.n());
  Eigen::SelfAdjointEigenSolver<Matrix> es(cov);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::NotFinite, "eigendecomposition failed");
  t.components.resize(k, d);
  t.eigenvalues.resize(k);
  for (int r = 0; r < k; ++r) {
    const int c = d - 1 - r;  // ascending order from the solver
    Vector v = es.eigenvectors().col(c);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v[arg] < 0) v = -v;
    t.components.row(r) = v.transpose();
    t.eigenvalues[r] = std::max(0.0, es.eigenvalues()[c]);
  }
  return t;
}

RowMatrix apply_pca(const PcaTransform& t, const RowMatrix& points) {
  if (points.cols() != t.mean.size()) throw Error(ErrorCode::DimensionMismatch, "point dimension != PCA dimension");
  return (points.rowwise() - t.mean.transpose()) * t.components.transpose();
}

std::string serialize_pca(const PcaTransform& t) {
  nlohmann::json j;
  j["version"] = 1;
  j["kind"] = "pca";
  j["d"] = t.mean.size();
  j["k"] = t.components.rows();
  j["mean"] = std::vector<double>(t.mean.data(), t.mean.data() + t.mean.size());
  j["eigenvalues"] = std::vector<double>(t.eigenvalues.data(), t.eigenvalues.data() + t.eigenvalues.size());
  auto rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < t.components.rows(); ++r) {
    std::vector<double> row(static_cast<std::size_t>(t.components.cols()));
    for (Eigen::Index c = 0; c < t.components.cols(); ++c) row[static_cast<std::size_t>(c)] = t.components(r, c);
    rows.push_back(row);
  }
  j["components"] = rows;
  return j.dump(2) + "\n";
}

PcaTransform deserialize_pca(const std::string& doc) {
  try {
    const auto j = nlohmann::json::parse(doc);
    if (j.at("version").get<int>() != 1 || j.at("kind").get<std::string>() != "pca")
      throw Error(ErrorCode::SchemaMismatch, "not a version-1 PCA document");
    const int d = j.at("d").get<int>();
    const int k = j.at("k").get<int>();
    const auto mean = j.at("mean").get<std::vector<double>>();
    const auto ev = j.at("eigenvalues").get<std::vector<double>>();
    const auto comps = j.at("components").get<std::vector<std::vector<double>>>();
    if (static_cast<int>(mean.size()) != d || static_cast<int>(ev.size()) != k || static_cast<int>(comps.size()) != k)
      throw Error(ErrorCode::SchemaMismatch, "PCA document sizes are inconsistent");
    PcaTransform t;
    t.mean = Eigen::Map<const Vector>(mean.data(), d);
    t.eigenvalues = Eigen::Map<const Vector>(ev.data(), k);
    t.components.resize(k, d);
    for (int r = 0; r < k; ++r) {
      if (static_cast<int>(comps[static_cast<std::size_t>(r)].size()) != d)
        throw Error(ErrorCode::SchemaMismatch, "PCA component length != d");
      for (int c = 0; c < d; ++c) t.components(r, c) = comps[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    }
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SchemaMismatch, std::string("bad PCA document: ") + e.what());
  }
}

}  // namespace gmpr
