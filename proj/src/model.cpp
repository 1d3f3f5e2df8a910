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

#include "gmpr/model.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <string>

#include "gmpr/error.hpp"

namespace gmpr {

Dataset::Dataset(RowMatrix points, std::optional<std::vector<int>> labels)
    : points_(std::move(points)), labels_(std::move(labels)) {
  if (points_.rows() < 1 || points_.cols() < 1) throw Error(ErrorCode::EmptyInput, "dataset needs N >= 1 and d >= 1");
  if (!points_.allFinite()) throw Error(ErrorCode::NotFinite, "dataset contains NaN or Inf");
  columns_ = points_;
  if (labels_) {
    if (static_cast<Index>(labels_->size()) != n()) {
      throw Error(ErrorCode::LengthMismatch, "label vector length differs from point count");
    }
    for (int l : *labels_) {
      if (l < 0) throw Error(ErrorCode::InvariantViolation, "labels must be non-negative class ids");
      label_count_ = std::max(label_count_, l + 1);
    }
  }
}

const std::vector<int>& Dataset::labels() const {
  if (!labels_) throw Error(ErrorCode::InvariantViolation, "dataset has no labels");
  return *labels_;
}

RelationSet validate_relations(const RelationSet& rel, Index n) {
  auto normalize = [n](const std::vector<Pair>& in) {
    std::vector<Pair> out;
    out.reserve(in.size());
    for (std::size_t k = 0; k < in.size(); ++k) {
      const Pair& p = in[k];
      if (p.first < 0 || p.first >= n || p.second < 0 || p.second >= n) {
        throw Error(ErrorCode::IndexOutOfRange,
                    "pair (" + std::to_string(p.first) + "," + std::to_string(p.second) + ") outside [0," +
                        std::to_string(n) + ")",
                    static_cast<long long>(k));
      }
      if (p.first == p.second) {
        throw Error(ErrorCode::SelfPair, "self pair (" + std::to_string(p.first) + "," + std::to_string(p.second) + ")",
                    static_cast<long long>(k));
      }
      out.push_back(p.first < p.second ? p : Pair{p.second, p.first});
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  };
  RelationSet v{normalize(rel.must), normalize(rel.cannot)};
  std::vector<Pair> both;
  std::set_intersection(v.must.begin(), v.must.end(), v.cannot.begin(), v.cannot.end(), std::back_inserter(both));
  if (!both.empty()) {
    throw Error(ErrorCode::ConflictingPair, "pair (" + std::to_string(both.front().first) + "," +
                                                std::to_string(both.front().second) +
                                                ") is both must-link and cannot-link");
  }
  return v;
}

bool on_simplex(const Vector& v, double tol) noexcept {
  if (v.size() == 0 || !v.allFinite()) return false;
  if ((v.array() < 0.0).any()) return false;
  return std::abs(v.sum() - 1.0) <= tol;
}

FlatModel::FlatModel(Vector alpha, std::vector<Vector> means, std::vector<Matrix> covs)
    : alpha_(std::move(alpha)), covs_(std::move(covs)) {
  const auto M = alpha_.size();
  if (M < 1) throw Error(ErrorCode::InvariantViolation, "model needs at least one class");
  if (static_cast<Index>(means.size()) != M || static_cast<Index>(covs_.size()) != M) {
    throw Error(ErrorCode::DimensionMismatch, "alpha, means and covariances disagree on the class count");
  }
  if (!on_simplex(alpha_)) throw Error(ErrorCode::InvariantViolation, "class weights are not on the simplex");
  components_.reserve(M);
  const auto d = means[0].size();
  for (Index m = 0; m < M; ++m) {
    if (means[m].size() != d) throw Error(ErrorCode::DimensionMismatch, "means differ in dimension");
    components_.emplace_back(std::move(means[m]), covs_[m]);
  }
}

HierModel::HierModel(Vector alpha, std::vector<SubMixture> classes)
    : alpha_(std::move(alpha)), classes_(std::move(classes)) {
  const auto M = alpha_.size();
  if (M < 1) throw Error(ErrorCode::InvariantViolation, "model needs at least one class");
  if (static_cast<Index>(classes_.size()) != M) {
    throw Error(ErrorCode::DimensionMismatch, "alpha and class list disagree on the class count");
  }
  if (!on_simplex(alpha_)) throw Error(ErrorCode::InvariantViolation, "class weights are not on the simplex");
  int offset = 0;
  for (Index m = 0; m < M; ++m) {
    const SubMixture& s = classes_[m];
    const auto K = s.pi.size();
    if (K < 1) throw Error(ErrorCode::InvariantViolation, "every class needs at least one cluster");
    if (static_cast<Index>(s.means.size()) != K || static_cast<Index>(s.covs.size()) != K) {
      throw Error(ErrorCode::DimensionMismatch, "cluster weights, means and covariances disagree in count");
    }
    if (!on_simplex(s.pi)) throw Error(ErrorCode::InvariantViolation, "cluster weights are not on the simplex");
    offsets_.push_back(offset);
    offset += static_cast<int>(K);
    for (Index k = 0; k < K; ++k) {
      if (!clusters_.empty() && s.means[k].size() != clusters_.front().dim()) {
        throw Error(ErrorCode::DimensionMismatch, "cluster means differ in dimension");
      }
      clusters_.emplace_back(s.means[k], s.covs[k]);
    }
  }
}

HierModel HierModel::from_flat(const FlatModel& flat) {
  std::vector<SubMixture> classes;
  for (int m = 0; m < flat.classes(); ++m) {
    classes.push_back(SubMixture{Vector::Ones(1), {flat.mean(m)}, {flat.cov(m)}});
  }
  return HierModel(flat.alpha(), std::move(classes));
}

bool HierModel::is_flat_equivalent() const noexcept {
  return std::all_of(classes_.begin(), classes_.end(), [](const SubMixture& s) { return s.pi.size() == 1; });
}

FlatModel HierModel::to_flat() const {
  if (!is_flat_equivalent()) throw Error(ErrorCode::InvariantViolation, "model has classes with several clusters");
  std::vector<Vector> means;
  std::vector<Matrix> covs;
  for (const SubMixture& s : classes_) {
    means.push_back(s.means[0]);
    covs.push_back(s.covs[0]);
  }
  return FlatModel(alpha_, std::move(means), std::move(covs));
}

}  // namespace gmpr
