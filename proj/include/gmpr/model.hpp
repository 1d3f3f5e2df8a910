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

// Domain value types: datasets, relation sets and the two model families. All are immutable after construction and
// validate their invariants in the constructor.

#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "gmpr/gaussian.hpp"

namespace gmpr {

using Index = std::ptrdiff_t;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

class Dataset {
 public:
  /// Throws EmptyInput (N or d zero), NotFinite, LengthMismatch or InvariantViolation (negative label).
  explicit Dataset(RowMatrix points, std::optional<std::vector<int>> labels = std::nullopt);

  Index n() const noexcept { return static_cast<Index>(points_.rows()); }
  int d() const noexcept { return static_cast<int>(points_.cols()); }
  const RowMatrix& points() const noexcept { return points_; }
  /// Same data, column-major, for the batch kernels.
  const Matrix& columns() const noexcept { return columns_; }
  Vector point(Index i) const { return points_.row(i).transpose(); }

  bool has_labels() const noexcept { return labels_.has_value(); }
  /// Throws InvariantViolation when the dataset is unlabeled.
  const std::vector<int>& labels() const;
  /// 1 + max label, or 0 when unlabeled.
  int label_count() const noexcept { return label_count_; }

 private:
  RowMatrix points_;
  Matrix columns_;
  std::optional<std::vector<int>> labels_;
  int label_count_ = 0;
};

struct Pair {
  Index first = 0;
  Index second = 0;
  friend bool operator==(const Pair&, const Pair&) = default;
  friend auto operator<=>(const Pair&, const Pair&) = default;
};

/// Must-link and cannot-link pairs. Use `validate_relations` to obtain the normalized form (i < j, sorted, no
/// duplicates, disjoint sets).
struct RelationSet {
  std::vector<Pair> must;
  std::vector<Pair> cannot;

  bool empty() const noexcept { return must.empty() && cannot.empty(); }
  friend bool operator==(const RelationSet&, const RelationSet&) = default;
};

/// Throws IndexOutOfRange, SelfPair or ConflictingPair. Idempotent.
RelationSet validate_relations(const RelationSet& rel, Index n);

/// One Gaussian per class.
class FlatModel {
 public:
  /// Throws InvariantViolation (α off the simplex, non-SPD covariance) or DimensionMismatch.
  FlatModel(Vector alpha, std::vector<Vector> means, std::vector<Matrix> covs);

  int classes() const noexcept { return static_cast<int>(alpha_.size()); }
  int dim() const noexcept { return components_.front().dim(); }
  const Vector& alpha() const noexcept { return alpha_; }
  const std::vector<CholeskyGaussian>& components() const noexcept { return components_; }
  const Vector& mean(int m) const { return components_[m].mean(); }
  const Matrix& cov(int m) const { return covs_[m]; }

 private:
  Vector alpha_;
  std::vector<Matrix> covs_;
  std::vector<CholeskyGaussian> components_;
};

/// One class of a hierarchical model: a Gaussian mixture with its own weights π.
struct SubMixture {
  Vector pi;
  std::vector<Vector> means;
  std::vector<Matrix> covs;
};

/// Each class is itself a mixture of m_K Gaussians. With m_K = 1 everywhere it is the FlatModel.
class HierModel {
 public:
  /// Throws InvariantViolation or DimensionMismatch.
  HierModel(Vector alpha, std::vector<SubMixture> classes);

  static HierModel from_flat(const FlatModel& flat);

  int classes() const noexcept { return static_cast<int>(alpha_.size()); }
  int dim() const noexcept { return clusters_.front().dim(); }
  const Vector& alpha() const noexcept { return alpha_; }
  const SubMixture& sub(int m) const { return classes_[m]; }
  int clusters_in(int m) const { return static_cast<int>(classes_[m].pi.size()); }
  int total_clusters() const noexcept { return static_cast<int>(clusters_.size()); }
  /// Flat index of cluster k of class m into `clusters()`.
  int cluster_index(int m, int k) const { return offsets_[m] + k; }
  const std::vector<CholeskyGaussian>& clusters() const noexcept { return clusters_; }

  bool is_flat_equivalent() const noexcept;
  /// Throws InvariantViolation unless flat-equivalent.
  FlatModel to_flat() const;

 private:
  Vector alpha_;
  std::vector<SubMixture> classes_;
  std::vector<int> offsets_;
  std::vector<CholeskyGaussian> clusters_;
};

/// Simplex check shared by models and loaders: entries ≥ 0 and |Σ − 1| ≤ tol.
bool on_simplex(const Vector& v, double tol = 1e-12) noexcept;

}  // namespace gmpr
