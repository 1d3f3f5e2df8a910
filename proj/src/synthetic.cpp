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

#include "gmpr/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <set>

#include "gmpr/error.hpp"

namespace gmpr {

namespace {
constexpr double kBandOffset = 2.6;
}  // namespace

SyntheticKind parse_synthetic_kind(const std::string& s) {
  if (s == "two-cluster") return SyntheticKind::TwoCluster;
  if (s == "two-moons") return SyntheticKind::TwoMoons;
  throw Error(ErrorCode::InvalidConfig, "unknown synthetic kind '" + s + "'");
}

Dataset gen_synthetic(SyntheticKind kind, int n_per_class, double noise, std::uint64_t seed) {
  if (n_per_class < 1) throw Error(ErrorCode::InvalidConfig, "n_per_class must be >= 1");
  if (!(noise >= 0.0) || !std::isfinite(noise)) throw Error(ErrorCode::InvalidConfig, "noise must be >= 0");
  if (kind == SyntheticKind::TwoCluster && noise == 0.0)
    throw Error(ErrorCode::InvalidConfig, "two-cluster needs noise > 0");
  RngStream rng(seed);
  const Index n = 2 * static_cast<Index>(n_per_class);
  RowMatrix pts(n, 2);
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    const int c = static_cast<int>(i % 2);
    labels[static_cast<std::size_t>(i)] = c;
    if (kind == SyntheticKind::TwoCluster) {
      const double x = (2.0 * rng.uniform01() - 1.0) + rng.normal();
      const double y = (c == 0 ? kBandOffset : -kBandOffset) * noise + noise * rng.normal();
      pts(i, 0) = x;
      pts(i, 1) = y;
    } else {
      const double t = std::numbers::pi * rng.uniform01();
      double x = c == 0 ? std::cos(t) : 1.0 - std::cos(t);
      double y = c == 0 ? std::sin(t) : 0.5 - std::sin(t);
      if (noise > 0.0) {
        x += noise * rng.normal();
        y += noise * rng.normal();
      }
      pts(i, 0) = x;
      pts(i, 1) = y;
    }
  }
  return Dataset(std::move(pts), std::move(labels));
}

RelationSet sample_crossing_relations(const Dataset& data, int n_must, int n_cannot, RngStream& rng, double min_abs_x) {
  const auto& t = data.labels();
  const Index n = data.n();
  auto side = [&](Index i) { return data.points()(i, 0) >= 0.0; };
  auto far = [&](Index i) { return std::abs(data.points()(i, 0)) >= min_abs_x; };
  long long must_avail = 0, cannot_avail = 0;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      const bool same = t[static_cast<std::size_t>(i)] == t[static_cast<std::size_t>(j)];
      if (!far(i) || !far(j)) continue;
      if (same && side(i) != side(j)) ++must_avail;
      if (!same && side(i) == side(j)) ++cannot_avail;
    }
  if (n_must > must_avail || n_cannot > cannot_avail)
    throw Error(ErrorCode::ExhaustedPairs, "not enough crossing pairs");
  RelationSet rel;
  std::set<Pair> seen;
  auto draw = [&](bool want_same, int count, std::vector<Pair>& dst) {
    while (static_cast<int>(dst.size()) < count) {
      auto i = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
      auto j = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n - 1)));
      if (j >= i) ++j;
      const Pair p{std::min(i, j), std::max(i, j)};
      const bool same = t[static_cast<std::size_t>(i)] == t[static_cast<std::size_t>(j)];
      if (same != want_same || (side(i) == side(j)) == want_same || !far(i) || !far(j) || seen.count(p)) continue;
      seen.insert(p);
      dst.push_back(p);
    }
  };
  draw(true, n_must, rel.must);
  draw(false, n_cannot, rel.cannot);
  return validate_relations(rel, n);
}

}  // namespace gmpr
