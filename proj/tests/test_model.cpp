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

#include <doctest.h>

#include <json.hpp>

#include "gmpr/model.hpp"
#include "gmpr/model_io.hpp"
#include "support.hpp"

using namespace gmpr;
using namespace gmpr::test;

TEST_CASE("validate_relations normalizes pair order") {
  RelationSet r;
  r.must = {{3, 1}};
  const RelationSet v = validate_relations(r, 5);
  REQUIRE(v.must.size() == 1);
  CHECK(v.must[0] == Pair{1, 3});
  CHECK(v.cannot.empty());
}

TEST_CASE("validate_relations rejects conflicts, self pairs and bad indices") {
  RelationSet conflict;
  conflict.must = {{1, 2}};
  conflict.cannot = {{2, 1}};
  CHECK_CODE(validate_relations(conflict, 5), ErrorCode::ConflictingPair);

  RelationSet self;
  self.must = {{0, 0}};
  CHECK_CODE(validate_relations(self, 5), ErrorCode::SelfPair);

  RelationSet out;
  out.cannot = {{0, 5}};
  CHECK_CODE(validate_relations(out, 5), ErrorCode::IndexOutOfRange);
  RelationSet neg;
  neg.must = {{-1, 2}};
  CHECK_CODE(validate_relations(neg, 5), ErrorCode::IndexOutOfRange);
}

TEST_CASE("validate_relations deduplicates and is idempotent") {
  RngStream rng(11);
  for (int rep = 0; rep < 200; ++rep) {
    const Index n = 2 + static_cast<Index>(rng.below(12));
    RelationSet r;
    const int pairs = static_cast<int>(rng.below(15));
    for (int q = 0; q < pairs; ++q) {
      const Index a = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n)));
      Index b = static_cast<Index>(rng.below(static_cast<std::uint64_t>(n - 1)));
      if (b >= a) ++b;
      (rng.below(2) ? r.must : r.cannot).push_back({a, b});
    }
    RelationSet v;
    if (code_of([&] { v = validate_relations(r, n); }).has_value()) continue;
    CHECK(validate_relations(v, n) == v);
    for (const auto* set : {&v.must, &v.cannot}) {
      for (std::size_t k = 0; k < set->size(); ++k) {
        CHECK((*set)[k].first < (*set)[k].second);
        if (k) CHECK((*set)[k - 1] < (*set)[k]);
      }
    }
  }
  RelationSet dup;
  dup.must = {{0, 1}, {1, 0}, {0, 1}};
  CHECK(validate_relations(dup, 3).must.size() == 1);
}

TEST_CASE("Dataset rejects invalid inputs") {
  CHECK_CODE(Dataset(RowMatrix(0, 2)), ErrorCode::EmptyInput);
  CHECK_CODE(Dataset(RowMatrix(3, 0)), ErrorCode::EmptyInput);
  RowMatrix p = RowMatrix::Zero(3, 2);
  CHECK_CODE(Dataset(p, std::vector<int>{0, 1}), ErrorCode::LengthMismatch);
  CHECK_CODE(Dataset(p, std::vector<int>{0, -1, 1}), ErrorCode::InvariantViolation);
  p(1, 1) = NAN;
  CHECK_CODE(Dataset(p), ErrorCode::NotFinite);
  const Dataset unl(RowMatrix::Zero(2, 2));
  CHECK_FALSE(unl.has_labels());
  CHECK_CODE(unl.labels(), ErrorCode::InvariantViolation);
  const Dataset lab(RowMatrix::Zero(3, 1), std::vector<int>{0, 2, 2});
  CHECK(lab.label_count() == 3);
}

TEST_CASE("FlatModel constructor fuzz rejects invariant violations") {
  RngStream rng(5);
  for (int rep = 0; rep < 100; ++rep) {
    const int M = 2 + static_cast<int>(rng.below(3));
    const int d = 1 + static_cast<int>(rng.below(3));
    const FlatModel good = random_flat(M, d, rng);
    std::vector<Vector> means;
    std::vector<Matrix> covs;
    for (int m = 0; m < M; ++m) {
      means.push_back(good.mean(m));
      covs.push_back(good.cov(m));
    }
    switch (rep % 5) {
      case 0: {
        Vector a = good.alpha();
        a[0] += 0.1;
        CHECK_CODE(FlatModel(a, means, covs), ErrorCode::InvariantViolation);
        break;
      }
      case 1: {
        Vector a = good.alpha();
        a[0] = -a[0];
        a[1] += 2 * good.alpha()[0];
        CHECK_CODE(FlatModel(a, means, covs), ErrorCode::InvariantViolation);
        break;
      }
      case 2: {
        covs[1] = -covs[1];
        CHECK_CODE(FlatModel(good.alpha(), means, covs), ErrorCode::InvariantViolation);
        break;
      }
      case 3: {
        means[0] = Vector::Zero(d + 1);
        CHECK_CODE(FlatModel(good.alpha(), means, covs), ErrorCode::DimensionMismatch);
        break;
      }
      default: {
        if (d < 2) break;
        covs[0](0, 1) += 1.0;
        CHECK_CODE(FlatModel(good.alpha(), means, covs), ErrorCode::InvariantViolation);
      }
    }
  }
  CHECK_CODE(FlatModel(Vector::Constant(2, 0.5), {Vector::Zero(1)}, {Matrix::Identity(1, 1)}),
             ErrorCode::DimensionMismatch);
}

TEST_CASE("HierModel rejects π off the simplex") {
  RngStream rng(6);
  HierModel h = random_hier({2, 1}, 2, rng);
  SubMixture s0 = h.sub(0);
  s0.pi[0] += 0.2;
  CHECK_CODE(HierModel(h.alpha(), {s0, h.sub(1)}), ErrorCode::InvariantViolation);
}

TEST_CASE("model documents round-trip exactly") {
  RngStream rng(7);
  for (int rep = 0; rep < 20; ++rep) {
    const FlatModel f = random_flat(3, 2, rng);
    const AnyModel back = deserialize_model(serialize_model(f));
    REQUIRE(std::holds_alternative<FlatModel>(back));
    const FlatModel& g = std::get<FlatModel>(back);
    CHECK(max_abs_diff(f.alpha(), g.alpha()) <= 1e-15);
    for (int m = 0; m < 3; ++m) {
      CHECK(max_abs_diff(f.mean(m), g.mean(m)) <= 1e-15);
      CHECK(max_abs_diff(f.cov(m), g.cov(m)) <= 1e-15);
    }
    const HierModel h = random_hier({2, 3}, 3, rng);
    const AnyModel hb = deserialize_model(serialize_model(h));
    REQUIRE(std::holds_alternative<HierModel>(hb));
    const HierModel& h2 = std::get<HierModel>(hb);
    for (int m = 0; m < 2; ++m) {
      CHECK(max_abs_diff(h.sub(m).pi, h2.sub(m).pi) <= 1e-15);
      for (int k = 0; k < h.clusters_in(m); ++k) {
        CHECK(max_abs_diff(h.sub(m).means[k], h2.sub(m).means[k]) <= 1e-15);
        CHECK(max_abs_diff(h.sub(m).covs[k], h2.sub(m).covs[k]) <= 1e-15);
      }
    }
  }
}

TEST_CASE("document with α off the simplex is an invariant violation") {
  RngStream rng(8);
  auto doc = nlohmann::json::parse(serialize_model(random_flat(2, 2, rng)));
  doc["alpha"] = {0.5, 0.6};
  CHECK_CODE(deserialize_model(doc.dump()), ErrorCode::InvariantViolation);
}

TEST_CASE("malformed documents are schema mismatches") {
  RngStream rng(9);
  const auto good = nlohmann::json::parse(serialize_model(random_flat(2, 2, rng)));
  CHECK_CODE(deserialize_model("{not json"), ErrorCode::SchemaMismatch);
  CHECK_CODE(deserialize_model("[]"), ErrorCode::SchemaMismatch);
  for (const char* key : {"version", "kind", "M", "d", "alpha", "classes"}) {
    auto j = good;
    j.erase(key);
    CHECK_CODE(deserialize_model(j.dump()), ErrorCode::SchemaMismatch);
  }
  auto v = good;
  v["version"] = 2;
  CHECK_CODE(deserialize_model(v.dump()), ErrorCode::SchemaMismatch);
  auto k = good;
  k["kind"] = "tree";
  CHECK_CODE(deserialize_model(k.dump()), ErrorCode::SchemaMismatch);
  auto shape = good;
  shape["classes"][0]["means"][0] = {1.0, 2.0, 3.0};
  CHECK_CODE(deserialize_model(shape.dump()), ErrorCode::SchemaMismatch);
  auto cnt = good;
  cnt["M"] = 3;
  CHECK_CODE(deserialize_model(cnt.dump()), ErrorCode::SchemaMismatch);
}

TEST_CASE("hier document with one cluster per class is flat-equivalent") {
  RngStream rng(10);
  const FlatModel f = random_flat(3, 2, rng);
  auto doc = nlohmann::json::parse(serialize_model(f));
  doc["kind"] = "hier";
  const AnyModel back = deserialize_model(doc.dump());
  REQUIRE(std::holds_alternative<HierModel>(back));
  const HierModel& h = std::get<HierModel>(back);
  CHECK(h.is_flat_equivalent());
  const Dataset data = random_dataset(40, 2, rng);
  CHECK(max_abs_diff(predict_hier(h, data), predict_flat(f, data)) < 1e-12);
  CHECK(max_abs_diff(predict_flat(h.to_flat(), data), predict_flat(f, data)) < 1e-12);
  CHECK_FALSE(random_hier({2, 1}, 2, rng).is_flat_equivalent());
  CHECK_CODE(random_hier({2, 1}, 2, rng).to_flat(), ErrorCode::InvariantViolation);
}

TEST_CASE("on_simplex") {
  CHECK(on_simplex(Vector::Constant(4, 0.25)));
  Vector v(2);
  v << 0.5, 0.5 + 1e-9;
  CHECK_FALSE(on_simplex(v));
  v << 1.0, -0.0;
  CHECK(on_simplex(v));
}
