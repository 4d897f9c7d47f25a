#include <cmath>

#include "doctest.h"

#include "belief/neighbors.hpp"
#include "helpers.hpp"

using namespace belief;

TEST_SUITE("neighbors") {

TEST_CASE("feature diff") {
  CHECK(feature_diff(2.0, 2.0, FeatureKind::nominal) == 0.0);
  CHECK(feature_diff(2.0, 3.0, FeatureKind::nominal) == 1.0);
  CHECK(feature_diff(-0.5, 1.25, FeatureKind::numeric) == 1.75);
  CHECK(feature_diff(1.25, -0.5, FeatureKind::numeric) == 1.75);
}

TEST_CASE("distance over mixed and sparse instances") {
  const Dataset d = testing::random_dense({10, 6, 2, true}, 3);
  for (Index a = 0; a < 10; ++a) {
    for (Index b = 0; b < 10; ++b) {
      double sum = 0.0;
      for (Index j = 0; j < 6; ++j) {
        const double diff = feature_diff(d.value(a, j), d.value(b, j), d.kind(j));
        sum += diff * diff;
      }
      CHECK(instance_distance(d.view(a), d.view(b), d.space()) ==
            doctest::Approx(std::sqrt(sum)).epsilon(1e-12));
    }
  }
  const Dataset s = zscore_normalize(testing::random_sparse(12, 8, 2, 0.4, 5));
  for (Index a = 0; a < 12; ++a) {
    const Instance copy = s.instance(a);
    for (Index b = 0; b < 12; ++b) {
      double sum = 0.0;
      for (Index j = 0; j < 8; ++j) sum += std::pow(s.value(a, j) - s.value(b, j), 2);
      CHECK(instance_distance(s.view(a), s.view(b), s.space()) ==
            doctest::Approx(std::sqrt(sum)).epsilon(1e-9));
      CHECK(instance_distance(copy.view(), s.view(b), s.space()) ==
            instance_distance(s.view(a), s.view(b), s.space()));
    }
  }
}

TEST_CASE("partitioned search equals brute force on dense, tied and sparse data") {
  std::vector<Dataset> sets;
  sets.push_back(zscore_normalize(testing::random_dense({120, 7, 3}, 1)));
  sets.push_back(zscore_normalize(testing::random_dense({90, 4, 2, true, true}, 2)));
  sets.push_back(zscore_normalize(testing::random_sparse(80, 15, 3, 0.25, 3)));
  for (auto& d : sets) {
    const auto data = testing::share(std::move(d));
    for (Index p : {1, 3, 8}) {
      const PartitionedDataset pd = partition(data, p, 4);
      for (const auto& batch : draw_sample(pd, 0.3, 9, 2)) {
        for (Index k : {1, 4}) {
          const NeighborTable got = neighborhood(pd, batch, k);
          CHECK(got == testing::brute_force_neighbors(pd, batch, k));
        }
      }
    }
  }
}

TEST_CASE("buckets are sorted, bounded and never contain the query") {
  const auto data = testing::share(zscore_normalize(testing::random_dense({60, 5, 3, false, true}, 6)));
  const PartitionedDataset pd = partition(data, 4, 2);
  const auto batch = draw_sample(pd, 0.5, 1, 1).front();
  const NeighborTable t = neighborhood(pd, batch, 3);
  for (Index q = 0; q < batch.size(); ++q) {
    for (Index c = 0; c < data->n_classes(); ++c) {
      const auto b = t.bucket(q, c);
      CHECK(b.size() <= 3);
      for (std::size_t i = 0; i < b.size(); ++i) {
        const Index g = pd.global_index(b[i].partition, b[i].local);
        CHECK(g != batch.members[q].global_index);
        CHECK(data->label(g) == c);
        if (i > 0) {
          const Index prev = pd.global_index(b[i - 1].partition, b[i - 1].local);
          CHECK((b[i - 1].distance < b[i].distance ||
                 (b[i - 1].distance == b[i].distance && prev < g)));
        }
      }
    }
  }
}

TEST_CASE("short classes give short buckets") {
  RowMatrix x(4, 1);
  x << 0, 1, 2, 3;
  const auto data = testing::share(Dataset::from_dense(x, {0, 0, 0, 1}));
  const PartitionedDataset pd = partition(data, 2, 1);
  const auto batch = draw_sample(pd, 1.0, 1, 1).front();
  const NeighborTable t = neighborhood(pd, batch, 5);
  for (Index q = 0; q < batch.size(); ++q) {
    const bool minority = batch.members[q].label == 1;
    CHECK(t.bucket(q, 0).size() == (minority ? 3u : 2u));
    CHECK(t.bucket(q, 1).size() == (minority ? 0u : 1u));
  }
}

TEST_CASE("emitted records stay within s * k * |C| * p") {
  const auto data = testing::share(zscore_normalize(testing::random_dense({200, 6, 3}, 8)));
  for (Index p : {1, 2, 8}) {
    const PartitionedDataset pd = partition(data, p, 3);
    const auto batch = draw_sample(pd, 0.1, 3, 1).front();
    const NeighborTable t = neighborhood(pd, batch, 4);
    CHECK(t.emitted_records <= static_cast<std::uint64_t>(batch.size() * 4 * 3 * p));
    CHECK(t.emitted_records >= static_cast<std::uint64_t>(t.total_locators()));
    CHECK(t.distance_evaluations ==
          static_cast<std::uint64_t>(batch.size() * (data->n_instances() - 1)));
    CHECK(t.emitted_instance_bytes == t.emitted_records * 8u * 6u);
  }
  CHECK_THROWS_AS(neighborhood(partition(data, 1, 1), SampleBatch{}, 0), std::invalid_argument);
}

}
