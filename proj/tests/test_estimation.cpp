#include "doctest.h"

#include "belief/error.hpp"
#include "belief/estimation.hpp"
#include "belief/selection.hpp"
#include "helpers.hpp"

using namespace belief;

TEST_SUITE("estimation") {

TEST_CASE("worked two-class example gives exactly one") {
  ClassDistanceStats s(2, 1);
  s.miss_distance << 4, 2;
  s.miss_count << 2, 2;
  s.hit_distance << 1, 1;
  s.hit_count << 2, 2;
  Eigen::VectorXd priors(2);
  priors << 0.5, 0.5;
  CHECK(belief_weights(s, priors).values[0] == 1.0);
}

TEST_CASE("classes without neighbors contribute nothing") {
  ClassDistanceStats s(3, 2);
  s.miss_distance << 2, 4, 9, 9, 0, 0;
  s.miss_count << 2, 0, 0;
  s.hit_distance << 1, 1, 9, 9, 0, 0;
  s.hit_count << 1, 0, 0;
  Eigen::VectorXd priors(3);
  priors << 0.5, 0.25, 0.25;
  const auto w = belief_weights(s, priors);
  CHECK(w.values[0] == doctest::Approx(0.5 * 2 / 2 - 0.5 * 1 / 1));
  CHECK(w.values[1] == doctest::Approx(0.5 * 4 / 2 - 0.5 * 1 / 1));
  CHECK_THROWS_AS(belief_weights(s, Eigen::VectorXd::Ones(2)), std::invalid_argument);
}

TEST_CASE("partition accumulation matches the naive per-bucket sums") {
  const auto data = testing::share(zscore_normalize(testing::random_dense({150, 6, 3, true}, 12)));
  const PartitionedDataset pd = partition(data, 5, 3);
  const auto batch = draw_sample(pd, 0.2, 4, 1).front();
  const NeighborTable table = neighborhood(pd, batch, 4);
  for (const auto& tracked : {TrackedFeatures::all(6), TrackedFeatures::none(6),
                              TrackedFeatures::of(6, {1, 4})}) {
    const auto naive = testing::naive_stats(pd, batch, table, tracked, 0.8);
    ClassDistanceStats merged(3, 6);
    for (Index part = 0; part < pd.n_partitions(); ++part) {
      merged += accumulate_partition(pd, part, batch, table, tracked, 0.8);
    }
    CHECK(testing::max_abs_diff(merged, naive) < 1e-9);
    CHECK(testing::max_abs_diff(estimate_batch(pd, batch, table, tracked, 0.8), naive) < 1e-9);
    CHECK(testing::max_abs_diff(estimate_batch<ExactSum>(pd, batch, table, tracked, 0.8),
                                naive) < 1e-9);
  }
}

TEST_CASE("sparse accumulation matches the naive sums") {
  const auto data = testing::share(zscore_normalize(testing::random_sparse(90, 10, 2, 0.3, 5)));
  const PartitionedDataset pd = partition(data, 3, 1);
  const auto batch = draw_sample(pd, 0.25, 2, 1).front();
  const NeighborTable table = neighborhood(pd, batch, 3);
  const auto tracked = TrackedFeatures::all(10);
  CHECK(testing::max_abs_diff(estimate_batch(pd, batch, table, tracked, 0.8),
                              testing::naive_stats(pd, batch, table, tracked, 0.8)) < 1e-9);
}

TEST_CASE("stats do not depend on the partition count") {
  const auto data = testing::share(zscore_normalize(testing::random_dense({120, 5, 2}, 3)));
  auto run = [&](Index p, bool exact) {
    const PartitionedDataset pd = partition(data, p, 8);
    const std::vector<Index> sample = {0, 5, 17, 33, 64, 99, 118};
    const auto batch = split_batches(pd, sample, 1).front();
    const NeighborTable table = neighborhood(pd, batch, 3);
    const auto tracked = TrackedFeatures::all(5);
    return exact ? estimate_batch<ExactSum>(pd, batch, table, tracked, 0.8).cast<double>()
                 : estimate_batch(pd, batch, table, tracked, 0.8);
  };
  CHECK(testing::stats_gap(run(1, false), run(8, false)) < 1e-9);
  CHECK(testing::stats_identical(run(1, true), run(8, true)));
  CHECK(testing::stats_identical(run(1, true), run(4, true)));
}

TEST_CASE("binary single-neighbor full sample agrees with RELIEF") {
  const auto data = testing::share(zscore_normalize(testing::random_dense({80, 6, 2}, 21)));
  const PartitionedDataset pd = partition(data, 2, 1);
  const auto sample = draw_sample(pd, 1.0, 3);
  const auto batch = split_batches(pd, sample, 1).front();
  const auto stats = estimate_batch(pd, batch, neighborhood(pd, batch, 1),
                                    TrackedFeatures::none(6), 0.8);
  const auto w = belief_weights(stats, data->class_priors());
  const auto ref = relief_reference(*data, sample);
  CHECK((w.values - ref.values).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("RELIEF-F reference follows its definition") {
  // One feature, three rows on a line: 0 (class 0), 1 (class 0), 3 (class 1).
  RowMatrix x(3, 1);
  x << 0, 1, 3;
  const Dataset d = Dataset::from_dense(x, {0, 0, 1});
  const std::vector<Index> sample = {0, 1, 2};
  const auto terms = relieff_terms(d, sample, 1);
  // hits: 0->1 (1), 1->0 (1), 2 has none; misses: 0->2 (3), 1->2 (2), 2->1 (2).
  const double p0 = 2.0 / 3.0, p1 = 1.0 / 3.0;
  CHECK(terms.hit[0] == doctest::Approx((1.0 + 1.0) / 3.0));
  CHECK(terms.miss[0] == doctest::Approx((p1 * 3 + p1 * 2 + p0 * 2) / 3.0));
  CHECK(relieff_reference(d, sample, 1).values[0] ==
        doctest::Approx(terms.miss[0] - terms.hit[0]));
  CHECK_THROWS_AS(relief_terms(Dataset::from_dense(x, {0, 1, 2}), sample), std::invalid_argument);
  CHECK_THROWS_AS(relieff_terms(d, {}, 1), std::invalid_argument);
}

TEST_CASE("out-of-range locators are integrity errors") {
  const auto data = testing::share(zscore_normalize(testing::random_dense({20, 3, 2}, 1)));
  const PartitionedDataset pd = partition(data, 2, 1);
  const auto batch = draw_sample(pd, 0.2, 1, 1).front();
  NeighborTable table = neighborhood(pd, batch, 2);
  table.bucket_mut(0, 0).push_back({0, 999, 0.0});
  CHECK_THROWS_AS(accumulate_partition(pd, 0, batch, table, TrackedFeatures::none(3), 0.8),
                  IntegrityError);
  CHECK_THROWS_AS(estimate_batch(pd, batch, table, TrackedFeatures::none(3), 0.8),
                  IntegrityError);
  ClassDistanceStats a(2, 3), b(2, 4);
  CHECK_THROWS_AS(a += b, std::invalid_argument);
}

TEST_CASE("weight ranking breaks ties by index") {
  WeightVector w{Eigen::Vector4d(0.5, 1.0, 0.5, 1.0), WeightSource::belief};
  CHECK(w.ranking() == std::vector<Index>{1, 3, 0, 2});
  CHECK(w.to_json()[0]["feature"] == 1);
}

}
