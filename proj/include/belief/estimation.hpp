#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"

#include "belief/dataset.hpp"
#include "belief/exact_sum.hpp"
#include "belief/neighbors.hpp"
#include "belief/redundancy.hpp"

namespace belief {

/// Class-feature aggregation matrices of one or more partitions. Rows are
/// indexed by the class of the *sampled* instance:
///
///   miss_distance (DD)  accumulated per-feature diffs to distinct-class neighbors
///   hit_distance  (ED)  accumulated per-feature diffs to same-class neighbors
///   miss_count    (DC)  number of distinct-class neighbors
///   hit_count     (EC)  number of same-class neighbors
///
/// Merging is entrywise addition. With Scalar = ExactSum the sums are exact
/// and independent of partitioning and merge order.
template <typename Scalar>
struct BasicClassDistanceStats {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Counts = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

  Matrix miss_distance;
  Matrix hit_distance;
  Counts miss_count;
  Counts hit_count;
  BasicCollisionTables<Scalar> collisions;

  BasicClassDistanceStats() = default;
  BasicClassDistanceStats(Index n_classes, Index n_features)
      : miss_distance(Matrix::Zero(n_classes, n_features)),
        hit_distance(Matrix::Zero(n_classes, n_features)),
        miss_count(Counts::Zero(n_classes)),
        hit_count(Counts::Zero(n_classes)),
        collisions(n_features) {}

  Index n_classes() const { return miss_distance.rows(); }
  Index n_features() const { return miss_distance.cols(); }

  BasicClassDistanceStats& operator+=(const BasicClassDistanceStats& other) {
    if (other.n_classes() != n_classes() || other.n_features() != n_features()) {
      throw std::invalid_argument("cannot merge stats of different shapes");
    }
    miss_distance += other.miss_distance;
    hit_distance += other.hit_distance;
    miss_count += other.miss_count;
    hit_count += other.hit_count;
    collisions += other.collisions;
    return *this;
  }

  template <typename To>
  BasicClassDistanceStats<To> cast() const {
    BasicClassDistanceStats<To> out;
    out.miss_distance = miss_distance.template cast<To>();
    out.hit_distance = hit_distance.template cast<To>();
    out.miss_count = miss_count;
    out.hit_count = hit_count;
    out.collisions = collisions.template cast<To>();
    return out;
  }
};

using ClassDistanceStats = BasicClassDistanceStats<double>;
using ExactClassDistanceStats = BasicClassDistanceStats<ExactSum>;

template <typename Scalar>
BasicClassDistanceStats<Scalar> merge_stats(BasicClassDistanceStats<Scalar> a,
                                            const BasicClassDistanceStats<Scalar>& b) {
  a += b;
  return a;
}

/// Map-phase worker state: diff and collision buffers.
struct AccumulateScratch {
  std::vector<double> diffs;
  CollisionScratch collisions;
};

/// Adds the contributions of every neighbor that lives in `partition` into
/// `stats`. Only rows of that partition are read. Throws IntegrityError when
/// a locator points outside the partition.
template <typename Scalar>
void accumulate_partition_into(const PartitionedDataset& data, Index partition,
                               const SampleBatch& batch,
                               const NeighborTable& table,
                               const TrackedFeatures& tracked, double kappa,
                               BasicClassDistanceStats<Scalar>& stats,
                               AccumulateScratch& scratch);

template <typename Scalar = double>
BasicClassDistanceStats<Scalar> accumulate_partition(
    const PartitionedDataset& data, Index partition, const SampleBatch& batch,
    const NeighborTable& table, const TrackedFeatures& tracked, double kappa) {
  const Dataset& d = data.data();
  BasicClassDistanceStats<Scalar> stats(d.n_classes(), d.n_features());
  AccumulateScratch scratch;
  accumulate_partition_into(data, partition, batch, table, tracked, kappa,
                            stats, scratch);
  return stats;
}

struct EstimationOptions {
  int threads = 0;
};

/// Map over all partitions and reduce. Thread-private partials are folded
/// in worker order.
template <typename Scalar = double>
BasicClassDistanceStats<Scalar> estimate_batch(
    const PartitionedDataset& data, const SampleBatch& batch,
    const NeighborTable& table, const TrackedFeatures& tracked, double kappa,
    const EstimationOptions& options = {});

enum class WeightSource { belief, relief, relieff };

const char* to_string(WeightSource source);

struct WeightVector {
  Eigen::VectorXd values;
  WeightSource source = WeightSource::belief;

  Index size() const { return values.size(); }
  /// Features by descending weight, ties by ascending index.
  std::vector<Index> ranking() const;
  /// [{feature, weight}, ...] sorted by descending weight.
  nlohmann::json to_json() const;
};

/// w[j] = sum_c P(c) DD(c,j)/DC(c) - sum_c P(c) ED(c,j)/EC(c); classes with a
/// zero count contribute nothing.
WeightVector belief_weights(const ClassDistanceStats& stats,
                            const Eigen::VectorXd& priors);

/// Separate hit and miss sums of the instance-wise estimators, so that
/// w = miss - hit.
struct ReliefTerms {
  Eigen::VectorXd hit;
  Eigen::VectorXd miss;
};

/// Instance-wise RELIEF-F: k nearest hits and k nearest misses per opponent
/// class, miss terms weighted by the opponent prior, everything divided by
/// s * k. Brute-force search, single-threaded.
ReliefTerms relieff_terms(const Dataset& data, std::span<const Index> sample,
                          Index k);
WeightVector relieff_reference(const Dataset& data,
                               std::span<const Index> sample, Index k);

/// Original binary RELIEF with one near-hit and one near-miss.
ReliefTerms relief_terms(const Dataset& data, std::span<const Index> sample);
WeightVector relief_reference(const Dataset& data,
                              std::span<const Index> sample);

}  // namespace belief
