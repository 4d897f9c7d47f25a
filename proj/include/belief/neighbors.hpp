#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "belief/dataset.hpp"

namespace belief {

/// Addresses a neighbor by (partition, local position) instead of shipping
/// its feature vector. The distance travels with it through the merge.
struct NeighborLocator {
  std::int32_t partition = 0;
  std::int32_t local = 0;
  double distance = 0.0;

  friend bool operator==(const NeighborLocator&,
                         const NeighborLocator&) = default;
};

/// Serialized size used for communication accounting: two 4-byte indices and
/// one 8-byte distance.
inline constexpr std::uint64_t kLocatorRecordBytes = 16;

/// RELIEF diff on z-scored values: indicator for nominal, |a - b| otherwise.
inline double feature_diff(double a, double b, FeatureKind kind) {
  if (kind == FeatureKind::nominal) return a == b ? 0.0 : 1.0;
  return a > b ? a - b : b - a;
}

/// Sum of squared per-feature diffs. Sparse x sparse merges indices, sparse x
/// dense is a single scan. Throws std::invalid_argument on a dimension
/// mismatch.
double squared_distance(const InstanceView& x, const InstanceView& y,
                        const FeatureSpace& space);

/// Euclidean distance over per-feature diffs.
double instance_distance(const InstanceView& x, const InstanceView& y,
                         const FeatureSpace& space);

/// Per sample member, one bucket per class: the hit bucket (the member's own
/// class) and one miss bucket per opponent class, each holding at most k
/// locators ordered by (distance, global index).
class NeighborTable {
 public:
  NeighborTable() = default;
  NeighborTable(Index n_members, Index n_classes, Index k);

  Index n_members() const { return n_members_; }
  Index n_classes() const { return n_classes_; }
  Index k() const { return k_; }

  std::span<const NeighborLocator> bucket(Index member, Index cls) const {
    return buckets_[member * n_classes_ + cls];
  }
  std::vector<NeighborLocator>& bucket_mut(Index member, Index cls) {
    return buckets_[member * n_classes_ + cls];
  }

  struct LocalRef {
    Index member;
    Index local;
  };
  /// Locators that fall in one partition, in member then bucket order.
  std::vector<LocalRef> local_locators(Index partition) const;

  Index total_locators() const;

  /// Locator records emitted by the map phase, before the merge.
  std::uint64_t emitted_records = 0;
  /// Bytes the emitted records would cost if full instances were shipped.
  std::uint64_t emitted_instance_bytes = 0;
  /// Distance evaluations spent by the search.
  std::uint64_t distance_evaluations = 0;

  friend bool operator==(const NeighborTable& a, const NeighborTable& b) {
    return a.n_members_ == b.n_members_ && a.n_classes_ == b.n_classes_ &&
           a.k_ == b.k_ && a.buckets_ == b.buckets_;
  }

 private:
  Index n_members_ = 0;
  Index n_classes_ = 0;
  Index k_ = 0;
  std::vector<std::vector<NeighborLocator>> buckets_;
};

/// Serialized payload of one full instance: 8 bytes per dense value, 12 per
/// stored sparse entry (4-byte index plus 8-byte value).
inline std::uint64_t instance_payload_bytes(const Dataset& data, Index i) {
  if (data.is_sparse()) return 12u * data.sparse_row(i).nnz();
  return 8u * static_cast<std::uint64_t>(data.n_features());
}

struct NeighborOptions {
  /// Worker threads for the map phase; 0 uses the OpenMP default.
  int threads = 0;
};

/// Map: every partition keeps a bounded max-heap of size k per member and
/// class and emits its local candidates. Reduce: the p candidate lists of a
/// bucket are merged into the global top k. A member never matches itself
/// (by global index); exact duplicates of it remain eligible. Buckets are
/// returned short when a class has fewer than k candidates.
NeighborTable neighborhood(const PartitionedDataset& data,
                           const SampleBatch& batch, Index k,
                           const NeighborOptions& options = {});

}  // namespace belief
