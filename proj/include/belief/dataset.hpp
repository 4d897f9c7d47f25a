#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace belief {

using Index = Eigen::Index;
using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class FeatureKind { numeric, nominal };

const char* to_string(FeatureKind kind);
FeatureKind feature_kind_from_string(const std::string& name);

/// Sparse instance: strictly increasing 0-based feature indices with their
/// stored (raw) values. Absent features are zero.
struct SparseRow {
  std::vector<std::int32_t> indices;
  std::vector<double> values;

  std::size_t nnz() const { return indices.size(); }
  friend bool operator==(const SparseRow&, const SparseRow&) = default;
};

/// Borrowed view of one instance: a dense row or a sparse row.
using InstanceView = std::variant<std::span<const double>, const SparseRow*>;

/// Owning copy of one instance, as replicated to every partition worker.
class Instance {
 public:
  explicit Instance(Eigen::VectorXd dense) : data_(std::move(dense)) {}
  explicit Instance(SparseRow sparse) : data_(std::move(sparse)) {}

  bool is_sparse() const { return std::holds_alternative<SparseRow>(data_); }
  InstanceView view() const;

 private:
  std::variant<Eigen::VectorXd, SparseRow> data_;
};

/// Everything a per-feature diff needs to know about a feature: its kind and
/// the factor that turns a stored-value difference into a z-scored one
/// (1/sigma for lazily normalized sparse data, 1 otherwise).
struct FeatureSpace {
  std::vector<FeatureKind> kinds;
  Eigen::VectorXd inv_scale;
  bool has_nominal = false;
  bool unit_scale = true;

  Index size() const { return static_cast<Index>(kinds.size()); }
};

struct FeatureStats {
  Eigen::VectorXd mean;
  Eigen::VectorXd stddev;
};

/// Immutable instance store. Dense data is kept row-major; sparse rows keep
/// their raw values and are z-scored lazily through `space().inv_scale` and
/// `value()`.
class Dataset {
 public:
  static Dataset from_dense(RowMatrix values, std::vector<int> labels,
                            std::vector<FeatureKind> kinds = {},
                            std::vector<std::string> label_names = {});
  static Dataset from_sparse(std::vector<SparseRow> rows,
                             std::vector<int> labels, Index n_features,
                             std::vector<FeatureKind> kinds = {},
                             std::vector<std::string> label_names = {});

  Index n_instances() const { return static_cast<Index>(labels_.size()); }
  Index n_features() const { return n_features_; }
  Index n_classes() const { return static_cast<Index>(label_names_.size()); }
  bool is_sparse() const { return sparse_; }
  bool is_normalized() const { return normalized_; }

  const std::vector<FeatureKind>& kinds() const { return space_.kinds; }
  FeatureKind kind(Index j) const { return space_.kinds[j]; }
  const FeatureSpace& space() const { return space_; }
  const FeatureStats& stats() const { return stats_; }

  const std::vector<int>& labels() const { return labels_; }
  int label(Index i) const { return labels_[i]; }
  const std::vector<std::string>& label_names() const { return label_names_; }

  /// Dense storage; throws std::logic_error on sparse data.
  const RowMatrix& dense_values() const;
  /// Sparse storage; throws std::logic_error on dense data.
  const SparseRow& sparse_row(Index i) const;
  std::size_t nnz() const;

  InstanceView view(Index i) const;
  Instance instance(Index i) const;

  /// Effective (normalized, when normalization was applied) value.
  double value(Index i, Index j) const;
  Eigen::VectorXd column(Index j) const;

  std::vector<Index> class_counts() const;
  Eigen::VectorXd class_priors() const;

  /// Copy of the given rows. Statistics, kinds and class coding are kept.
  Dataset subset(std::span<const Index> rows) const;

  friend Dataset zscore_normalize(const Dataset& data);

 private:
  Dataset() = default;
  void validate() const;
  void reset_space();

  bool sparse_ = false;
  bool normalized_ = false;
  Index n_features_ = 0;
  RowMatrix dense_;
  std::vector<SparseRow> rows_;
  std::vector<int> labels_;
  std::vector<std::string> label_names_;
  FeatureSpace space_;
  FeatureStats stats_;
};

/// z-score numeric features with population statistics. Nominal features are
/// left untouched and constant features become all-zero with stddev 1.
Dataset zscore_normalize(const Dataset& data);

/// p disjoint blocks of global row indices; every block keeps the original
/// row order.
class PartitionedDataset {
 public:
  PartitionedDataset(std::shared_ptr<const Dataset> data,
                     std::vector<std::vector<Index>> blocks);

  const Dataset& data() const { return *data_; }
  std::shared_ptr<const Dataset> shared_data() const { return data_; }

  Index n_partitions() const { return static_cast<Index>(blocks_.size()); }
  std::span<const Index> block(Index partition) const {
    return blocks_[partition];
  }
  Index partition_size(Index partition) const {
    return static_cast<Index>(blocks_[partition].size());
  }
  Index partition_of(Index global) const { return partition_of_[global]; }
  Index local_index_of(Index global) const { return local_of_[global]; }
  Index global_index(Index partition, Index local) const {
    return blocks_[partition][local];
  }

 private:
  std::shared_ptr<const Dataset> data_;
  std::vector<std::vector<Index>> blocks_;
  std::vector<Index> partition_of_;
  std::vector<Index> local_of_;
};

/// Seeded balanced split into p blocks (sizes differ by at most one). p = 1
/// is the identity partitioning.
PartitionedDataset partition(std::shared_ptr<const Dataset> data, Index p,
                             std::uint64_t seed);

struct SampleMember {
  Index global_index;
  Instance instance;
  int label;
};

struct SampleBatch {
  Index batch_id = 0;
  std::vector<SampleMember> members;

  Index size() const { return static_cast<Index>(members.size()); }
  bool empty() const { return members.empty(); }
};

/// ceil(rate * m) global indices drawn uniformly without replacement, in draw
/// order.
std::vector<Index> draw_sample(const PartitionedDataset& data, double rate,
                               std::uint64_t seed);

/// Contiguous, balanced split of a drawn sample into b batches. Every member
/// carries a full copy of its instance.
std::vector<SampleBatch> split_batches(const PartitionedDataset& data,
                                       std::span<const Index> sample,
                                       Index batches);

std::vector<SampleBatch> draw_sample(const PartitionedDataset& data,
                                     double rate, std::uint64_t seed,
                                     Index batches);

}  // namespace belief
