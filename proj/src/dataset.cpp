#include "belief/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "belief/error.hpp"
#include "belief/random.hpp"

namespace belief {

const char* to_string(FeatureKind kind) {
  return kind == FeatureKind::nominal ? "nominal" : "numeric";
}

FeatureKind feature_kind_from_string(const std::string& name) {
  if (name == "numeric") return FeatureKind::numeric;
  if (name == "nominal") return FeatureKind::nominal;
  throw DataError("unknown feature kind '" + name + "'");
}

InstanceView Instance::view() const {
  if (const auto* dense = std::get_if<Eigen::VectorXd>(&data_)) {
    return std::span<const double>(dense->data(),
                                   static_cast<std::size_t>(dense->size()));
  }
  return &std::get<SparseRow>(data_);
}

namespace {

std::vector<std::string> default_label_names(const std::vector<int>& labels) {
  int max_label = -1;
  for (int y : labels) max_label = std::max(max_label, y);
  std::vector<std::string> names;
  for (int c = 0; c <= max_label; ++c) names.push_back(std::to_string(c));
  return names;
}

}  // namespace

Dataset Dataset::from_dense(RowMatrix values, std::vector<int> labels,
                            std::vector<FeatureKind> kinds,
                            std::vector<std::string> label_names) {
  Dataset d;
  d.sparse_ = false;
  d.n_features_ = values.cols();
  d.dense_ = std::move(values);
  d.labels_ = std::move(labels);
  if (kinds.empty()) kinds.assign(d.n_features_, FeatureKind::numeric);
  d.space_.kinds = std::move(kinds);
  d.label_names_ = label_names.empty() ? default_label_names(d.labels_)
                                       : std::move(label_names);
  d.stats_.mean = Eigen::VectorXd::Zero(d.n_features_);
  d.stats_.stddev = Eigen::VectorXd::Ones(d.n_features_);
  d.reset_space();
  d.validate();
  return d;
}

Dataset Dataset::from_sparse(std::vector<SparseRow> rows,
                             std::vector<int> labels, Index n_features,
                             std::vector<FeatureKind> kinds,
                             std::vector<std::string> label_names) {
  Dataset d;
  d.sparse_ = true;
  d.n_features_ = n_features;
  d.rows_ = std::move(rows);
  d.labels_ = std::move(labels);
  if (kinds.empty()) kinds.assign(n_features, FeatureKind::numeric);
  d.space_.kinds = std::move(kinds);
  d.label_names_ = label_names.empty() ? default_label_names(d.labels_)
                                       : std::move(label_names);
  d.stats_.mean = Eigen::VectorXd::Zero(n_features);
  d.stats_.stddev = Eigen::VectorXd::Ones(n_features);
  d.reset_space();
  d.validate();
  return d;
}

void Dataset::reset_space() {
  space_.inv_scale = Eigen::VectorXd::Ones(n_features_);
  if (sparse_ && normalized_) {
    for (Index j = 0; j < n_features_; ++j) {
      if (space_.kinds[j] == FeatureKind::numeric) {
        space_.inv_scale[j] = 1.0 / stats_.stddev[j];
      }
    }
  }
  space_.has_nominal =
      std::find(space_.kinds.begin(), space_.kinds.end(),
                FeatureKind::nominal) != space_.kinds.end();
  space_.unit_scale = (space_.inv_scale.array() == 1.0).all();
}

void Dataset::validate() const {
  if (static_cast<Index>(space_.kinds.size()) != n_features_) {
    throw DataError("feature kind count does not match the feature count");
  }
  const Index m = n_instances();
  if (sparse_) {
    if (static_cast<Index>(rows_.size()) != m) {
      throw DataError("row count does not match label count");
    }
    for (const auto& row : rows_) {
      if (row.indices.size() != row.values.size()) {
        throw DataError("sparse row has mismatched index/value lengths");
      }
      for (std::size_t t = 0; t < row.indices.size(); ++t) {
        if (row.indices[t] < 0 || row.indices[t] >= n_features_) {
          throw DataError("sparse index out of range");
        }
        if (t > 0 && row.indices[t] <= row.indices[t - 1]) {
          throw DataError("sparse indices must be strictly increasing");
        }
      }
    }
  } else if (dense_.rows() != m) {
    throw DataError("row count does not match label count");
  }
  for (int y : labels_) {
    if (y < 0 || y >= static_cast<int>(label_names_.size())) {
      throw DataError("label out of range");
    }
  }
}

const RowMatrix& Dataset::dense_values() const {
  if (sparse_) throw std::logic_error("dense_values() on sparse dataset");
  return dense_;
}

const SparseRow& Dataset::sparse_row(Index i) const {
  if (!sparse_) throw std::logic_error("sparse_row() on dense dataset");
  return rows_[i];
}

std::size_t Dataset::nnz() const {
  if (!sparse_) return static_cast<std::size_t>(dense_.size());
  std::size_t total = 0;
  for (const auto& row : rows_) total += row.nnz();
  return total;
}

InstanceView Dataset::view(Index i) const {
  if (sparse_) return &rows_[i];
  return std::span<const double>(dense_.row(i).data(),
                                 static_cast<std::size_t>(n_features_));
}

Instance Dataset::instance(Index i) const {
  if (sparse_) return Instance(rows_[i]);
  return Instance(Eigen::VectorXd(dense_.row(i).transpose()));
}

double Dataset::value(Index i, Index j) const {
  if (!sparse_) return dense_(i, j);
  const auto& row = rows_[i];
  auto it = std::lower_bound(row.indices.begin(), row.indices.end(),
                             static_cast<std::int32_t>(j));
  double raw = 0.0;
  if (it != row.indices.end() && *it == j) {
    raw = row.values[it - row.indices.begin()];
  }
  if (!normalized_ || space_.kinds[j] == FeatureKind::nominal) return raw;
  return (raw - stats_.mean[j]) / stats_.stddev[j];
}

Eigen::VectorXd Dataset::column(Index j) const {
  if (!sparse_) return dense_.col(j);
  Eigen::VectorXd col(n_instances());
  for (Index i = 0; i < n_instances(); ++i) col[i] = value(i, j);
  return col;
}

std::vector<Index> Dataset::class_counts() const {
  std::vector<Index> counts(label_names_.size(), 0);
  for (int y : labels_) ++counts[y];
  return counts;
}

Eigen::VectorXd Dataset::class_priors() const {
  const auto counts = class_counts();
  Eigen::VectorXd priors(static_cast<Index>(counts.size()));
  const double m = static_cast<double>(n_instances());
  for (std::size_t c = 0; c < counts.size(); ++c) {
    priors[static_cast<Index>(c)] = m > 0 ? counts[c] / m : 0.0;
  }
  return priors;
}

Dataset Dataset::subset(std::span<const Index> rows) const {
  Dataset d;
  d.sparse_ = sparse_;
  d.normalized_ = normalized_;
  d.n_features_ = n_features_;
  d.label_names_ = label_names_;
  d.space_ = space_;
  d.stats_ = stats_;
  d.labels_.reserve(rows.size());
  if (sparse_) {
    d.rows_.reserve(rows.size());
    for (Index i : rows) d.rows_.push_back(rows_.at(i));
  } else {
    d.dense_.resize(static_cast<Index>(rows.size()), n_features_);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      d.dense_.row(static_cast<Index>(r)) = dense_.row(rows[r]);
    }
  }
  for (Index i : rows) d.labels_.push_back(labels_.at(i));
  return d;
}

Dataset zscore_normalize(const Dataset& data) {
  Dataset out = data;
  const Index m = data.n_instances();
  const Index n = data.n_features();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd stddev = Eigen::VectorXd::Ones(n);
  std::vector<bool> constant(n, false);

  if (!data.sparse_) {
    for (Index j = 0; j < n; ++j) {
      if (data.kind(j) == FeatureKind::nominal || m == 0) continue;
      auto col = data.dense_.col(j);
      const double mu = col.mean();
      const double var = (col.array() - mu).square().mean();
      mean[j] = mu;
      constant[j] = col.minCoeff() == col.maxCoeff();
      stddev[j] = constant[j] ? 1.0 : std::sqrt(var);
      if (constant[j]) {
        out.dense_.col(j).setZero();
      } else {
        out.dense_.col(j) = (col.array() - mu) / stddev[j];
      }
    }
  } else {
    // Implicit zeros take part in the statistics.
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(n);
    std::vector<Index> count(n, 0);
    std::vector<double> lo(n, 0.0), hi(n, 0.0);
    for (const auto& row : data.rows_) {
      for (std::size_t t = 0; t < row.nnz(); ++t) {
        const Index j = row.indices[t];
        const double v = row.values[t];
        lo[j] = count[j] == 0 ? v : std::min(lo[j], v);
        hi[j] = count[j] == 0 ? v : std::max(hi[j], v);
        sum[j] += v;
        ++count[j];
      }
    }
    if (m > 0) mean = sum / static_cast<double>(m);
    Eigen::VectorXd sq = Eigen::VectorXd::Zero(n);
    for (const auto& row : data.rows_) {
      for (std::size_t t = 0; t < row.nnz(); ++t) {
        const Index j = row.indices[t];
        const double d = row.values[t] - mean[j];
        sq[j] += d * d;
      }
    }
    for (Index j = 0; j < n; ++j) {
      if (data.kind(j) == FeatureKind::nominal || m == 0) continue;
      if (count[j] < m) {
        lo[j] = std::min(lo[j], 0.0);
        hi[j] = std::max(hi[j], 0.0);
      }
      const double implicit = static_cast<double>(m - count[j]);
      const double var =
          (sq[j] + implicit * mean[j] * mean[j]) / static_cast<double>(m);
      constant[j] = lo[j] == hi[j];
      stddev[j] = constant[j] ? 1.0 : std::sqrt(var);
      if (constant[j]) mean[j] = lo[j];
    }
  }
  for (Index j = 0; j < n; ++j) {
    if (data.kind(j) == FeatureKind::nominal) {
      mean[j] = 0.0;
      stddev[j] = 1.0;
    }
  }
  out.stats_.mean = std::move(mean);
  out.stats_.stddev = std::move(stddev);
  out.normalized_ = true;
  out.reset_space();
  return out;
}

PartitionedDataset::PartitionedDataset(std::shared_ptr<const Dataset> data,
                                       std::vector<std::vector<Index>> blocks)
    : data_(std::move(data)), blocks_(std::move(blocks)) {
  if (!data_) throw std::invalid_argument("null dataset");
  if (blocks_.empty()) throw std::invalid_argument("need at least one block");
  const Index m = data_->n_instances();
  partition_of_.assign(m, -1);
  local_of_.assign(m, -1);
  for (Index p = 0; p < n_partitions(); ++p) {
    const auto& block = blocks_[p];
    for (std::size_t l = 0; l < block.size(); ++l) {
      const Index g = block[l];
      if (g < 0 || g >= m || partition_of_[g] != -1) {
        throw IntegrityError("partition blocks are not a disjoint cover");
      }
      partition_of_[g] = p;
      local_of_[g] = static_cast<Index>(l);
    }
  }
  for (Index g = 0; g < m; ++g) {
    if (partition_of_[g] == -1) {
      throw IntegrityError("partition blocks do not cover the dataset");
    }
  }
}

PartitionedDataset partition(std::shared_ptr<const Dataset> data, Index p,
                             std::uint64_t seed) {
  const Index m = data->n_instances();
  if (p < 1 || p > m) {
    throw std::invalid_argument("partition count must be in [1, m]; got " +
                                std::to_string(p));
  }
  std::vector<Index> order(m);
  std::iota(order.begin(), order.end(), Index{0});
  if (p > 1) {
    auto rng = make_rng(seed, rng_stream::partition);
    std::shuffle(order.begin(), order.end(), rng);
  }
  std::vector<std::vector<Index>> blocks(p);
  // Balanced sizes: the first m % p blocks get one extra row.
  Index offset = 0;
  for (Index b = 0; b < p; ++b) {
    const Index size = m / p + (b < m % p ? 1 : 0);
    blocks[b].assign(order.begin() + offset, order.begin() + offset + size);
    std::sort(blocks[b].begin(), blocks[b].end());
    offset += size;
  }
  return PartitionedDataset(std::move(data), std::move(blocks));
}

std::vector<Index> draw_sample(const PartitionedDataset& data, double rate,
                               std::uint64_t seed) {
  if (!(rate > 0.0 && rate <= 1.0)) {
    throw std::invalid_argument("sampling rate must be in (0, 1]");
  }
  const Index m = data.data().n_instances();
  const double target = rate * static_cast<double>(m);
  if (target < 1.0) {
    throw std::invalid_argument("sampling rate yields an empty sample");
  }
  // Guard against representation error pushing an exact product over the
  // next integer (0.07 * 100 = 7.000000000000001).
  const Index n = std::min<Index>(
      m, static_cast<Index>(std::ceil(target - 1e-9 * target)));
  std::vector<Index> order(m);
  std::iota(order.begin(), order.end(), Index{0});
  auto rng = make_rng(seed, rng_stream::sample);
  // Partial Fisher-Yates: the first n slots are a uniform draw.
  for (Index i = 0; i < n; ++i) {
    std::uniform_int_distribution<Index> pick(i, m - 1);
    std::swap(order[i], order[pick(rng)]);
  }
  order.resize(n);
  return order;
}

std::vector<SampleBatch> split_batches(const PartitionedDataset& data,
                                       std::span<const Index> sample,
                                       Index batches) {
  if (batches < 1) throw std::invalid_argument("batch count must be >= 1");
  const Index n = static_cast<Index>(sample.size());
  const Dataset& d = data.data();
  std::vector<SampleBatch> out(batches);
  Index offset = 0;
  for (Index b = 0; b < batches; ++b) {
    const Index size = n / batches + (b < n % batches ? 1 : 0);
    out[b].batch_id = b;
    out[b].members.reserve(size);
    for (Index t = offset; t < offset + size; ++t) {
      const Index g = sample[t];
      out[b].members.push_back(SampleMember{g, d.instance(g), d.label(g)});
    }
    offset += size;
  }
  return out;
}

std::vector<SampleBatch> draw_sample(const PartitionedDataset& data,
                                     double rate, std::uint64_t seed,
                                     Index batches) {
  const auto sample = draw_sample(data, rate, seed);
  return split_batches(data, sample, batches);
}

}  // namespace belief
