#include "belief/neighbors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <omp.h>

namespace belief {

namespace {

using DenseSpan = std::span<const double>;

double dense_dense(DenseSpan a, DenseSpan b, const FeatureSpace& space) {
  const Index n = static_cast<Index>(a.size());
  Eigen::Map<const Eigen::VectorXd> x(a.data(), n);
  Eigen::Map<const Eigen::VectorXd> y(b.data(), n);
  if (!space.has_nominal && space.unit_scale) return (x - y).squaredNorm();
  double sum = 0.0;
  for (Index j = 0; j < n; ++j) {
    const double d = feature_diff(x[j], y[j], space.kinds[j]) * space.inv_scale[j];
    sum += d * d;
  }
  return sum;
}

double sparse_sparse(const SparseRow& a, const SparseRow& b,
                     const FeatureSpace& space) {
  double sum = 0.0;
  std::size_t s = 0, t = 0;
  while (s < a.nnz() || t < b.nnz()) {
    Index j;
    double va = 0.0, vb = 0.0;
    if (t >= b.nnz() || (s < a.nnz() && a.indices[s] < b.indices[t])) {
      j = a.indices[s];
      va = a.values[s++];
    } else if (s >= a.nnz() || b.indices[t] < a.indices[s]) {
      j = b.indices[t];
      vb = b.values[t++];
    } else {
      j = a.indices[s];
      va = a.values[s++];
      vb = b.values[t++];
    }
    const double d = feature_diff(va, vb, space.kinds[j]) * space.inv_scale[j];
    sum += d * d;
  }
  return sum;
}

double sparse_dense(const SparseRow& a, DenseSpan b, const FeatureSpace& space) {
  double sum = 0.0;
  std::size_t s = 0;
  for (std::size_t j = 0; j < b.size(); ++j) {
    double va = 0.0;
    if (s < a.nnz() && static_cast<std::size_t>(a.indices[s]) == j) {
      va = a.values[s++];
    }
    const double d = feature_diff(va, b[j], space.kinds[j]) * space.inv_scale[j];
    sum += d * d;
  }
  return sum;
}

struct Candidate {
  double distance;
  Index global;
  std::int32_t local;
};

inline bool closer(const Candidate& a, const Candidate& b) {
  return a.distance < b.distance ||
         (a.distance == b.distance && a.global < b.global);
}

/// Bounded max-heap: the current worst candidate sits at the front.
class BoundedHeap {
 public:
  explicit BoundedHeap(Index k) : k_(static_cast<std::size_t>(k)) {
    items_.reserve(k_);
  }

  void offer(const Candidate& c) {
    if (items_.size() < k_) {
      items_.push_back(c);
      std::push_heap(items_.begin(), items_.end(), closer);
    } else if (closer(c, items_.front())) {
      std::pop_heap(items_.begin(), items_.end(), closer);
      items_.back() = c;
      std::push_heap(items_.begin(), items_.end(), closer);
    }
  }

  std::vector<Candidate> sorted() && {
    std::sort_heap(items_.begin(), items_.end(), closer);
    return std::move(items_);
  }

 private:
  std::size_t k_;
  std::vector<Candidate> items_;
};

}  // namespace

double squared_distance(const InstanceView& x, const InstanceView& y,
                        const FeatureSpace& space) {
  const auto dims = [](const InstanceView& v) -> std::ptrdiff_t {
    if (const auto* d = std::get_if<DenseSpan>(&v)) {
      return static_cast<std::ptrdiff_t>(d->size());
    }
    return -1;
  };
  for (const auto* v : {&x, &y}) {
    const auto n = dims(*v);
    if (n >= 0 && n != space.size()) {
      throw std::invalid_argument("instance dimension does not match");
    }
    if (const auto* s = std::get_if<const SparseRow*>(v)) {
      const auto& row = **s;
      if (!row.indices.empty() && row.indices.back() >= space.size()) {
        throw std::invalid_argument("sparse index beyond feature space");
      }
    }
  }
  const auto* xd = std::get_if<DenseSpan>(&x);
  const auto* yd = std::get_if<DenseSpan>(&y);
  if (xd && yd) return dense_dense(*xd, *yd, space);
  if (!xd && !yd) {
    return sparse_sparse(*std::get<const SparseRow*>(x),
                         *std::get<const SparseRow*>(y), space);
  }
  if (xd) return sparse_dense(*std::get<const SparseRow*>(y), *xd, space);
  return sparse_dense(*std::get<const SparseRow*>(x), *yd, space);
}

double instance_distance(const InstanceView& x, const InstanceView& y,
                         const FeatureSpace& space) {
  return std::sqrt(squared_distance(x, y, space));
}

NeighborTable::NeighborTable(Index n_members, Index n_classes, Index k)
    : n_members_(n_members),
      n_classes_(n_classes),
      k_(k),
      buckets_(static_cast<std::size_t>(n_members * n_classes)) {}

std::vector<NeighborTable::LocalRef> NeighborTable::local_locators(
    Index partition) const {
  std::vector<LocalRef> refs;
  for (Index q = 0; q < n_members_; ++q) {
    for (Index c = 0; c < n_classes_; ++c) {
      for (const auto& loc : bucket(q, c)) {
        if (loc.partition == partition) refs.push_back({q, loc.local});
      }
    }
  }
  return refs;
}

Index NeighborTable::total_locators() const {
  Index total = 0;
  for (const auto& b : buckets_) total += static_cast<Index>(b.size());
  return total;
}

NeighborTable neighborhood(const PartitionedDataset& data,
                           const SampleBatch& batch, Index k,
                           const NeighborOptions& options) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  const Dataset& d = data.data();
  const Index n_classes = d.n_classes();
  const Index n_members = batch.size();
  const Index p = data.n_partitions();
  const FeatureSpace& space = d.space();

  std::vector<InstanceView> queries;
  queries.reserve(n_members);
  for (const auto& m : batch.members) queries.push_back(m.instance.view());

  // partials[partition][member * n_classes + class]
  std::vector<std::vector<std::vector<Candidate>>> partials(p);
  std::vector<std::uint64_t> evaluations(p, 0);

  const int threads = options.threads > 0 ? options.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (Index part = 0; part < p; ++part) {
    std::vector<BoundedHeap> heaps(static_cast<std::size_t>(n_members * n_classes),
                                   BoundedHeap(k));
    const auto block = data.block(part);
    std::uint64_t count = 0;
    // Rows outer, queries inner: each partition row is streamed once while the
    // replicated batch stays in cache.
    for (std::size_t l = 0; l < block.size(); ++l) {
      const Index g = block[l];
      const InstanceView row = d.view(g);
      const int cls = d.label(g);
      for (Index q = 0; q < n_members; ++q) {
        if (batch.members[q].global_index == g) continue;
        const double dist = std::sqrt(squared_distance(queries[q], row, space));
        ++count;
        heaps[q * n_classes + cls].offer(
            Candidate{dist, g, static_cast<std::int32_t>(l)});
      }
    }
    auto& out = partials[part];
    out.reserve(heaps.size());
    for (auto& h : heaps) out.push_back(std::move(h).sorted());
    evaluations[part] = count;
  }

  NeighborTable table(n_members, n_classes, k);
  for (Index part = 0; part < p; ++part) {
    table.distance_evaluations += evaluations[part];
    for (const auto& list : partials[part]) {
      table.emitted_records += list.size();
      for (const auto& c : list) table.emitted_instance_bytes += instance_payload_bytes(d, c.global);
    }
  }

  // Reduce: the order (distance, global) is total, so the merge result does
  // not depend on the order partitions are visited in.
  std::vector<Candidate> pool;
  for (Index q = 0; q < n_members; ++q) {
    for (Index c = 0; c < n_classes; ++c) {
      pool.clear();
      for (Index part = 0; part < p; ++part) {
        const auto& list = partials[part][q * n_classes + c];
        pool.insert(pool.end(), list.begin(), list.end());
      }
      const auto keep = std::min<std::size_t>(pool.size(), static_cast<std::size_t>(k));
      std::partial_sort(pool.begin(), pool.begin() + keep, pool.end(), closer);
      auto& bucket = table.bucket_mut(q, c);
      bucket.reserve(keep);
      for (std::size_t t = 0; t < keep; ++t) {
        const auto& cand = pool[t];
        bucket.push_back(NeighborLocator{
            static_cast<std::int32_t>(data.partition_of(cand.global)),
            cand.local, cand.distance});
      }
    }
  }
  return table;
}

}  // namespace belief
