#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <utility>
#include <vector>

#include "belief/dataset.hpp"
#include "belief/estimation.hpp"
#include "belief/neighbors.hpp"
#include "belief/redundancy.hpp"

namespace testing {

using belief::Dataset;
using belief::FeatureKind;
using belief::Index;
using belief::RowMatrix;

struct RandomShape {
  Index m = 50;
  Index n = 5;
  Index classes = 2;
  bool nominal = false;
  /// Values drawn from a small integer grid to force distance ties.
  bool ties = false;
};

inline Dataset random_dense(const RandomShape& s, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<int> grid(0, 3);
  std::uniform_int_distribution<int> cls(0, static_cast<int>(s.classes) - 1);
  RowMatrix x(s.m, s.n);
  std::vector<int> y(s.m);
  std::vector<FeatureKind> kinds(s.n, FeatureKind::numeric);
  if (s.nominal) {
    for (Index j = 0; j < s.n; j += 3) kinds[j] = FeatureKind::nominal;
  }
  for (Index i = 0; i < s.m; ++i) {
    // Guarantee every class appears.
    y[i] = i < s.classes ? static_cast<int>(i) : cls(rng);
    for (Index j = 0; j < s.n; ++j) {
      if (kinds[j] == FeatureKind::nominal) {
        x(i, j) = grid(rng);
      } else {
        x(i, j) = s.ties ? grid(rng) : gauss(rng) + 0.7 * y[i] * (j % 2);
      }
    }
  }
  return Dataset::from_dense(std::move(x), std::move(y), std::move(kinds));
}

inline Dataset random_sparse(Index m, Index n, Index classes, double density,
                             std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> cls(0, static_cast<int>(classes) - 1);
  std::vector<belief::SparseRow> rows(m);
  std::vector<int> y(m);
  for (Index i = 0; i < m; ++i) {
    y[i] = i < classes ? static_cast<int>(i) : cls(rng);
    for (Index j = 0; j < n; ++j) {
      if (unit(rng) < density) {
        rows[i].indices.push_back(static_cast<std::int32_t>(j));
        rows[i].values.push_back(std::round(unit(rng) * 40.0) / 8.0 + 0.5 * y[i]);
      }
    }
  }
  return Dataset::from_sparse(std::move(rows), std::move(y), n);
}

inline std::shared_ptr<const Dataset> share(Dataset d) {
  return std::make_shared<const Dataset>(std::move(d));
}

/// Single-pass brute-force search over the whole dataset, ignoring partitions.
inline belief::NeighborTable brute_force_neighbors(const belief::PartitionedDataset& pd,
                                                   const belief::SampleBatch& batch,
                                                   Index k) {
  const Dataset& d = pd.data();
  belief::NeighborTable table(batch.size(), d.n_classes(), k);
  for (Index q = 0; q < batch.size(); ++q) {
    const auto& member = batch.members[q];
    std::vector<std::vector<std::pair<double, Index>>> per_class(d.n_classes());
    for (Index g = 0; g < d.n_instances(); ++g) {
      if (g == member.global_index) continue;
      per_class[d.label(g)].push_back(
          {belief::instance_distance(member.instance.view(), d.view(g), d.space()), g});
    }
    for (Index c = 0; c < d.n_classes(); ++c) {
      auto& list = per_class[c];
      std::sort(list.begin(), list.end());
      auto& bucket = table.bucket_mut(q, c);
      for (Index t = 0; t < std::min<Index>(k, static_cast<Index>(list.size())); ++t) {
        const Index g = list[t].second;
        bucket.push_back({static_cast<std::int32_t>(pd.partition_of(g)),
                          static_cast<std::int32_t>(pd.local_index_of(g)), list[t].first});
      }
    }
  }
  return table;
}

/// Naive statistics straight from the buckets, with diffs taken from the
/// effective values and collisions tallied in a dense symmetric matrix.
struct NaiveStats {
  Eigen::MatrixXd dd, ed;
  Eigen::VectorXd dc, ec;
  Eigen::VectorXd marginal;
  Eigen::MatrixXd joint;
  std::int64_t n_pairs = 0;
};

inline NaiveStats naive_stats(const belief::PartitionedDataset& pd,
                              const belief::SampleBatch& batch,
                              const belief::NeighborTable& table,
                              const belief::TrackedFeatures& tracked, double kappa) {
  const Dataset& d = pd.data();
  const Index n = d.n_features(), nc = d.n_classes();
  NaiveStats s;
  s.dd = Eigen::MatrixXd::Zero(nc, n);
  s.ed = Eigen::MatrixXd::Zero(nc, n);
  s.dc = Eigen::VectorXd::Zero(nc);
  s.ec = Eigen::VectorXd::Zero(nc);
  s.marginal = Eigen::VectorXd::Zero(n);
  s.joint = Eigen::MatrixXd::Zero(n, n);
  for (Index q = 0; q < batch.size(); ++q) {
    const Index r = batch.members[q].global_index;
    const int y = d.label(r);
    for (Index c = 0; c < nc; ++c) {
      for (const auto& loc : table.bucket(q, c)) {
        const Index g = pd.global_index(loc.partition, loc.local);
        std::vector<double> diff(n), rate(n);
        for (Index j = 0; j < n; ++j) {
          const double a = d.value(r, j), b = d.value(g, j);
          if (d.kind(j) == FeatureKind::nominal) {
            diff[j] = a == b ? 0.0 : 1.0;
            rate[j] = a == b ? 1.0 : 0.0;
          } else {
            diff[j] = std::abs(a - b);
            const double cr = std::max(0.0, 1.0 - diff[j] / 6.0);
            rate[j] = cr < kappa ? 0.0 : cr;
          }
        }
        const bool hit = d.label(g) == y;
        for (Index j = 0; j < n; ++j) (hit ? s.ed : s.dd)(y, j) += diff[j];
        (hit ? s.ec : s.dc)[y] += 1.0;
        ++s.n_pairs;
        for (Index i = 0; i < n; ++i) {
          s.marginal[i] += rate[i];
          for (Index j = i + 1; j < n; ++j) {
            if (!(tracked.contains(i) || tracked.contains(j))) continue;
            if (rate[i] > 0.0 && rate[j] > 0.0) {
              const double v = std::min(rate[i], rate[j]);
              s.joint(i, j) += v;
              s.joint(j, i) += v;
            }
          }
        }
      }
    }
  }
  return s;
}

template <typename Scalar>
double max_abs_diff(const belief::BasicClassDistanceStats<Scalar>& stats,
                    const NaiveStats& naive) {
  const auto s = stats.template cast<double>();
  double worst = 0.0;
  worst = std::max(worst, (s.miss_distance - naive.dd).cwiseAbs().maxCoeff());
  worst = std::max(worst, (s.hit_distance - naive.ed).cwiseAbs().maxCoeff());
  worst = std::max(worst, (s.miss_count.template cast<double>() - naive.dc).cwiseAbs().maxCoeff());
  worst = std::max(worst, (s.hit_count.template cast<double>() - naive.ec).cwiseAbs().maxCoeff());
  worst = std::max(worst, (s.collisions.marginal - naive.marginal).cwiseAbs().maxCoeff());
  const Index n = naive.joint.rows();
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      if (i == j) continue;
      worst = std::max(worst, std::abs(s.collisions.pair(i, j) - naive.joint(i, j)));
    }
  }
  if (s.collisions.n_pairs != naive.n_pairs) worst = std::max(worst, 1.0);
  return worst;
}

/// Max entrywise gap between two stats objects, including collision pairs.
inline double stats_gap(const belief::ClassDistanceStats& a,
                        const belief::ClassDistanceStats& b) {
  double worst = 0.0;
  worst = std::max(worst, (a.miss_distance - b.miss_distance).cwiseAbs().maxCoeff());
  worst = std::max(worst, (a.hit_distance - b.hit_distance).cwiseAbs().maxCoeff());
  if (a.miss_count != b.miss_count || a.hit_count != b.hit_count) return 1e300;
  if (a.collisions.n_pairs != b.collisions.n_pairs) return 1e300;
  worst = std::max(worst, (a.collisions.marginal - b.collisions.marginal).cwiseAbs().maxCoeff());
  const Index n = a.n_features();
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      worst = std::max(worst, std::abs(a.collisions.pair(i, j) - b.collisions.pair(i, j)));
    }
  }
  return worst;
}

/// Bitwise equality of every accumulated value.
inline bool stats_identical(const belief::ClassDistanceStats& a,
                            const belief::ClassDistanceStats& b) {
  if (a.miss_distance != b.miss_distance || a.hit_distance != b.hit_distance) return false;
  if (a.miss_count != b.miss_count || a.hit_count != b.hit_count) return false;
  if (a.collisions.n_pairs != b.collisions.n_pairs) return false;
  if (a.collisions.marginal != b.collisions.marginal) return false;
  const Index n = a.n_features();
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      if (a.collisions.pair(i, j) != b.collisions.pair(i, j)) return false;
    }
  }
  return true;
}

}  // namespace testing
