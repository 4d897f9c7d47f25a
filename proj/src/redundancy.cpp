#include "belief/redundancy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "belief/neighbors.hpp"

namespace belief {

TrackedFeatures TrackedFeatures::none(Index n_features) {
  TrackedFeatures t;
  t.mask_.assign(static_cast<std::size_t>(n_features), 0);
  return t;
}

TrackedFeatures TrackedFeatures::all(Index n_features) {
  TrackedFeatures t;
  t.mask_.assign(static_cast<std::size_t>(n_features), 1);
  t.list_.resize(static_cast<std::size_t>(n_features));
  std::iota(t.list_.begin(), t.list_.end(), Index{0});
  return t;
}

TrackedFeatures TrackedFeatures::of(Index n_features,
                                    std::vector<Index> features) {
  TrackedFeatures t = none(n_features);
  std::sort(features.begin(), features.end());
  features.erase(std::unique(features.begin(), features.end()), features.end());
  for (Index j : features) {
    if (j < 0 || j >= n_features) {
      throw std::invalid_argument("tracked feature out of range");
    }
    t.mask_[j] = 1;
  }
  t.list_ = std::move(features);
  return t;
}

void feature_diffs(const InstanceView& x, const InstanceView& y,
                   const FeatureSpace& space, std::vector<double>& out) {
  const Index n = space.size();
  out.assign(static_cast<std::size_t>(n), 0.0);
  const auto* xd = std::get_if<std::span<const double>>(&x);
  const auto* yd = std::get_if<std::span<const double>>(&y);
  if (xd && yd) {
    if (static_cast<Index>(xd->size()) != n || static_cast<Index>(yd->size()) != n) {
      throw std::invalid_argument("instance dimension does not match");
    }
    for (Index j = 0; j < n; ++j) {
      out[j] = feature_diff((*xd)[j], (*yd)[j], space.kinds[j]) * space.inv_scale[j];
    }
    return;
  }
  // At least one side is sparse: start from the dense side (or zeros) and
  // patch in the stored sparse entries.
  std::vector<double> a(static_cast<std::size_t>(n), 0.0);
  std::vector<double> b(static_cast<std::size_t>(n), 0.0);
  auto fill = [n](const InstanceView& v, std::vector<double>& dst) {
    if (const auto* d = std::get_if<std::span<const double>>(&v)) {
      if (static_cast<Index>(d->size()) != n) {
        throw std::invalid_argument("instance dimension does not match");
      }
      std::copy(d->begin(), d->end(), dst.begin());
    } else {
      const auto& row = *std::get<const SparseRow*>(v);
      for (std::size_t t = 0; t < row.nnz(); ++t) {
        if (row.indices[t] >= n) {
          throw std::invalid_argument("sparse index beyond feature space");
        }
        dst[row.indices[t]] = row.values[t];
      }
    }
  };
  fill(x, a);
  fill(y, b);
  for (Index j = 0; j < n; ++j) {
    out[j] = feature_diff(a[j], b[j], space.kinds[j]) * space.inv_scale[j];
  }
}

void update_collisions(CollisionTables& tables, const InstanceView& sample,
                       const InstanceView& neighbor, const FeatureSpace& space,
                       const TrackedFeatures& tracked, double kappa) {
  if (tables.n_features() != space.size()) {
    throw std::invalid_argument("collision tables do not match feature space");
  }
  std::vector<double> diffs;
  feature_diffs(sample, neighbor, space, diffs);
  CollisionScratch scratch;
  update_collisions_from_diffs(tables, diffs, space, tracked, kappa, scratch);
}

double collision_redundancy(double pc_i, double pc_j, double pc_ij) {
  if (pc_i <= 0.0 || pc_j <= 0.0 || pc_ij <= 0.0) return 0.0;
  return 0.5 * (pc_i + pc_j) * std::log2(pc_ij / (pc_i * pc_j));
}

double RedundancyTable::value(Index i, Index j) const {
  if (i == j) return 0.0;
  if (auto it = values_.find(i); it != values_.end()) return it->second[j];
  if (auto it = values_.find(j); it != values_.end()) return it->second[i];
  return 0.0;
}

double RedundancyTable::joint_frequency(Index i, Index j) const {
  if (i == j) return 0.0;
  if (auto it = joint_pc_.find(i); it != joint_pc_.end()) return it->second[j];
  if (auto it = joint_pc_.find(j); it != joint_pc_.end()) return it->second[i];
  return 0.0;
}

double RedundancyTable::normalized(Index i, Index j) const {
  if (i == j) return 0.0;
  if (auto it = normalized_.find(i); it != normalized_.end()) return it->second[j];
  if (auto it = normalized_.find(j); it != normalized_.end()) return it->second[i];
  return 0.0;
}

const Eigen::VectorXd* RedundancyTable::normalized_row(Index i) const {
  auto it = normalized_.find(i);
  return it == normalized_.end() ? nullptr : &it->second;
}

RedundancyTable compute_mcr(const CollisionTables& tables) {
  if (tables.n_pairs <= 0) {
    throw std::invalid_argument("no collision pairs recorded");
  }
  const Index n = tables.n_features();
  const double pairs = static_cast<double>(tables.n_pairs);
  RedundancyTable out;
  out.marginal_pc_ = tables.marginal / pairs;
  const auto& pc = out.marginal_pc_;

  // Every owner row spans all features; a pair owned twice (both members
  // tracked in different batches) gets the same value in both rows.
  for (const auto& [owner, unused] : tables.joint) {
    Eigen::VectorXd joint(n), values(n);
    for (Index j = 0; j < n; ++j) {
      if (j == owner) {
        joint[j] = values[j] = 0.0;
        continue;
      }
      joint[j] = tables.pair(owner, j) / pairs;
      values[j] = collision_redundancy(pc[owner], pc[j], joint[j]);
    }
    out.joint_pc_.emplace(owner, std::move(joint));
    out.values_.emplace(owner, std::move(values));
  }

  bool first = true;
  Index recorded = 0;
  for (const auto& [owner, values] : out.values_) {
    for (Index j = 0; j < n; ++j) {
      if (j == owner) continue;
      // Count a doubly owned pair once.
      if (j < owner && out.values_.count(j) != 0) continue;
      const double v = std::max(values[j], 0.0);
      out.lo_ = first ? v : std::min(out.lo_, v);
      out.hi_ = first ? v : std::max(out.hi_, v);
      first = false;
      ++recorded;
    }
  }
  out.n_recorded_ = recorded;
  const double range = out.hi_ - out.lo_;
  for (const auto& [owner, values] : out.values_) {
    Eigen::VectorXd scaled(n);
    for (Index j = 0; j < n; ++j) {
      scaled[j] = (j == owner || range <= 0.0)
                      ? 0.0
                      : (std::max(values[j], 0.0) - out.lo_) / range;
    }
    out.normalized_.emplace(owner, std::move(scaled));
  }
  return out;
}

nlohmann::json RedundancyTable::to_json() const {
  nlohmann::json doc;
  doc["n_features"] = n_features();
  doc["bounds"] = {{"min", lo_}, {"max", hi_}};
  auto& pairs = doc["pairs"] = nlohmann::json::array();
  for (const auto& [owner, values] : values_) {
    for (Index j = 0; j < n_features(); ++j) {
      if (j == owner || (j < owner && values_.count(j) != 0)) continue;
      const Index a = std::min(owner, j), b = std::max(owner, j);
      pairs.push_back({{"i", a},
                       {"j", b},
                       {"pc_i", marginal_pc_[a]},
                       {"pc_j", marginal_pc_[b]},
                       {"pc_ij", joint_frequency(a, b)},
                       {"i_alpha", values[j]},
                       {"normalized", normalized(a, b)}});
    }
  }
  return doc;
}

TrackedFeatures eta_tracked(const Eigen::VectorXd& ranking, Index n_select,
                            double eta) {
  if (n_select < 1) throw std::invalid_argument("|S| must be >= 1");
  if (!(eta > 0.0)) throw std::invalid_argument("eta must be > 0");
  const Index n = ranking.size();
  const double target = static_cast<double>(n_select) * eta;
  const Index count = std::min<Index>(
      n, static_cast<Index>(std::ceil(target - 1e-9 * target)));
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return ranking[a] > ranking[b];
  });
  order.resize(static_cast<std::size_t>(count));
  return TrackedFeatures::of(n, std::move(order));
}

}  // namespace belief
