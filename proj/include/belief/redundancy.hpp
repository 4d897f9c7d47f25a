#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "json.hpp"

#include "belief/dataset.hpp"

namespace belief {

/// After z-scoring the maximum collision distance 6 sigma becomes 6.
inline constexpr double kCollisionSpan = 6.0;
inline constexpr double kDefaultKappa = 0.8;
inline constexpr double kDefaultEta = 2.0;
/// Up to this many features the first batch tracks every pair.
inline constexpr Index kBootstrapAllPairsLimit = 5000;

/// Graded collision from a z-scored diff. Nominal diffs are 0/1 and give a
/// full or no collision without passing through kappa. Numeric rates in
/// (0, kappa) are dropped, so the result lies in {0} U [kappa, 1].
inline double collision_rate_from_diff(double diff, FeatureKind kind,
                                       double kappa) {
  if (kind == FeatureKind::nominal) return diff == 0.0 ? 1.0 : 0.0;
  const double rate = 1.0 - diff / kCollisionSpan;
  if (rate <= 0.0) return 0.0;
  return rate < kappa ? 0.0 : rate;
}

inline double collision_rate(double a, double b, FeatureKind kind,
                             double kappa) {
  if (kind == FeatureKind::nominal) return a == b ? 1.0 : 0.0;
  return collision_rate_from_diff(a > b ? a - b : b - a, kind, kappa);
}

/// Features whose pairs are recorded in the joint table. A pair is recorded
/// when at least one of its members is tracked.
class TrackedFeatures {
 public:
  static TrackedFeatures none(Index n_features);
  static TrackedFeatures all(Index n_features);
  static TrackedFeatures of(Index n_features, std::vector<Index> features);

  Index n_features() const { return static_cast<Index>(mask_.size()); }
  bool contains(Index j) const { return mask_[j] != 0; }
  const std::vector<Index>& list() const { return list_; }
  bool empty() const { return list_.empty(); }
  bool saturated() const { return n_features() == static_cast<Index>(list_.size()); }

 private:
  std::vector<char> mask_;
  std::vector<Index> list_;
};

/// Marginal collision mass O, joint collision mass P over recorded pairs, and
/// the number of (sample, neighbor) pairs seen. Each recorded pair update is
/// stored in exactly one row: the lower-indexed member when both are
/// tracked, otherwise the tracked one. `pair()` reads both locations.
template <typename Scalar>
struct BasicCollisionTables {
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Vector marginal;
  std::map<Index, Vector> joint;
  std::int64_t n_pairs = 0;

  BasicCollisionTables() = default;
  explicit BasicCollisionTables(Index n_features)
      : marginal(Vector::Zero(n_features)) {}

  Index n_features() const { return marginal.size(); }

  Vector& row(Index owner) {
    auto it = joint.find(owner);
    if (it == joint.end()) {
      it = joint.emplace(owner, Vector::Zero(n_features())).first;
    }
    return it->second;
  }

  bool has_pair(Index i, Index j) const {
    return i != j && (joint.count(i) != 0 || joint.count(j) != 0);
  }

  Scalar pair(Index i, Index j) const {
    Scalar total(0.0);
    if (i == j) return total;
    if (auto it = joint.find(i); it != joint.end()) total += it->second[j];
    if (auto it = joint.find(j); it != joint.end()) total += it->second[i];
    return total;
  }

  BasicCollisionTables& operator+=(const BasicCollisionTables& other) {
    if (marginal.size() == 0 && n_pairs == 0) marginal = Vector::Zero(other.n_features());
    marginal += other.marginal;
    for (const auto& [owner, values] : other.joint) row(owner) += values;
    n_pairs += other.n_pairs;
    return *this;
  }

  template <typename To>
  BasicCollisionTables<To> cast() const {
    BasicCollisionTables<To> out;
    out.marginal = marginal.template cast<To>();
    for (const auto& [owner, values] : joint) {
      out.joint.emplace(owner, values.template cast<To>());
    }
    out.n_pairs = n_pairs;
    return out;
  }
};

using CollisionTables = BasicCollisionTables<double>;

/// Reusable buffers for one worker.
struct CollisionScratch {
  std::vector<double> rate;
  std::vector<Index> colliding;
};

/// Adds one (sample, neighbor) pair given its per-feature z-scored diffs:
/// O(i) += CR_i for every colliding feature, and P(i, j) += min(CR_i, CR_j)
/// for every colliding pair with at least one tracked member.
template <typename Scalar>
void update_collisions_from_diffs(BasicCollisionTables<Scalar>& tables,
                                  std::span<const double> diffs,
                                  const FeatureSpace& space,
                                  const TrackedFeatures& tracked, double kappa,
                                  CollisionScratch& scratch) {
  const Index n = static_cast<Index>(diffs.size());
  scratch.rate.resize(static_cast<std::size_t>(n));
  scratch.colliding.clear();
  ++tables.n_pairs;
  for (Index j = 0; j < n; ++j) {
    const double cr = collision_rate_from_diff(diffs[j], space.kinds[j], kappa);
    scratch.rate[j] = cr;
    if (cr > 0.0) {
      tables.marginal[j] += Scalar(cr);
      scratch.colliding.push_back(j);
    }
  }
  if (tracked.empty()) return;
  for (Index t : scratch.colliding) {
    if (!tracked.contains(t)) continue;
    auto& row = tables.row(t);
    const double rt = scratch.rate[t];
    for (Index j : scratch.colliding) {
      if (j == t || (j < t && tracked.contains(j))) continue;
      const double rj = scratch.rate[j];
      row[j] += Scalar(rt < rj ? rt : rj);
    }
  }
}

/// Convenience form computing the diffs from two instances.
void update_collisions(CollisionTables& tables, const InstanceView& sample,
                       const InstanceView& neighbor, const FeatureSpace& space,
                       const TrackedFeatures& tracked, double kappa);

/// Per-feature z-scored diffs between two instances, written into `out`.
void feature_diffs(const InstanceView& x, const InstanceView& y,
                   const FeatureSpace& space, std::vector<double>& out);

/// Collision-based redundancy for every recorded pair, from collision
/// frequencies PC(i) = O(i)/n and PC(i, j) = P(i, j)/n:
///
///   I(i; j) = PC(i) log2(PC(i, j) / (PC(i) PC(j)))
///
/// symmetrized as the mean of both orientations, i.e. the leading factor is
/// (PC(i) + PC(j)) / 2. Any zero frequency gives 0.
class RedundancyTable {
 public:
  RedundancyTable() = default;

  Index n_features() const { return marginal_pc_.size(); }
  const Eigen::VectorXd& marginal_frequency() const { return marginal_pc_; }

  bool has_pair(Index i, Index j) const {
    return i != j && (values_.count(i) != 0 || values_.count(j) != 0);
  }
  /// Raw redundancy; 0 for pairs that were never recorded.
  double value(Index i, Index j) const;
  double joint_frequency(Index i, Index j) const;

  /// Positive part of the redundancy, minmax-scaled over recorded pairs.
  /// Unrecorded pairs contribute 0.
  double normalized(Index i, Index j) const;
  /// Row of normalized redundancies against `i`, when `i` owns a row.
  const Eigen::VectorXd* normalized_row(Index i) const;
  const std::map<Index, Eigen::VectorXd>& normalized_rows() const {
    return normalized_;
  }

  double lower_bound() const { return lo_; }
  double upper_bound() const { return hi_; }
  Index n_recorded_pairs() const { return n_recorded_; }

  nlohmann::json to_json() const;

  friend RedundancyTable compute_mcr(const CollisionTables& tables);

 private:
  Eigen::VectorXd marginal_pc_;
  std::map<Index, Eigen::VectorXd> values_;
  std::map<Index, Eigen::VectorXd> joint_pc_;
  std::map<Index, Eigen::VectorXd> normalized_;
  double lo_ = 0.0;
  double hi_ = 0.0;
  Index n_recorded_ = 0;
};

/// Throws std::invalid_argument when no pair has been recorded.
RedundancyTable compute_mcr(const CollisionTables& tables);

/// Redundancy of a single pair from its frequencies.
double collision_redundancy(double pc_i, double pc_j, double pc_ij);

/// ceil(|S| * eta) highest-ranked features, ties by ascending index.
TrackedFeatures eta_tracked(const Eigen::VectorXd& ranking, Index n_select,
                            double eta);

}  // namespace belief
