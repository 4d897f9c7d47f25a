#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "belief/dataset.hpp"
#include "belief/estimation.hpp"
#include "belief/redundancy.hpp"

namespace belief {

/// (v - min) / (max - min); a constant input maps to zeros.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> minmax_normalize(
    const Eigen::MatrixBase<Derived>& values) {
  using Scalar = typename Derived::Scalar;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  if (values.size() == 0) throw std::invalid_argument("minmax of an empty vector");
  const Scalar lo = values.minCoeff();
  const Scalar range = values.maxCoeff() - lo;
  if (!(range > Scalar(0))) return Vector::Zero(values.size());
  return ((values.array() - lo) / range).matrix();
}

/// How per-batch estimates are combined.
///   pooled     batch stats are summed and weights are computed once on the
///              totals (equals a single batch over the whole sample)
///   per_batch  the weight vectors of the batches are summed
enum class Aggregation { pooled, per_batch };

const char* to_string(Aggregation mode);
Aggregation aggregation_from_string(const std::string& name);

struct SelectorConfig {
  Index k = 10;
  double sample_rate = 0.01;
  Index batches = 1;
  Index n_select = 10;
  double theta = 0.5;
  double eta = kDefaultEta;
  double kappa = kDefaultKappa;
  Index partitions = 1;
  std::uint64_t seed = 1;
  std::optional<double> threshold;
  bool deterministic = false;
  int threads = 0;
  Aggregation aggregation = Aggregation::pooled;
  /// Record joint collisions. Off means marginals only and no redundancy
  /// penalty, whatever theta is.
  bool redundancy = true;

  /// Throws std::invalid_argument on out-of-range parameters.
  void validate() const;
  nlohmann::json to_json() const;
};

struct SelectedFeature {
  Index feature = 0;
  double weight = 0.0;
  double normalized_weight = 0.0;
  /// theta times the accumulated normalized redundancy at selection time.
  double penalty = 0.0;
  double score = 0.0;
};

struct RunMetadata {
  std::map<std::string, double> seconds;
  Index sample_size = 0;
  Index batches_run = 0;
  Index batches_skipped = 0;
  std::uint64_t locator_count = 0;
  std::uint64_t locator_bytes = 0;
  std::uint64_t full_instance_bytes = 0;
  std::uint64_t distance_evaluations = 0;
  std::vector<std::string> warnings;

  nlohmann::json to_json() const;
};

struct RankingResult {
  std::vector<SelectedFeature> selected;
  WeightVector weights;
  std::optional<RedundancyTable> redundancy;
  RunMetadata metadata;
  std::string method = "belief";
  /// Reporting mode: features whose normalized weight exceeds this value.
  std::optional<double> threshold;

  std::vector<Index> features() const;
  nlohmann::json to_json() const;
  /// One "feature score" line per selected feature.
  std::string to_text() const;
};

/// Greedy forward selection on J = w_norm - theta * sum I_norm(s, candidate).
/// Penalties grow by one term per step, against the last selected feature.
/// Missing redundancy (or unrecorded pairs) counts as 0. Ties go to the
/// lower index. Throws when n_select exceeds the feature count.
RankingResult sfs(const WeightVector& weights, const RedundancyTable* redundancy,
                  Index n_select, double theta);

/// Everything the batch loop produced, before redundancy and SFS.
struct BeliefState {
  ClassDistanceStats stats;
  WeightVector weights;
  std::vector<WeightVector> batch_weights;
  std::vector<TrackedFeatures> tracked;
  RunMetadata metadata;
};

/// Partition, sample, split, and run each batch through the neighbor and
/// estimation phases. Normalizes the dataset first when needed.
BeliefState run_batches(const SelectorConfig& config,
                        std::shared_ptr<const Dataset> data);

RankingResult run_belief(const SelectorConfig& config,
                         std::shared_ptr<const Dataset> data);
/// The dataset must outlive the call.
RankingResult run_belief(const SelectorConfig& config, const Dataset& data);

}  // namespace belief
