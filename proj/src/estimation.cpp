#include "belief/estimation.hpp"

#include <algorithm>
#include <exception>
#include <numeric>
#include <stdexcept>

#include <omp.h>

#include "belief/error.hpp"

namespace belief {

template <typename Scalar>
void accumulate_partition_into(const PartitionedDataset& data, Index partition,
                               const SampleBatch& batch,
                               const NeighborTable& table,
                               const TrackedFeatures& tracked, double kappa,
                               BasicClassDistanceStats<Scalar>& stats,
                               AccumulateScratch& scratch) {
  const Dataset& d = data.data();
  if (partition < 0 || partition >= data.n_partitions()) {
    throw std::invalid_argument("partition index out of range");
  }
  if (table.n_members() != batch.size()) {
    throw IntegrityError("neighbor table does not belong to this batch");
  }
  if (stats.n_features() != d.n_features() || stats.n_classes() != d.n_classes()) {
    throw std::invalid_argument("stats shape does not match the dataset");
  }
  const FeatureSpace& space = d.space();
  const Index n = d.n_features();
  const Index size = data.partition_size(partition);

  for (const auto& ref : table.local_locators(partition)) {
    if (ref.local < 0 || ref.local >= size) {
      throw IntegrityError("locator " + std::to_string(ref.local) +
                           " outside partition " + std::to_string(partition));
    }
    const Index global = data.global_index(partition, ref.local);
    const SampleMember& member = batch.members[ref.member];
    if (global == member.global_index) {
      throw IntegrityError("sampled instance listed as its own neighbor");
    }
    const int y = member.label;
    feature_diffs(member.instance.view(), d.view(global), space, scratch.diffs);
    Eigen::Map<const Eigen::RowVectorXd> diff(scratch.diffs.data(), n);
    if (d.label(global) != y) {
      stats.miss_distance.row(y) += diff.template cast<Scalar>();
      ++stats.miss_count[y];
    } else {
      stats.hit_distance.row(y) += diff.template cast<Scalar>();
      ++stats.hit_count[y];
    }
    update_collisions_from_diffs(stats.collisions, scratch.diffs, space,
                                 tracked, kappa, scratch.collisions);
  }
}

template <typename Scalar>
BasicClassDistanceStats<Scalar> estimate_batch(
    const PartitionedDataset& data, const SampleBatch& batch,
    const NeighborTable& table, const TrackedFeatures& tracked, double kappa,
    const EstimationOptions& options) {
  const Dataset& d = data.data();
  const Index p = data.n_partitions();
  const int wanted = options.threads > 0 ? options.threads : omp_get_max_threads();
  const int threads = static_cast<int>(std::min<Index>(wanted, p));

  std::vector<BasicClassDistanceStats<Scalar>> partials;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) partials.emplace_back(d.n_classes(), d.n_features());

#pragma omp parallel num_threads(threads)
  {
    const int t = omp_get_thread_num();
    AccumulateScratch scratch;
#pragma omp for schedule(static)
    for (Index part = 0; part < p; ++part) {
      if (errors[t]) continue;
      try {
        accumulate_partition_into(data, part, batch, table, tracked, kappa,
                                  partials[t], scratch);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  BasicClassDistanceStats<Scalar> total = std::move(partials.front());
  for (std::size_t t = 1; t < partials.size(); ++t) total += partials[t];
  return total;
}

template void accumulate_partition_into<double>(
    const PartitionedDataset&, Index, const SampleBatch&, const NeighborTable&,
    const TrackedFeatures&, double, ClassDistanceStats&, AccumulateScratch&);
template void accumulate_partition_into<ExactSum>(
    const PartitionedDataset&, Index, const SampleBatch&, const NeighborTable&,
    const TrackedFeatures&, double, ExactClassDistanceStats&, AccumulateScratch&);
template ClassDistanceStats estimate_batch<double>(
    const PartitionedDataset&, const SampleBatch&, const NeighborTable&,
    const TrackedFeatures&, double, const EstimationOptions&);
template ExactClassDistanceStats estimate_batch<ExactSum>(
    const PartitionedDataset&, const SampleBatch&, const NeighborTable&,
    const TrackedFeatures&, double, const EstimationOptions&);

const char* to_string(WeightSource source) {
  switch (source) {
    case WeightSource::belief: return "belief";
    case WeightSource::relief: return "relief";
    case WeightSource::relieff: return "relieff";
  }
  return "unknown";
}

std::vector<Index> WeightVector::ranking() const {
  std::vector<Index> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return values[a] > values[b]; });
  return order;
}

nlohmann::json WeightVector::to_json() const {
  auto out = nlohmann::json::array();
  for (Index j : ranking()) out.push_back({{"feature", j}, {"weight", values[j]}});
  return out;
}

WeightVector belief_weights(const ClassDistanceStats& stats,
                            const Eigen::VectorXd& priors) {
  const Index n_classes = stats.n_classes();
  if (priors.size() != n_classes) {
    throw std::invalid_argument("prior vector does not match class count");
  }
  Eigen::VectorXd miss_factor = Eigen::VectorXd::Zero(n_classes);
  Eigen::VectorXd hit_factor = Eigen::VectorXd::Zero(n_classes);
  for (Index c = 0; c < n_classes; ++c) {
    if (stats.miss_count[c] > 0) {
      miss_factor[c] = priors[c] / static_cast<double>(stats.miss_count[c]);
    }
    if (stats.hit_count[c] > 0) {
      hit_factor[c] = priors[c] / static_cast<double>(stats.hit_count[c]);
    }
  }
  WeightVector w;
  w.source = WeightSource::belief;
  w.values = Eigen::VectorXd::Zero(stats.n_features());
  // Explicit class loop keeps the summation order fixed.
  for (Index c = 0; c < n_classes; ++c) {
    if (miss_factor[c] != 0.0) {
      w.values += stats.miss_distance.row(c).transpose() * miss_factor[c];
    }
  }
  for (Index c = 0; c < n_classes; ++c) {
    if (hit_factor[c] != 0.0) {
      w.values -= stats.hit_distance.row(c).transpose() * hit_factor[c];
    }
  }
  return w;
}

namespace {

struct Ranked {
  double distance;
  Index global;
};

/// k nearest instances of class `cls` to row r, self excluded, ties by index.
std::vector<Index> nearest_of_class(const Dataset& data, Index r, int cls,
                                    Index k) {
  std::vector<Ranked> candidates;
  const auto query = data.view(r);
  for (Index g = 0; g < data.n_instances(); ++g) {
    if (g == r || data.label(g) != cls) continue;
    candidates.push_back(
        {instance_distance(query, data.view(g), data.space()), g});
  }
  const auto keep = std::min<std::size_t>(candidates.size(), static_cast<std::size_t>(k));
  std::partial_sort(candidates.begin(), candidates.begin() + keep,
                    candidates.end(), [](const Ranked& a, const Ranked& b) {
                      return a.distance < b.distance ||
                             (a.distance == b.distance && a.global < b.global);
                    });
  std::vector<Index> out;
  for (std::size_t t = 0; t < keep; ++t) out.push_back(candidates[t].global);
  return out;
}

void check_sample(const Dataset& data, std::span<const Index> sample) {
  if (sample.empty()) throw std::invalid_argument("empty sample");
  for (Index r : sample) {
    if (r < 0 || r >= data.n_instances()) {
      throw std::invalid_argument("sample index out of range");
    }
  }
}

}  // namespace

ReliefTerms relieff_terms(const Dataset& data, std::span<const Index> sample,
                          Index k) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  check_sample(data, sample);
  const Index n = data.n_features();
  const Eigen::VectorXd priors = data.class_priors();
  const double scale = static_cast<double>(sample.size()) * static_cast<double>(k);
  ReliefTerms terms{Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};
  std::vector<double> diffs;
  for (Index r : sample) {
    const int y = data.label(r);
    for (int c = 0; c < static_cast<int>(data.n_classes()); ++c) {
      const double weight = c == y ? 1.0 : priors[c];
      auto& target = c == y ? terms.hit : terms.miss;
      for (Index g : nearest_of_class(data, r, c, k)) {
        feature_diffs(data.view(r), data.view(g), data.space(), diffs);
        target += Eigen::Map<const Eigen::VectorXd>(diffs.data(), n) * (weight / scale);
      }
    }
  }
  return terms;
}

WeightVector relieff_reference(const Dataset& data,
                               std::span<const Index> sample, Index k) {
  const auto terms = relieff_terms(data, sample, k);
  return WeightVector{terms.miss - terms.hit, WeightSource::relieff};
}

ReliefTerms relief_terms(const Dataset& data, std::span<const Index> sample) {
  if (data.n_classes() != 2) {
    throw std::invalid_argument("RELIEF supports binary problems only");
  }
  check_sample(data, sample);
  const Index n = data.n_features();
  const double scale = static_cast<double>(sample.size());
  ReliefTerms terms{Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};
  std::vector<double> diffs;
  for (Index r : sample) {
    const int y = data.label(r);
    for (int c = 0; c < 2; ++c) {
      auto& target = c == y ? terms.hit : terms.miss;
      for (Index g : nearest_of_class(data, r, c, 1)) {
        feature_diffs(data.view(r), data.view(g), data.space(), diffs);
        target += Eigen::Map<const Eigen::VectorXd>(diffs.data(), n) / scale;
      }
    }
  }
  return terms;
}

WeightVector relief_reference(const Dataset& data,
                              std::span<const Index> sample) {
  const auto terms = relief_terms(data, sample);
  return WeightVector{terms.miss - terms.hit, WeightSource::relief};
}

}  // namespace belief
