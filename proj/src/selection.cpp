#include "belief/selection.hpp"

#include <chrono>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "belief/neighbors.hpp"

namespace belief {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string format_real(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

}  // namespace

const char* to_string(Aggregation mode) {
  return mode == Aggregation::pooled ? "pooled" : "per-batch";
}

Aggregation aggregation_from_string(const std::string& name) {
  if (name == "pooled") return Aggregation::pooled;
  if (name == "per-batch" || name == "per_batch") return Aggregation::per_batch;
  throw std::invalid_argument("unknown aggregation mode '" + name + "'");
}

void SelectorConfig::validate() const {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (!(sample_rate > 0.0 && sample_rate <= 1.0)) {
    throw std::invalid_argument("sample rate must lie in (0, 1]");
  }
  if (batches < 1) throw std::invalid_argument("batch count must be >= 1");
  if (n_select < 1) throw std::invalid_argument("selection size must be >= 1");
  if (!(theta >= 0.0)) throw std::invalid_argument("theta must be >= 0");
  if (!(eta > 0.0)) throw std::invalid_argument("eta must be > 0");
  if (!(kappa >= 0.0 && kappa <= 1.0)) {
    throw std::invalid_argument("kappa must lie in [0, 1]");
  }
  if (partitions < 1) throw std::invalid_argument("partition count must be >= 1");
  if (threads < 0) throw std::invalid_argument("thread count must be >= 0");
}

nlohmann::json SelectorConfig::to_json() const {
  nlohmann::json doc = {{"k", k},
                        {"sample_rate", sample_rate},
                        {"batches", batches},
                        {"n_select", n_select},
                        {"theta", theta},
                        {"eta", eta},
                        {"kappa", kappa},
                        {"partitions", partitions},
                        {"seed", seed},
                        {"deterministic", deterministic},
                        {"aggregation", to_string(aggregation)},
                        {"redundancy", redundancy}};
  if (threshold) doc["threshold"] = *threshold;
  return doc;
}

nlohmann::json RunMetadata::to_json() const {
  return {{"seconds", seconds},
          {"sample_size", sample_size},
          {"batches_run", batches_run},
          {"batches_skipped", batches_skipped},
          {"locator_count", locator_count},
          {"locator_bytes", locator_bytes},
          {"full_instance_bytes", full_instance_bytes},
          {"distance_evaluations", distance_evaluations},
          {"warnings", warnings}};
}

std::vector<Index> RankingResult::features() const {
  std::vector<Index> out;
  out.reserve(selected.size());
  for (const auto& s : selected) out.push_back(s.feature);
  return out;
}

nlohmann::json RankingResult::to_json() const {
  nlohmann::json doc;
  doc["method"] = method;
  auto& sel = doc["selected"] = nlohmann::json::array();
  for (std::size_t r = 0; r < selected.size(); ++r) {
    const auto& s = selected[r];
    sel.push_back({{"rank", r + 1},
                   {"feature", s.feature},
                   {"weight", s.weight},
                   {"normalized_weight", s.normalized_weight},
                   {"penalty", s.penalty},
                   {"score", s.score}});
  }
  doc["weights"] = weights.to_json();
  if (threshold && weights.size() > 0) {
    const Eigen::VectorXd norm = minmax_normalize(weights.values);
    auto marked = nlohmann::json::array();
    for (Index j : weights.ranking()) {
      if (norm[j] > *threshold) marked.push_back(j);
    }
    doc["threshold"] = {{"value", *threshold}, {"features", marked}};
  }
  doc["metadata"] = metadata.to_json();
  return doc;
}

std::string RankingResult::to_text() const {
  std::string out;
  for (const auto& s : selected) {
    out += std::to_string(s.feature) + ' ' + format_real(s.score) + '\n';
  }
  return out;
}

RankingResult sfs(const WeightVector& weights, const RedundancyTable* redundancy,
                  Index n_select, double theta) {
  const Index n = weights.size();
  if (n_select < 0 || n_select > n) {
    throw std::invalid_argument("cannot select " + std::to_string(n_select) +
                                " of " + std::to_string(n) + " features");
  }
  RankingResult result;
  result.weights = weights;
  if (n_select == 0) return result;

  const Eigen::VectorXd norm = minmax_normalize(weights.values);
  Eigen::VectorXd accumulated = Eigen::VectorXd::Zero(n);
  std::vector<char> taken(static_cast<std::size_t>(n), 0);

  for (Index step = 0; step < n_select; ++step) {
    Index best = -1;
    double best_score = 0.0;
    for (Index j = 0; j < n; ++j) {
      if (taken[j]) continue;
      const double score = norm[j] - theta * accumulated[j];
      if (best < 0 || score > best_score) {
        best = j;
        best_score = score;
      }
    }
    taken[best] = 1;
    result.selected.push_back({best, weights.values[best], norm[best],
                               theta * accumulated[best], best_score});
    if (redundancy == nullptr || theta == 0.0) continue;
    if (const Eigen::VectorXd* row = redundancy->normalized_row(best)) {
      for (Index j = 0; j < n; ++j) {
        if (!taken[j]) accumulated[j] += (*row)[j];
      }
    } else {
      // Only pairs stored under the other member exist.
      for (const auto& [owner, row] : redundancy->normalized_rows()) {
        if (!taken[owner]) accumulated[owner] += row[best];
      }
    }
  }
  return result;
}

BeliefState run_batches(const SelectorConfig& config,
                        std::shared_ptr<const Dataset> data) {
  config.validate();
  if (!data) throw std::invalid_argument("no dataset");
  const auto total_start = Clock::now();
  BeliefState state;
  auto& meta = state.metadata;

  auto start = Clock::now();
  if (!data->is_normalized()) {
    data = std::make_shared<const Dataset>(zscore_normalize(*data));
  }
  meta.seconds["normalize"] = seconds_since(start);
  const Dataset& d = *data;
  const Index n = d.n_features();
  if (config.n_select > n) {
    throw std::invalid_argument("cannot select " + std::to_string(config.n_select) +
                                " of " + std::to_string(n) + " features");
  }

  start = Clock::now();
  const PartitionedDataset pd = partition(data, config.partitions, config.seed);
  meta.seconds["partition"] = seconds_since(start);

  start = Clock::now();
  const std::vector<Index> sample = draw_sample(pd, config.sample_rate, config.seed);
  const std::vector<SampleBatch> batches = split_batches(pd, sample, config.batches);
  meta.seconds["sample"] = seconds_since(start);
  meta.sample_size = static_cast<Index>(sample.size());

  const Eigen::VectorXd priors = d.class_priors();
  state.stats = ClassDistanceStats(d.n_classes(), n);
  ExactClassDistanceStats exact;
  if (config.deterministic) exact = ExactClassDistanceStats(d.n_classes(), n);
  state.weights = WeightVector{Eigen::VectorXd::Zero(n), WeightSource::belief};
  Eigen::VectorXd summed = Eigen::VectorXd::Zero(n);

  double neighbor_seconds = 0.0, estimate_seconds = 0.0;
  for (const auto& batch : batches) {
    if (batch.empty()) {
      meta.warnings.push_back("batch " + std::to_string(batch.batch_id) +
                              " is empty; skipped");
      ++meta.batches_skipped;
      continue;
    }
    TrackedFeatures tracked = TrackedFeatures::none(n);
    if (config.redundancy) {
      if (meta.batches_run == 0) {
        if (n <= kBootstrapAllPairsLimit) tracked = TrackedFeatures::all(n);
      } else {
        tracked = eta_tracked(state.weights.values, config.n_select, config.eta);
      }
    }

    start = Clock::now();
    const NeighborTable table = neighborhood(pd, batch, config.k, {config.threads});
    neighbor_seconds += seconds_since(start);
    meta.locator_count += table.emitted_records;
    meta.full_instance_bytes += table.emitted_instance_bytes;
    meta.distance_evaluations += table.distance_evaluations;

    start = Clock::now();
    ClassDistanceStats batch_stats;
    if (config.deterministic) {
      auto exact_batch = estimate_batch<ExactSum>(pd, batch, table, tracked,
                                                  config.kappa, {config.threads});
      exact += exact_batch;
      batch_stats = exact_batch.cast<double>();
      state.stats = exact.cast<double>();
    } else {
      batch_stats = estimate_batch<double>(pd, batch, table, tracked,
                                           config.kappa, {config.threads});
      state.stats += batch_stats;
    }
    WeightVector bw = belief_weights(batch_stats, priors);
    summed += bw.values;
    state.batch_weights.push_back(std::move(bw));
    state.weights.values = config.aggregation == Aggregation::pooled
                               ? belief_weights(state.stats, priors).values
                               : summed;
    estimate_seconds += seconds_since(start);
    state.tracked.push_back(std::move(tracked));
    ++meta.batches_run;
  }
  meta.locator_bytes = meta.locator_count * kLocatorRecordBytes;
  meta.seconds["neighbors"] = neighbor_seconds;
  meta.seconds["estimation"] = estimate_seconds;
  meta.seconds["batches_total"] = seconds_since(total_start);
  return state;
}

RankingResult run_belief(const SelectorConfig& config,
                         std::shared_ptr<const Dataset> data) {
  const auto total_start = Clock::now();
  BeliefState state = run_batches(config, std::move(data));

  auto start = Clock::now();
  std::optional<RedundancyTable> table;
  if (config.redundancy && !state.stats.collisions.joint.empty()) {
    table = compute_mcr(state.stats.collisions);
  }
  state.metadata.seconds["redundancy"] = seconds_since(start);

  start = Clock::now();
  RankingResult result = sfs(state.weights, table ? &*table : nullptr,
                             config.n_select, config.theta);
  state.metadata.seconds["selection"] = seconds_since(start);
  state.metadata.seconds["total"] = seconds_since(total_start);
  result.redundancy = std::move(table);
  result.metadata = std::move(state.metadata);
  result.threshold = config.threshold;
  result.method = config.redundancy && config.theta > 0.0 ? "belief+mcr" : "belief";
  return result;
}

RankingResult run_belief(const SelectorConfig& config, const Dataset& data) {
  return run_belief(config,
                    std::shared_ptr<const Dataset>(&data, [](const Dataset*) {}));
}

}  // namespace belief
