#include "belief/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "belief/baselines.hpp"
#include "belief/error.hpp"
#include "belief/neighbors.hpp"
#include "belief/random.hpp"

namespace belief {

namespace {

RowMatrix restrict_columns(const Dataset& data, const std::vector<Index>& features) {
  RowMatrix out(data.n_instances(), static_cast<Index>(features.size()));
  for (Index i = 0; i < data.n_instances(); ++i) {
    for (std::size_t t = 0; t < features.size(); ++t) {
      out(i, static_cast<Index>(t)) = data.value(i, features[t]);
    }
  }
  return out;
}

}  // namespace

std::vector<int> knn_classify(const Dataset& train, const Dataset& test, Index k,
                              const std::vector<Index>& features) {
  if (features.empty()) throw std::invalid_argument("empty feature subset");
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (train.n_instances() == 0) throw std::invalid_argument("empty training set");
  if (train.n_features() != test.n_features()) {
    throw std::invalid_argument("train and test feature counts differ");
  }
  for (Index j : features) {
    if (j < 0 || j >= train.n_features()) {
      throw std::invalid_argument("feature index out of range");
    }
  }
  const RowMatrix a = restrict_columns(train, features);
  const RowMatrix b = restrict_columns(test, features);
  std::vector<FeatureKind> kinds;
  for (Index j : features) kinds.push_back(train.kind(j));

  const Index n_train = train.n_instances();
  const Index keep = std::min(k, n_train);
  const Index n_classes = std::max(train.n_classes(), test.n_classes());
  std::vector<int> out(static_cast<std::size_t>(test.n_instances()));
  std::vector<std::pair<double, Index>> ranked(static_cast<std::size_t>(n_train));
  std::vector<Index> votes(static_cast<std::size_t>(n_classes));

  for (Index q = 0; q < test.n_instances(); ++q) {
    for (Index i = 0; i < n_train; ++i) {
      double sum = 0.0;
      for (std::size_t t = 0; t < kinds.size(); ++t) {
        const double d = feature_diff(b(q, static_cast<Index>(t)),
                                      a(i, static_cast<Index>(t)), kinds[t]);
        sum += d * d;
      }
      ranked[i] = {sum, i};
    }
    std::partial_sort(ranked.begin(), ranked.begin() + keep, ranked.end());
    std::fill(votes.begin(), votes.end(), 0);
    for (Index r = 0; r < keep; ++r) ++votes[train.label(ranked[r].second)];
    const Index top = *std::max_element(votes.begin(), votes.end());
    for (Index r = 0; r < keep; ++r) {
      const int c = train.label(ranked[r].second);
      if (votes[c] == top) {
        out[q] = c;
        break;
      }
    }
  }
  return out;
}

Metrics evaluate(const std::vector<int>& predictions, const std::vector<int>& labels,
                 Index n_classes) {
  if (predictions.size() != labels.size()) {
    throw std::invalid_argument("prediction and label counts differ");
  }
  Metrics m;
  if (labels.empty()) return m;
  if (n_classes <= 0) {
    const int top = std::max(*std::max_element(labels.begin(), labels.end()),
                             *std::max_element(predictions.begin(), predictions.end()));
    n_classes = std::max<Index>(2, top + 1);
  }
  std::vector<double> tp(n_classes, 0.0), fp(n_classes, 0.0), fn(n_classes, 0.0);
  double correct = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (predictions[i] == labels[i]) {
      correct += 1.0;
      tp[labels[i]] += 1.0;
    } else {
      fp[predictions[i]] += 1.0;
      fn[labels[i]] += 1.0;
    }
  }
  m.accuracy = correct / static_cast<double>(labels.size());
  auto f1_of = [&](Index c) {
    const double p = tp[c] + fp[c] > 0.0 ? tp[c] / (tp[c] + fp[c]) : 0.0;
    const double r = tp[c] + fn[c] > 0.0 ? tp[c] / (tp[c] + fn[c]) : 0.0;
    return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0;
  };
  if (n_classes == 2) {
    m.f1 = f1_of(1);
  } else {
    double total = 0.0;
    for (Index c = 0; c < n_classes; ++c) total += f1_of(c);
    m.f1 = total / static_cast<double>(n_classes);
  }
  return m;
}

std::vector<int> stratified_folds(const std::vector<int>& labels, Index n_classes,
                                  int folds, std::uint64_t seed) {
  if (folds < 2) throw std::invalid_argument("folds must be >= 2");
  std::vector<std::vector<Index>> by_class(static_cast<std::size_t>(n_classes));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    by_class[labels[i]].push_back(static_cast<Index>(i));
  }
  auto rng = make_rng(seed, rng_stream::folds);
  std::vector<int> fold(labels.size(), 0);
  int next = 0;
  for (Index c = 0; c < n_classes; ++c) {
    auto& rows = by_class[c];
    if (rows.empty()) continue;
    if (static_cast<Index>(rows.size()) < folds) {
      throw DataError("class " + std::to_string(c) + " has " +
                      std::to_string(rows.size()) + " rows, fewer than " +
                      std::to_string(folds) + " folds");
    }
    std::shuffle(rows.begin(), rows.end(), rng);
    // Keep dealing where the previous class stopped so fold sizes stay level.
    for (Index r : rows) {
      fold[r] = next;
      next = (next + 1) % folds;
    }
  }
  return fold;
}

const char* to_string(Method method) {
  switch (method) {
    case Method::belief: return "belief";
    case Method::belief_mcr: return "belief+mcr";
    case Method::mrmr: return "mrmr";
    case Method::all: return "all";
  }
  return "unknown";
}

Method method_from_string(const std::string& name) {
  if (name == "belief") return Method::belief;
  if (name == "belief+mcr" || name == "mcr") return Method::belief_mcr;
  if (name == "mrmr") return Method::mrmr;
  if (name == "all") return Method::all;
  throw std::invalid_argument("unknown method '" + name + "'");
}

std::vector<Index> fit_selection(const PipelineConfig& config, const Dataset& train) {
  switch (config.method) {
    case Method::all: {
      std::vector<Index> all(static_cast<std::size_t>(train.n_features()));
      std::iota(all.begin(), all.end(), Index{0});
      return all;
    }
    case Method::mrmr:
      return mrmr_select(train, config.selector.n_select, config.bins).features();
    case Method::belief: {
      SelectorConfig plain = config.selector;
      plain.theta = 0.0;
      plain.redundancy = false;
      return run_belief(plain, train).features();
    }
    case Method::belief_mcr:
      return run_belief(config.selector, train).features();
  }
  throw std::logic_error("unhandled method");
}

nlohmann::json CrossValidation::to_json() const {
  auto per_fold = nlohmann::json::array();
  for (const auto& f : folds) {
    per_fold.push_back({{"accuracy", f.metrics.accuracy},
                        {"f1", f.metrics.f1},
                        {"features", f.features},
                        {"train_size", f.train_rows.size()},
                        {"test_size", f.test_rows.size()}});
  }
  return {{"folds", per_fold},
          {"accuracy", {{"mean", mean.accuracy}, {"stddev", stddev.accuracy}}},
          {"f1", {{"mean", mean.f1}, {"stddev", stddev.f1}}}};
}

CrossValidation cross_validate(const Dataset& data, int folds,
                               const PipelineConfig& config, std::uint64_t seed) {
  const std::vector<int> assignment =
      stratified_folds(data.labels(), data.n_classes(), folds, seed);
  CrossValidation cv;
  for (int f = 0; f < folds; ++f) {
    FoldResult result;
    for (std::size_t i = 0; i < assignment.size(); ++i) {
      (assignment[i] == f ? result.test_rows : result.train_rows)
          .push_back(static_cast<Index>(i));
    }
    const Dataset train = data.subset(result.train_rows);
    const Dataset test = data.subset(result.test_rows);
    result.features = fit_selection(config, train);
    const auto predictions = knn_classify(train, test, config.knn_k, result.features);
    result.metrics = evaluate(predictions, test.labels(), data.n_classes());
    cv.folds.push_back(std::move(result));
  }
  const double n = static_cast<double>(folds);
  for (const auto& f : cv.folds) {
    cv.mean.accuracy += f.metrics.accuracy / n;
    cv.mean.f1 += f.metrics.f1 / n;
  }
  for (const auto& f : cv.folds) {
    cv.stddev.accuracy += std::pow(f.metrics.accuracy - cv.mean.accuracy, 2) / n;
    cv.stddev.f1 += std::pow(f.metrics.f1 - cv.mean.f1, 2) / n;
  }
  cv.stddev.accuracy = std::sqrt(cv.stddev.accuracy);
  cv.stddev.f1 = std::sqrt(cv.stddev.f1);
  return cv;
}

}  // namespace belief
