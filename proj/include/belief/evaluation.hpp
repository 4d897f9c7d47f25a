#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "belief/dataset.hpp"
#include "belief/selection.hpp"

namespace belief {

/// Majority vote among the k nearest training rows, using only `features`.
/// Neighbors are ordered by (distance, training index); a tied vote goes to
/// the tied class whose member is nearest.
std::vector<int> knn_classify(const Dataset& train, const Dataset& test, Index k,
                              const std::vector<Index>& features);

struct Metrics {
  double accuracy = 0.0;
  double f1 = 0.0;
};

/// Binary problems score F1 on class 1; multiclass problems macro-average.
/// A zero denominator gives 0.
Metrics evaluate(const std::vector<int>& predictions, const std::vector<int>& labels,
                 Index n_classes = 0);

/// Stratified assignment: the rows of each class are shuffled and dealt
/// round-robin. Throws DataError when a class has fewer rows than folds.
std::vector<int> stratified_folds(const std::vector<int>& labels, Index n_classes,
                                  int folds, std::uint64_t seed);

enum class Method { belief, belief_mcr, mrmr, all };

const char* to_string(Method method);
Method method_from_string(const std::string& name);

struct PipelineConfig {
  Method method = Method::belief_mcr;
  SelectorConfig selector;
  int bins = 10;
  Index knn_k = 1;
};

/// Runs the configured selector; `all` returns every feature.
std::vector<Index> fit_selection(const PipelineConfig& config, const Dataset& train);

struct FoldResult {
  Metrics metrics;
  std::vector<Index> features;
  std::vector<Index> train_rows;
  std::vector<Index> test_rows;
};

struct CrossValidation {
  std::vector<FoldResult> folds;
  Metrics mean;
  Metrics stddev;

  nlohmann::json to_json() const;
};

/// Selection is refit on each training split only; the data should be
/// normalized beforehand so that distances agree across splits.
CrossValidation cross_validate(const Dataset& data, int folds,
                               const PipelineConfig& config, std::uint64_t seed);

}  // namespace belief
