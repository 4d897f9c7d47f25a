#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "belief/selection.hpp"

namespace belief {

/// Byte and timing summary of one selection run.
struct RunReport {
  std::map<std::string, double> seconds;
  std::uint64_t locator_count = 0;
  std::uint64_t locator_bytes = 0;
  std::uint64_t full_instance_bytes = 0;
  std::uint64_t distance_evaluations = 0;
  Index sample_size = 0;
  Index n_classes = 0;
  Index partitions = 0;
  Index k = 0;
  std::vector<Index> selected;
  nlohmann::json scores = nlohmann::json::object();

  /// full_instance_bytes / locator_bytes, or 0 when nothing was emitted.
  double ratio() const;
  /// sample_size * k * |C| * p: the most records the map phase may emit.
  std::uint64_t locator_bound() const;
  nlohmann::json to_json() const;
};

RunReport make_report(const SelectorConfig& config, const Dataset& data,
                      const RankingResult& result);

}  // namespace belief
