#include "belief/report.hpp"

namespace belief {

double RunReport::ratio() const {
  if (locator_bytes == 0) return 0.0;
  return static_cast<double>(full_instance_bytes) / static_cast<double>(locator_bytes);
}

std::uint64_t RunReport::locator_bound() const {
  return static_cast<std::uint64_t>(sample_size) * static_cast<std::uint64_t>(k) *
         static_cast<std::uint64_t>(n_classes) * static_cast<std::uint64_t>(partitions);
}

nlohmann::json RunReport::to_json() const {
  return {{"seconds", seconds},
          {"locator_count", locator_count},
          {"locator_bytes", locator_bytes},
          {"locator_bound", locator_bound()},
          {"full_instance_bytes", full_instance_bytes},
          {"ratio", ratio()},
          {"distance_evaluations", distance_evaluations},
          {"sample_size", sample_size},
          {"n_classes", n_classes},
          {"partitions", partitions},
          {"k", k},
          {"selected", selected},
          {"scores", scores}};
}

RunReport make_report(const SelectorConfig& config, const Dataset& data,
                      const RankingResult& result) {
  const auto& meta = result.metadata;
  RunReport r;
  r.seconds = meta.seconds;
  r.locator_count = meta.locator_count;
  r.locator_bytes = meta.locator_bytes;
  r.full_instance_bytes = meta.full_instance_bytes;
  r.distance_evaluations = meta.distance_evaluations;
  r.sample_size = meta.sample_size;
  r.n_classes = data.n_classes();
  r.partitions = config.partitions;
  r.k = config.k;
  r.selected = result.features();
  return r;
}

}  // namespace belief
