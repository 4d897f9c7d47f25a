#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "belief/dataset.hpp"

namespace belief {

/// Feature annotation of a synthetic benchmark. When `groups` is set (SD3),
/// every group member is listed as relevant and one pick per group is ideal.
struct GroundTruth {
  std::vector<Index> relevant;
  std::vector<Index> redundant;
  std::vector<Index> irrelevant;
  std::vector<std::vector<Index>> groups;

  nlohmann::json to_json() const;
  static GroundTruth from_json(const nlohmann::json& doc);
};

struct Benchmark {
  Dataset data;
  GroundTruth truth;
};

/// Names: corral100, xor100, parity33, sd3, madelon.
const std::vector<std::string>& benchmark_names();
/// Throws std::invalid_argument for an unknown name.
Benchmark generate(const std::string& name, std::uint64_t seed);

Benchmark generate_corral100(std::uint64_t seed);
Benchmark generate_xor100(std::uint64_t seed);
Benchmark generate_parity33(std::uint64_t seed);
Benchmark generate_sd3(std::uint64_t seed);
Benchmark generate_madelon(std::uint64_t seed);

/// Binary problem with `n_relevant` planted features at random positions,
/// each shifted by +-shift/2 with the class; the rest is N(0, 1) noise.
struct PlantedOptions {
  Index n_instances = 100000;
  Index n_features = 500;
  Index n_relevant = 10;
  double shift = 1.0;
  std::uint64_t seed = 1;
};
Benchmark generate_planted(const PlantedOptions& options);

inline constexpr double kDefaultZeta = 0.1;

/// S_rel / X_rel - zeta * S_red / X_red; a term with an empty denominator is
/// 0. With groups, S_rel counts groups hit and S_red the extra picks inside
/// already-hit groups.
double success_score(const std::vector<Index>& selected, const GroundTruth& truth,
                     double zeta = kDefaultZeta);

struct SelectionComposition {
  Index relevant = 0;
  Index redundant = 0;
  Index irrelevant = 0;
};
SelectionComposition composition(const std::vector<Index>& selected,
                                 const GroundTruth& truth);

}  // namespace belief
