#pragma once

#include <span>
#include <vector>

#include "belief/dataset.hpp"
#include "belief/selection.hpp"

namespace belief {

/// Joint counts of two discrete columns coded 0..a-1 and 0..b-1.
class ContingencyTable {
 public:
  ContingencyTable(std::span<const int> x, std::span<const int> y);

  Index total() const { return total_; }
  const Eigen::MatrixXd& joint() const { return joint_; }
  Eigen::VectorXd row_marginal() const { return joint_.rowwise().sum(); }
  Eigen::RowVectorXd col_marginal() const { return joint_.colwise().sum(); }

 private:
  Eigen::MatrixXd joint_;
  Index total_ = 0;
};

/// Mutual information in bits. Codes must be nonnegative.
double mutual_information(std::span<const int> x, std::span<const int> y);
double mutual_information(const ContingencyTable& table);
double entropy(std::span<const int> x);

/// Equal-width bins over [min, max]; a value on an inner edge goes to the
/// upper bin and max lands in the last bin. A constant column maps to 0.
std::vector<int> discretize_equal_width(std::span<const double> column, int bins);

/// Discrete codes for every feature: nominal codes as stored, numeric
/// features discretized into `bins`.
std::vector<std::vector<int>> discrete_columns(const Dataset& data, int bins);

inline constexpr int kDefaultBins = 10;

/// Greedy mRMR (difference form): argmax MI(X; Y) - mean_{s in S} MI(X; s).
RankingResult mrmr_select(const Dataset& data, Index n_select,
                          int bins = kDefaultBins);

}  // namespace belief
