#include "belief/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace belief {

namespace {

int code_count(std::span<const int> codes) {
  int top = -1;
  for (int c : codes) {
    if (c < 0) throw std::invalid_argument("discrete codes must be >= 0");
    top = std::max(top, c);
  }
  return top + 1;
}

}  // namespace

ContingencyTable::ContingencyTable(std::span<const int> x, std::span<const int> y) {
  if (x.empty() || y.empty()) throw std::invalid_argument("empty column");
  if (x.size() != y.size()) throw std::invalid_argument("column lengths differ");
  joint_ = Eigen::MatrixXd::Zero(code_count(x), code_count(y));
  for (std::size_t i = 0; i < x.size(); ++i) joint_(x[i], y[i]) += 1.0;
  total_ = static_cast<Index>(x.size());
}

double mutual_information(const ContingencyTable& table) {
  const double n = static_cast<double>(table.total());
  const Eigen::VectorXd px = table.row_marginal() / n;
  const Eigen::RowVectorXd py = table.col_marginal() / n;
  const auto& joint = table.joint();
  double mi = 0.0;
  for (Index a = 0; a < joint.rows(); ++a) {
    for (Index b = 0; b < joint.cols(); ++b) {
      if (joint(a, b) == 0.0) continue;
      const double pab = joint(a, b) / n;
      mi += pab * std::log2(pab / (px[a] * py[b]));
    }
  }
  // Rounding can leave a tiny negative residue for independent columns.
  return std::max(mi, 0.0);
}

double mutual_information(std::span<const int> x, std::span<const int> y) {
  return mutual_information(ContingencyTable(x, y));
}

double entropy(std::span<const int> x) {
  if (x.empty()) throw std::invalid_argument("empty column");
  std::vector<double> counts(static_cast<std::size_t>(code_count(x)), 0.0);
  for (int c : x) counts[c] += 1.0;
  const double n = static_cast<double>(x.size());
  double h = 0.0;
  for (double c : counts) {
    if (c > 0.0) h -= (c / n) * std::log2(c / n);
  }
  return h;
}

std::vector<int> discretize_equal_width(std::span<const double> column, int bins) {
  if (bins < 2) throw std::invalid_argument("bins must be >= 2");
  std::vector<int> out(column.size(), 0);
  if (column.empty()) return out;
  const auto [lo_it, hi_it] = std::minmax_element(column.begin(), column.end());
  const double lo = *lo_it, hi = *hi_it;
  if (!(hi > lo)) return out;
  const double width = (hi - lo) / bins;
  for (std::size_t i = 0; i < column.size(); ++i) {
    const int b = static_cast<int>(std::floor((column[i] - lo) / width));
    out[i] = std::clamp(b, 0, bins - 1);
  }
  return out;
}

std::vector<std::vector<int>> discrete_columns(const Dataset& data, int bins) {
  std::vector<std::vector<int>> cols(static_cast<std::size_t>(data.n_features()));
#pragma omp parallel for schedule(dynamic)
  for (Index j = 0; j < data.n_features(); ++j) {
    const Eigen::VectorXd col = data.column(j);
    if (data.kind(j) == FeatureKind::nominal) {
      auto& out = cols[j];
      out.resize(static_cast<std::size_t>(col.size()));
      for (Index i = 0; i < col.size(); ++i) out[i] = static_cast<int>(col[i]);
    } else {
      cols[j] = discretize_equal_width({col.data(), static_cast<std::size_t>(col.size())}, bins);
    }
  }
  return cols;
}

RankingResult mrmr_select(const Dataset& data, Index n_select, int bins) {
  const Index n = data.n_features();
  if (n_select < 1 || n_select > n) {
    throw std::invalid_argument("cannot select " + std::to_string(n_select) +
                                " of " + std::to_string(n) + " features");
  }
  const auto cols = discrete_columns(data, bins);
  const std::span<const int> labels(data.labels());

  Eigen::VectorXd relevance(n);
#pragma omp parallel for schedule(dynamic)
  for (Index j = 0; j < n; ++j) relevance[j] = mutual_information(cols[j], labels);

  RankingResult result;
  result.method = "mrmr";
  result.weights = WeightVector{relevance, WeightSource::belief};
  Eigen::VectorXd redundancy_sum = Eigen::VectorXd::Zero(n);
  std::vector<char> taken(static_cast<std::size_t>(n), 0);

  for (Index step = 0; step < n_select; ++step) {
    const double count = static_cast<double>(step);
    Index best = -1;
    double best_score = 0.0;
    for (Index j = 0; j < n; ++j) {
      if (taken[j]) continue;
      const double penalty = step == 0 ? 0.0 : redundancy_sum[j] / count;
      const double score = relevance[j] - penalty;
      if (best < 0 || score > best_score) {
        best = j;
        best_score = score;
      }
    }
    taken[best] = 1;
    result.selected.push_back({best, relevance[best], relevance[best],
                               relevance[best] - best_score, best_score});
    for (Index j = 0; j < n; ++j) {
      if (!taken[j]) redundancy_sum[j] += mutual_information(cols[j], cols[best]);
    }
  }
  return result;
}

}  // namespace belief
