#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "doctest.h"

#include "belief/baselines.hpp"
#include "belief/benchdata.hpp"

using namespace belief;

namespace {

/// Plug-in mutual information from a map of pair counts.
double mi_by_counting(const std::vector<int>& x, const std::vector<int>& y) {
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> px, py;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    joint[{x[i], y[i]}] += 1 / n;
    px[x[i]] += 1 / n;
    py[y[i]] += 1 / n;
  }
  double mi = 0;
  for (auto [key, p] : joint) mi += p * std::log2(p / (px[key.first] * py[key.second]));
  return mi;
}

}  // namespace

TEST_SUITE("baselines") {

TEST_CASE("mutual information of simple columns") {
  const std::vector<int> a = {0, 1, 0, 1, 0, 1, 0, 1};
  const std::vector<int> b = {0, 0, 1, 1, 0, 0, 1, 1};
  CHECK(mutual_information(a, a) == doctest::Approx(1.0));
  CHECK(std::abs(mutual_information(a, b)) < 1e-12);
  CHECK(mutual_information(a, b) >= 0.0);
  CHECK(entropy(a) == doctest::Approx(1.0));
  CHECK(entropy(std::vector<int>{3, 3, 3}) == 0.0);

  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> v(0, 3);
  std::vector<int> x(200), y(200);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = v(rng);
    y[i] = (x[i] + (v(rng) == 0 ? 1 : 0)) % 4;
  }
  CHECK(mutual_information(x, y) == doctest::Approx(mi_by_counting(x, y)).epsilon(1e-12));
  CHECK(mutual_information(x, y) == doctest::Approx(mutual_information(y, x)).epsilon(1e-12));
  CHECK(mutual_information(x, x) == doctest::Approx(entropy(x)).epsilon(1e-12));
  const ContingencyTable t(x, y);
  CHECK(t.total() == 200);
  CHECK(t.row_marginal().sum() == 200.0);

  CHECK_THROWS_AS(mutual_information(std::vector<int>{}, std::vector<int>{}),
                  std::invalid_argument);
  CHECK_THROWS_AS(mutual_information(a, std::vector<int>{0, 1}), std::invalid_argument);
}

TEST_CASE("equal-width discretization") {
  CHECK(discretize_equal_width(std::vector<double>{0, 5, 10}, 2) == std::vector<int>{0, 1, 1});
  CHECK(discretize_equal_width(std::vector<double>{0, 2.5, 7.5, 10}, 4) ==
        std::vector<int>{0, 1, 3, 3});
  CHECK(discretize_equal_width(std::vector<double>{4, 4, 4}, 10) == std::vector<int>{0, 0, 0});
  std::vector<double> col(50);
  for (std::size_t i = 0; i < col.size(); ++i) col[i] = std::pow(1.1, static_cast<double>(i));
  const auto codes = discretize_equal_width(col, 10);
  CHECK(std::is_sorted(codes.begin(), codes.end()));
  CHECK(codes.front() == 0);
  CHECK(codes.back() == 9);
  CHECK_THROWS_AS(discretize_equal_width(col, 1), std::invalid_argument);
}

TEST_CASE("nominal columns keep their codes") {
  RowMatrix x(4, 2);
  x << 0, 0, 3, 1, 1, 2, 3, 3;
  const Dataset d = Dataset::from_dense(x, {0, 1, 0, 1},
                                        {FeatureKind::nominal, FeatureKind::numeric});
  const auto cols = discrete_columns(d, 3);
  CHECK(cols[0] == std::vector<int>{0, 3, 1, 3});
  CHECK(cols[1] == std::vector<int>{0, 1, 2, 2});
}

TEST_CASE("mRMR picks the most informative feature first and avoids copies") {
  // Class 2a + b over balanced (a, b): f0 = a, f1 = copy of a, f2 = b,
  // f3 = noise.
  std::mt19937_64 rng(7);
  std::bernoulli_distribution coin(0.5);
  RowMatrix x(200, 4);
  std::vector<int> y(200);
  for (Index i = 0; i < 200; ++i) {
    const int a = static_cast<int>(i / 2 % 2), b = static_cast<int>(i % 2);
    y[i] = 2 * a + b;
    x(i, 0) = x(i, 1) = a;
    x(i, 2) = b;
    x(i, 3) = coin(rng);
  }
  const Dataset d = Dataset::from_dense(x, y, std::vector<FeatureKind>(4, FeatureKind::nominal));
  CHECK(mrmr_select(d, 1).features() == std::vector<Index>{0});
  const auto two = mrmr_select(d, 2);
  CHECK(two.features()[1] == 2);
  CHECK(two.method == "mrmr");
  auto all = mrmr_select(d, 4).features();
  std::sort(all.begin(), all.end());
  CHECK(all == std::vector<Index>{0, 1, 2, 3});
  CHECK_THROWS_AS(mrmr_select(d, 5), std::invalid_argument);
}

TEST_CASE("parity bits carry no marginal information") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Benchmark b = generate_parity33(seed);
    const auto cols = discrete_columns(b.data, kDefaultBins);
    const std::vector<int>& y = b.data.labels();
    CAPTURE(seed);
    for (Index j = 0; j < 6; ++j) CHECK(mutual_information(cols[j], y) == 0.0);
  }
  const Benchmark b = generate_parity33(1);
  const auto picked = mrmr_select(b.data, 3).features();
  CHECK(composition(picked, b.truth).relevant == 0);
  CHECK(mrmr_select(b.data, 3).features() == picked);
}

}
