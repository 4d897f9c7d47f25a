#include "belief/benchdata.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

#include <Eigen/QR>

#include "belief/random.hpp"

namespace belief {

namespace {

std::vector<Index> range(Index from, Index to) {
  std::vector<Index> out(static_cast<std::size_t>(to - from));
  std::iota(out.begin(), out.end(), from);
  return out;
}

int coin(std::mt19937_64& rng) { return static_cast<int>(rng() >> 63); }

Benchmark binary_bench(RowMatrix x, std::vector<int> y, GroundTruth truth) {
  return {Dataset::from_dense(std::move(x), std::move(y), {}, {"0", "1"}),
          std::move(truth)};
}

}  // namespace

nlohmann::json GroundTruth::to_json() const {
  nlohmann::json doc = {{"relevant", relevant},
                        {"redundant", redundant},
                        {"irrelevant", irrelevant}};
  if (!groups.empty()) doc["groups"] = groups;
  return doc;
}

GroundTruth GroundTruth::from_json(const nlohmann::json& doc) {
  GroundTruth t;
  t.relevant = doc.at("relevant").get<std::vector<Index>>();
  t.redundant = doc.at("redundant").get<std::vector<Index>>();
  t.irrelevant = doc.at("irrelevant").get<std::vector<Index>>();
  if (doc.contains("groups")) {
    t.groups = doc.at("groups").get<std::vector<std::vector<Index>>>();
  }
  return t;
}

const std::vector<std::string>& benchmark_names() {
  static const std::vector<std::string> names = {"corral100", "xor100", "parity33",
                                                 "sd3", "madelon"};
  return names;
}

Benchmark generate(const std::string& name, std::uint64_t seed) {
  if (name == "corral100") return generate_corral100(seed);
  if (name == "xor100") return generate_xor100(seed);
  if (name == "parity33") return generate_parity33(seed);
  if (name == "sd3") return generate_sd3(seed);
  if (name == "madelon") return generate_madelon(seed);
  throw std::invalid_argument("unknown benchmark '" + name + "'");
}

// (A0 and A1) or (B0 and B1) over all 32 patterns of the four relevant bits
// and one irrelevant bit; feature 5 agrees with the class on 75% of the rows.
Benchmark generate_corral100(std::uint64_t seed) {
  auto rng = make_rng(seed, rng_stream::generator);
  const Index m = 32, n = 99;
  RowMatrix x(m, n);
  std::vector<int> y(m);
  for (Index i = 0; i < m; ++i) {
    for (Index b = 0; b < 5; ++b) x(i, b) = static_cast<double>((i >> (4 - b)) & 1);
    y[i] = ((x(i, 0) == 1 && x(i, 1) == 1) || (x(i, 2) == 1 && x(i, 3) == 1)) ? 1 : 0;
  }
  std::vector<Index> rows = range(0, m);
  std::shuffle(rows.begin(), rows.end(), rng);
  for (Index t = 0; t < m; ++t) {
    const Index i = rows[t];
    x(i, 5) = static_cast<double>(t < m / 4 ? 1 - y[i] : y[i]);
  }
  for (Index i = 0; i < m; ++i) {
    for (Index j = 6; j < n; ++j) x(i, j) = coin(rng);
  }
  return binary_bench(std::move(x), std::move(y), {range(0, 4), {}, range(4, n), {}});
}

Benchmark generate_xor100(std::uint64_t seed) {
  auto rng = make_rng(seed, rng_stream::generator);
  const Index m = 50, n = 99;
  RowMatrix x(m, n);
  std::vector<int> y(m);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < n; ++j) x(i, j) = coin(rng);
    y[i] = static_cast<int>(x(i, 0)) ^ static_cast<int>(x(i, 1));
  }
  return binary_bench(std::move(x), std::move(y), {range(0, 2), {}, range(2, n), {}});
}

// Eight parity patterns, each repeated eight times; features 3-5 copy 0-2.
Benchmark generate_parity33(std::uint64_t seed) {
  auto rng = make_rng(seed, rng_stream::generator);
  const Index m = 64, n = 12;
  RowMatrix x(m, n);
  std::vector<int> y(m);
  for (Index i = 0; i < m; ++i) {
    const Index pattern = i % 8;
    int parity = 0;
    for (Index b = 0; b < 3; ++b) {
      const int bit = static_cast<int>((pattern >> (2 - b)) & 1);
      x(i, b) = x(i, b + 3) = bit;
      parity ^= bit;
    }
    for (Index j = 6; j < n; ++j) x(i, j) = coin(rng);
    y[i] = parity;
  }
  return binary_bench(std::move(x), std::move(y),
                      {range(0, 3), range(3, 6), range(6, n), {}});
}

// Six orthonormal latent factors; the class is the tercile of their sum, and
// each group holds 10 noisy copies of one factor.
Benchmark generate_sd3(std::uint64_t seed) {
  auto rng = make_rng(seed, rng_stream::generator);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const Index m = 75, n_groups = 6, group_size = 10, n_noise = 4000;
  const Index n = n_groups * group_size + n_noise;

  Eigen::MatrixXd latent(m, n_groups);
  for (Index i = 0; i < m; ++i) {
    for (Index g = 0; g < n_groups; ++g) latent(i, g) = gauss(rng);
  }
  latent.rowwise() -= latent.colwise().mean();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(latent);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(m, n_groups);
  q *= std::sqrt(static_cast<double>(m));  // unit population variance

  const Eigen::VectorXd score = q.rowwise().sum();
  std::vector<Index> order = range(0, m);
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return score[a] < score[b]; });
  std::vector<int> y(m);
  for (Index r = 0; r < m; ++r) y[order[r]] = static_cast<int>(r / (m / 3));

  RowMatrix x(m, n);
  GroundTruth truth;
  for (Index g = 0; g < n_groups; ++g) {
    std::vector<Index> members;
    for (Index t = 0; t < group_size; ++t) {
      const Index j = g * group_size + t;
      for (Index i = 0; i < m; ++i) x(i, j) = q(i, g) + 0.2 * gauss(rng);
      members.push_back(j);
      truth.relevant.push_back(j);
    }
    truth.groups.push_back(std::move(members));
  }
  for (Index i = 0; i < m; ++i) {
    for (Index j = n_groups * group_size; j < n; ++j) x(i, j) = gauss(rng);
  }
  truth.irrelevant = range(n_groups * group_size, n);
  return {Dataset::from_dense(std::move(x), std::move(y), {}, {"0", "1", "2"}),
          std::move(truth)};
}

// Gaussian clusters on the 32 vertices of a 5-cube, 16 vertices per class;
// features 5-19 are random linear combinations of the five informative ones.
Benchmark generate_madelon(std::uint64_t seed) {
  auto rng = make_rng(seed, rng_stream::generator);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  const Index m = 2400, n_info = 5, n_red = 15, n = 500;

  std::vector<Index> vertices = range(0, 32);
  std::shuffle(vertices.begin(), vertices.end(), rng);
  Eigen::MatrixXd mix(n_info, n_red);
  for (Index a = 0; a < n_info; ++a) {
    for (Index b = 0; b < n_red; ++b) mix(a, b) = coef(rng);
  }

  RowMatrix x(m, n);
  std::vector<int> y(m);
  std::uniform_int_distribution<int> pick(0, 15);
  for (Index i = 0; i < m; ++i) {
    y[i] = static_cast<int>(i % 2);
    const Index v = vertices[y[i] * 16 + pick(rng)];
    Eigen::RowVectorXd info(n_info);
    for (Index b = 0; b < n_info; ++b) {
      info[b] = (((v >> b) & 1) ? 1.0 : -1.0) + 0.5 * gauss(rng);
    }
    x.row(i).head(n_info) = info;
    x.row(i).segment(n_info, n_red) = info * mix;
    for (Index j = n_info + n_red; j < n; ++j) x(i, j) = gauss(rng);
  }
  return binary_bench(std::move(x), std::move(y),
                      {range(0, n_info), range(n_info, n_info + n_red),
                       range(n_info + n_red, n), {}});
}

Benchmark generate_planted(const PlantedOptions& options) {
  if (options.n_relevant < 0 || options.n_relevant > options.n_features ||
      options.n_instances < 2) {
    throw std::invalid_argument("invalid planted benchmark shape");
  }
  auto rng = make_rng(options.seed, rng_stream::generator);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const Index m = options.n_instances, n = options.n_features;

  std::vector<Index> features = range(0, n);
  std::shuffle(features.begin(), features.end(), rng);
  std::vector<Index> relevant(features.begin(), features.begin() + options.n_relevant);
  std::sort(relevant.begin(), relevant.end());
  std::vector<char> planted(static_cast<std::size_t>(n), 0);
  for (Index j : relevant) planted[j] = 1;

  RowMatrix x(m, n);
  std::vector<int> y(m);
  for (Index i = 0; i < m; ++i) {
    y[i] = static_cast<int>(i % 2);
    const double offset = (y[i] == 1 ? 0.5 : -0.5) * options.shift;
    for (Index j = 0; j < n; ++j) x(i, j) = gauss(rng) + (planted[j] ? offset : 0.0);
  }
  GroundTruth truth;
  truth.relevant = relevant;
  for (Index j = 0; j < n; ++j) {
    if (!planted[j]) truth.irrelevant.push_back(j);
  }
  return binary_bench(std::move(x), std::move(y), std::move(truth));
}

SelectionComposition composition(const std::vector<Index>& selected,
                                 const GroundTruth& truth) {
  const std::set<Index> rel(truth.relevant.begin(), truth.relevant.end());
  const std::set<Index> red(truth.redundant.begin(), truth.redundant.end());
  SelectionComposition out;
  if (!truth.groups.empty()) {
    std::set<std::size_t> hit;
    for (Index j : selected) {
      bool in_group = false;
      for (std::size_t g = 0; g < truth.groups.size(); ++g) {
        const auto& grp = truth.groups[g];
        if (std::find(grp.begin(), grp.end(), j) == grp.end()) continue;
        in_group = true;
        if (hit.insert(g).second) {
          ++out.relevant;
        } else {
          ++out.redundant;
        }
      }
      if (!in_group) ++out.irrelevant;
    }
    return out;
  }
  for (Index j : selected) {
    if (rel.count(j)) {
      ++out.relevant;
    } else if (red.count(j)) {
      ++out.redundant;
    } else {
      ++out.irrelevant;
    }
  }
  return out;
}

double success_score(const std::vector<Index>& selected, const GroundTruth& truth,
                     double zeta) {
  const SelectionComposition c = composition(selected, truth);
  double x_rel, x_red;
  if (!truth.groups.empty()) {
    x_rel = static_cast<double>(truth.groups.size());
    double members = 0.0;
    for (const auto& g : truth.groups) members += static_cast<double>(g.size());
    x_red = members - x_rel;
  } else {
    x_rel = static_cast<double>(truth.relevant.size());
    x_red = static_cast<double>(truth.redundant.size());
  }
  const double rel_term = x_rel > 0.0 ? static_cast<double>(c.relevant) / x_rel : 0.0;
  const double red_term = x_red > 0.0 ? static_cast<double>(c.redundant) / x_red : 0.0;
  return rel_term - zeta * red_term;
}

}  // namespace belief
