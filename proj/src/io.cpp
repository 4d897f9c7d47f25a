#include "belief/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "belief/error.hpp"

namespace belief {

namespace {

std::optional<double> parse_real(std::string_view token) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    return std::nullopt;
  }
  return value;
}

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

/// Numeric labels sort by value, anything else by text.
std::vector<std::string> order_labels(std::vector<std::string> distinct) {
  const bool numeric = std::all_of(
      distinct.begin(), distinct.end(),
      [](const std::string& s) { return parse_real(s).has_value(); });
  if (numeric) {
    std::sort(distinct.begin(), distinct.end(),
              [](const std::string& a, const std::string& b) {
                return *parse_real(a) < *parse_real(b);
              });
  } else {
    std::sort(distinct.begin(), distinct.end());
  }
  return distinct;
}

std::vector<int> code_labels(const std::vector<std::string>& tokens,
                             std::vector<std::string>& names) {
  std::vector<std::string> distinct;
  std::unordered_map<std::string, int> seen;
  for (const auto& t : tokens) {
    if (seen.emplace(t, 0).second) distinct.push_back(t);
  }
  names = order_labels(std::move(distinct));
  std::map<std::string, int> code;
  for (std::size_t c = 0; c < names.size(); ++c) {
    code[names[c]] = static_cast<int>(c);
  }
  std::vector<int> labels;
  labels.reserve(tokens.size());
  for (const auto& t : tokens) labels.push_back(code.at(t));
  return labels;
}

std::string format_real(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::vector<std::string_view> split(std::string_view line, char delim) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      break;
    }
    cells.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return cells;
}

}  // namespace

Dataset parse_libsvm(std::istream& in, const LibsvmOptions& options) {
  std::vector<SparseRow> rows;
  std::vector<std::string> label_tokens;
  std::int64_t max_index = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view body(line);
    if (const auto hash = body.find('#'); hash != std::string_view::npos) {
      body = body.substr(0, hash);
    }
    body = trim(body);
    if (body.empty()) continue;

    std::istringstream tokens{std::string(body)};
    std::string token;
    tokens >> token;
    if (!parse_real(token)) {
      throw ParseError(line_no, "label '" + token + "' is not numeric");
    }
    label_tokens.push_back(token);

    SparseRow row;
    std::int64_t previous = 0;
    while (tokens >> token) {
      const auto colon = token.find(':');
      if (colon == std::string::npos) {
        throw ParseError(line_no, "expected idx:val, got '" + token + "'");
      }
      std::int64_t index = 0;
      const char* first = token.data();
      auto [ptr, ec] = std::from_chars(first, first + colon, index);
      if (ec != std::errc() || ptr != first + colon || index < 1) {
        throw ParseError(line_no, "bad feature index in '" + token + "'");
      }
      const auto value = parse_real(std::string_view(token).substr(colon + 1));
      if (!value) {
        throw ParseError(line_no, "bad feature value in '" + token + "'");
      }
      if (index <= previous) {
        throw ParseError(line_no, "feature indices must be strictly increasing");
      }
      previous = index;
      max_index = std::max(max_index, index);
      row.indices.push_back(static_cast<std::int32_t>(index - 1));
      row.values.push_back(*value);
    }
    rows.push_back(std::move(row));
  }

  Index n_features = static_cast<Index>(max_index);
  if (options.n_features) {
    if (*options.n_features < max_index) {
      throw DataError("feature index " + std::to_string(max_index) +
                      " exceeds the forced feature count " +
                      std::to_string(*options.n_features));
    }
    n_features = *options.n_features;
  }
  std::vector<std::string> names;
  auto labels = code_labels(label_tokens, names);
  return Dataset::from_sparse(std::move(rows), std::move(labels), n_features,
                              {}, std::move(names));
}

Dataset parse_csv(std::istream& in, const CsvOptions& options) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t n_columns = 0;
  std::vector<std::vector<std::string>> table;
  std::vector<std::size_t> table_lines;
  bool header_pending = options.header;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line, options.delimiter);
    if (n_columns == 0) n_columns = cells.size();
    if (cells.size() != n_columns) {
      throw ParseError(line_no, "ragged row: expected " +
                                    std::to_string(n_columns) + " cells, got " +
                                    std::to_string(cells.size()));
    }
    if (header_pending) {
      header_pending = false;
      continue;
    }
    table.emplace_back(cells.begin(), cells.end());
    table_lines.push_back(line_no);
  }
  if (n_columns < 2) throw DataError("csv needs a label and a feature column");

  const Index label_col =
      options.label_column.value_or(static_cast<Index>(n_columns) - 1);
  if (label_col < 0 || label_col >= static_cast<Index>(n_columns)) {
    throw DataError("label column out of range");
  }
  const Index n_features = static_cast<Index>(n_columns) - 1;
  std::vector<FeatureKind> kinds = options.kinds;
  if (kinds.empty()) kinds.assign(n_features, FeatureKind::numeric);
  if (static_cast<Index>(kinds.size()) != n_features) {
    throw DataError("kind list does not match the number of feature columns");
  }
  for (Index j : options.nominal) {
    if (j < 0 || j >= n_features) throw DataError("nominal column out of range");
    kinds[j] = FeatureKind::nominal;
  }

  const Index m = static_cast<Index>(table.size());
  RowMatrix values(m, n_features);
  std::vector<std::unordered_map<std::string, int>> codes(n_features);
  std::vector<std::string> label_tokens;
  label_tokens.reserve(m);
  for (Index i = 0; i < m; ++i) {
    Index j = 0;
    for (Index c = 0; c < static_cast<Index>(n_columns); ++c) {
      const std::string& cell = table[i][c];
      if (c == label_col) {
        label_tokens.push_back(cell);
        continue;
      }
      if (kinds[j] == FeatureKind::nominal) {
        auto [it, inserted] =
            codes[j].emplace(cell, static_cast<int>(codes[j].size()));
        values(i, j) = it->second;
      } else {
        const auto v = parse_real(cell);
        if (!v) {
          throw ParseError(table_lines[i],
                           "cannot parse numeric cell '" + cell + "'");
        }
        values(i, j) = *v;
      }
      ++j;
    }
  }
  std::vector<std::string> names;
  auto labels = code_labels(label_tokens, names);
  return Dataset::from_dense(std::move(values), std::move(labels),
                             std::move(kinds), std::move(names));
}

void write_libsvm(std::ostream& out, const Dataset& data) {
  for (Index i = 0; i < data.n_instances(); ++i) {
    out << data.label_names()[data.label(i)];
    if (data.is_sparse()) {
      const auto& row = data.sparse_row(i);
      for (std::size_t t = 0; t < row.nnz(); ++t) {
        out << ' ' << row.indices[t] + 1 << ':' << format_real(row.values[t]);
      }
    } else {
      for (Index j = 0; j < data.n_features(); ++j) {
        const double v = data.dense_values()(i, j);
        if (v != 0.0) out << ' ' << j + 1 << ':' << format_real(v);
      }
    }
    out << '\n';
  }
}

void write_csv(std::ostream& out, const Dataset& data) {
  for (Index j = 0; j < data.n_features(); ++j) out << 'f' << j + 1 << ',';
  out << "label\n";
  for (Index i = 0; i < data.n_instances(); ++i) {
    for (Index j = 0; j < data.n_features(); ++j) {
      double v = 0.0;
      if (data.is_sparse()) {
        const auto& row = data.sparse_row(i);
        auto it = std::lower_bound(row.indices.begin(), row.indices.end(),
                                   static_cast<std::int32_t>(j));
        if (it != row.indices.end() && *it == j) {
          v = row.values[it - row.indices.begin()];
        }
      } else {
        v = data.dense_values()(i, j);
      }
      out << format_real(v) << ',';
    }
    out << data.label_names()[data.label(i)] << '\n';
  }
}

nlohmann::json metadata_json(const Dataset& data) {
  nlohmann::json doc;
  doc["n_features"] = data.n_features();
  doc["n_instances"] = data.n_instances();
  doc["sparse"] = data.is_sparse();
  doc["normalized"] = data.is_normalized();
  auto& kinds = doc["kinds"] = nlohmann::json::array();
  for (auto k : data.kinds()) kinds.push_back(to_string(k));
  const auto& stats = data.stats();
  doc["mean"] = std::vector<double>(stats.mean.data(),
                                    stats.mean.data() + stats.mean.size());
  doc["stddev"] = std::vector<double>(
      stats.stddev.data(), stats.stddev.data() + stats.stddev.size());
  doc["label_names"] = data.label_names();
  return doc;
}

DatasetMetadata parse_metadata(const nlohmann::json& doc) {
  DatasetMetadata meta;
  try {
    meta.n_features = doc.at("n_features").get<Index>();
    for (const auto& k : doc.at("kinds")) {
      meta.kinds.push_back(feature_kind_from_string(k.get<std::string>()));
    }
    const auto mean = doc.at("mean").get<std::vector<double>>();
    const auto stddev = doc.at("stddev").get<std::vector<double>>();
    meta.mean = Eigen::Map<const Eigen::VectorXd>(
        mean.data(), static_cast<Index>(mean.size()));
    meta.stddev = Eigen::Map<const Eigen::VectorXd>(
        stddev.data(), static_cast<Index>(stddev.size()));
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("bad metadata: ") + e.what());
  }
  if (static_cast<Index>(meta.kinds.size()) != meta.n_features ||
      meta.mean.size() != meta.n_features ||
      meta.stddev.size() != meta.n_features) {
    throw DataError("metadata vectors do not match n_features");
  }
  return meta;
}

DataFormat data_format_from_string(const std::string& name) {
  if (name == "libsvm") return DataFormat::libsvm;
  if (name == "csv") return DataFormat::csv;
  throw std::invalid_argument("unknown format '" + name + "'");
}

Dataset load_dataset(const std::string& path, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return options.format == DataFormat::libsvm
             ? parse_libsvm(in, options.libsvm)
             : parse_csv(in, options.csv);
}

}  // namespace belief
