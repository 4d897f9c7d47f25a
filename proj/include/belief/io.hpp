#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "belief/dataset.hpp"

namespace belief {

struct LibsvmOptions {
  /// Forces the feature count so files with different maximum indices agree.
  std::optional<Index> n_features;
};

/// `<label> <idx>:<val> ...` with strictly increasing 1-based indices.
/// Labels are coded by ascending numeric value (lexicographic when not
/// numeric).
Dataset parse_libsvm(std::istream& in, const LibsvmOptions& options = {});

struct CsvOptions {
  /// Column holding the class; defaults to the last one.
  std::optional<Index> label_column;
  /// Kinds of the feature columns, in file order with the label column
  /// removed. Empty means all numeric.
  std::vector<FeatureKind> kinds;
  /// Feature indices to mark nominal on top of `kinds`.
  std::vector<Index> nominal;
  char delimiter = ',';
  bool header = true;
};

/// Dense table with a header row. Nominal tokens get integer codes in order
/// of first appearance.
Dataset parse_csv(std::istream& in, const CsvOptions& options = {});

/// Raw stored values; normalization is not undone or applied.
void write_libsvm(std::ostream& out, const Dataset& data);
void write_csv(std::ostream& out, const Dataset& data);

/// Sidecar describing n_features, kinds and per-feature mean/stddev.
nlohmann::json metadata_json(const Dataset& data);

struct DatasetMetadata {
  Index n_features = 0;
  std::vector<FeatureKind> kinds;
  Eigen::VectorXd mean;
  Eigen::VectorXd stddev;
};

DatasetMetadata parse_metadata(const nlohmann::json& doc);

enum class DataFormat { libsvm, csv };

DataFormat data_format_from_string(const std::string& name);

struct LoadOptions {
  DataFormat format = DataFormat::csv;
  LibsvmOptions libsvm;
  CsvOptions csv;
};

/// Reads a file; throws DataError when it cannot be opened.
Dataset load_dataset(const std::string& path, const LoadOptions& options);

}  // namespace belief
