#pragma once

// Tabular input: CSV loading, label encoding, min-max normalization and
// stratified fold construction.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mdlgbc/matrix.hpp"

namespace mdlgbc {

/// Raw CSV contents: numeric features plus the untouched label strings.
struct RawTable {
  Matrix features;
  std::vector<std::string> feature_names;
  std::vector<std::string> labels;
  std::string label_name;

  std::size_t n() const noexcept { return features.rows(); }
  std::size_t d() const noexcept { return features.cols(); }
};

/// Identifies the label column by header name or by zero-based column index.
/// A value that matches a header name is always treated as a name.
struct LabelColumn {
  std::string spec;
};

/// Parses comma-separated text with a header row. Throws DataError with the
/// offending row/column on any malformed cell.
RawTable read_csv(std::istream& in, const LabelColumn& label_column,
                  const std::string& source_name = "<stream>");
RawTable load_csv(const std::filesystem::path& path, const LabelColumn& label_column);

/// Reads a CSV whose feature columns must match `expected_d`; the label
/// column is optional and is dropped when present.
RawTable load_unlabeled_csv(const std::filesystem::path& path, std::size_t expected_d,
                            const std::optional<LabelColumn>& label_column);

struct NormalizationParams {
  std::vector<double> mins;
  std::vector<double> maxs;

  std::size_t dimension() const noexcept { return mins.size(); }
  friend bool operator==(const NormalizationParams&, const NormalizationParams&) = default;
};

NormalizationParams fit_normalizer(const RawTable& table);
NormalizationParams fit_normalizer(const Matrix& features);

/// Applies (x - min) / (max - min) per feature. Constant features map to 0.
/// Values outside the fitted range are left unclamped.
Matrix normalize(const Matrix& features, const NormalizationParams& params);

/// Maps label strings to dense class indices 0..C-1.
class LabelEncoding {
 public:
  LabelEncoding() = default;
  explicit LabelEncoding(std::vector<std::string> names);

  /// Distinct labels, ordered numerically when every label parses as a
  /// number and lexicographically otherwise.
  static LabelEncoding fit(std::span<const std::string> labels);

  std::optional<int> find(const std::string& label) const;
  int encode(const std::string& label) const;  // throws DataError when unknown
  const std::string& name(int index) const { return names_.at(static_cast<std::size_t>(index)); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  std::size_t size() const noexcept { return names_.size(); }

 private:
  std::vector<std::string> names_;
};

struct LabeledDataset {
  Matrix x;
  std::vector<int> y;  // class indices, 0-based
  std::vector<std::string> label_names;

  std::size_t n() const noexcept { return x.rows(); }
  std::size_t d() const noexcept { return x.cols(); }
  std::size_t num_classes() const noexcept { return label_names.size(); }
};

/// Normalizes features and encodes labels against `encoding`. Unknown labels
/// and dimension mismatches throw DataError.
LabeledDataset transform(const RawTable& table, const NormalizationParams& params,
                         const LabelEncoding& encoding);

/// Row subset of a raw table.
RawTable subset(const RawTable& table, std::span<const std::size_t> rows);

struct FoldPlan {
  std::uint64_t seed = 0;
  std::size_t k = 0;
  std::vector<std::vector<std::size_t>> folds;  // each sorted ascending

  /// Complement of fold `f`, sorted ascending.
  std::vector<std::size_t> training_indices(std::size_t f) const;
  nlohmann::json to_json() const;
};

/// Name of the generator and shuffle used by stratified_folds, for metadata.
std::string fold_generator_name();

/// Per class (ascending class index) the member indices are shuffled with
/// SplitMix64(seed) and dealt round-robin into k folds. The dealing position
/// carries over from one class to the next so fold sizes stay balanced.
FoldPlan stratified_folds(std::span<const int> y, std::size_t k, std::uint64_t seed);

}  // namespace mdlgbc
