#pragma once

// Metrics, a 1-NN sanity baseline, and stratified k-fold cross-validation.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "mdlgbc/constants.hpp"
#include "mdlgbc/dataset.hpp"
#include "mdlgbc/trainer.hpp"

namespace mdlgbc {

double accuracy(std::span<const int> y_true, std::span<const int> y_pred);

/// Unweighted mean of per-class F1 over the union of labels in y_true and
/// y_pred; any 0/0 precision, recall or F1 counts as 0.
double macro_f1(std::span<const int> y_true, std::span<const int> y_pred);
/// Same, over an explicit class set.
double macro_f1(std::span<const int> y_true, std::span<const int> y_pred,
                std::span<const int> classes);

/// Label of the Euclidean nearest training row, lowest index on ties.
std::vector<int> baseline_1nn(const Matrix& train_x, std::span<const int> train_y,
                              const Matrix& test_x);

struct Summary {
  double mean = 0.0;
  double stddev = 0.0;  // sample (n - 1) standard deviation; 0 for one value
};

Summary summarize(std::span<const double> values);

struct FoldResult {
  std::size_t fold = 0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  double baseline_accuracy = 0.0;  // 1-NN on the same split
  std::size_t stable_balls = 0;
  double train_seconds = 0.0;
  double predict_seconds = 0.0;
};

struct EvalReport {
  int format_version = 1;
  std::string dataset;
  std::size_t n = 0;
  std::size_t d = 0;
  std::size_t num_classes = 0;
  std::size_t k = 0;
  std::uint64_t seed = kDefaultSeed;
  std::string fold_generator;
  CodingConstants constants;
  std::vector<FoldResult> folds;

  Summary accuracy() const;
  Summary macro_f1() const;
  Summary baseline_accuracy() const;
  Summary stable_balls() const;
  Summary train_seconds() const;
  Summary predict_seconds() const;
  double total_seconds() const;
};

struct CrossValidationOptions {
  std::size_t k = 10;
  std::uint64_t seed = kDefaultSeed;
  CodingConstants constants;
  unsigned threads = 1;  // folds evaluated concurrently
};

/// For each fold: fit normalizer and model on the training part only, then
/// score the held-out part. Fold results are ordered by fold index.
EvalReport cross_validate(const RawTable& table, const std::string& dataset_name,
                          const CrossValidationOptions& options = {});

/// Deterministic part of the report (no wall-clock values).
nlohmann::json report_to_json(const EvalReport& report);
/// Per-fold and aggregate timings.
nlohmann::json timings_to_json(const EvalReport& report);
/// Aligned text table with "mean ± std" cells.
std::string report_to_text(const EvalReport& report);

}  // namespace mdlgbc
