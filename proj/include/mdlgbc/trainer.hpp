#pragma once

// Recursive per-class ball construction and assembly of the trained model.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mdlgbc/ball.hpp"
#include "mdlgbc/boundary.hpp"
#include "mdlgbc/competition.hpp"
#include "mdlgbc/constants.hpp"
#include "mdlgbc/dataset.hpp"

namespace mdlgbc {

inline constexpr int kModelFormatVersion = 1;
inline constexpr std::uint64_t kDefaultSeed = 2035;

struct StableBall {
  std::vector<double> center;
  std::vector<double> variance;
  double radius = 0.0;
  std::size_t n = 0;
  double avg_boundary_risk = 0.0;
  double center_neg_dist = 0.0;
  double weight = 0.0;  // n / n_c

  friend bool operator==(const StableBall&, const StableBall&) = default;
};

struct ClassModel {
  std::string label;
  std::vector<StableBall> balls;

  friend bool operator==(const ClassModel&, const ClassModel&) = default;
};

struct PredictionFloors {
  double r0 = 0.0;
  std::vector<double> eta;

  friend bool operator==(const PredictionFloors&, const PredictionFloors&) = default;
};

struct TrainedModel {
  int format_version = kModelFormatVersion;
  std::uint64_t seed = kDefaultSeed;
  NormalizationParams normalization;
  std::vector<double> priors;
  CodingConstants constants;
  PredictionFloors floors;
  std::vector<ClassModel> classes;

  std::size_t dimension() const noexcept { return normalization.dimension(); }
  std::size_t num_classes() const noexcept { return classes.size(); }
  /// With a single class there was no negative evidence during training.
  bool has_negatives() const noexcept { return classes.size() > 1; }
  std::size_t ball_count() const noexcept;

  friend bool operator==(const TrainedModel&, const TrainedModel&) = default;
};

/// One line of the training trace: a popped ball and what happened to it.
struct TraceRecord {
  int class_id = 0;
  std::size_t n = 0;
  bool below_split_size = false;  // n < 2 n_min, emitted without competition
  double single_length = 0.0;
  double two_ball_length = kInfeasible;
  double core_boundary_length = kInfeasible;
  LocalModel model = LocalModel::single;
  std::size_t first_size = 0;
  std::size_t second_size = 0;
};

struct ClassTraining {
  std::vector<GranularBall> stable;  // in emission order
  std::size_t compete_evaluations = 0;
};

/// FIFO processing of unresolved balls starting from the whole class.
/// Throws DataError when the class has no positives.
ClassTraining train_class(const ClassContext& ctx, const CodingConstants& constants,
                          std::vector<TraceRecord>* trace = nullptr);

/// r0: nearest-rank 5th percentile of the strictly positive stable radii
/// (eps_r if there are none). eta_j: 1e-3 times the population variance of
/// feature j over `x`, floored at eps_v.
PredictionFloors estimate_floors(std::span<const double> stable_radii, const Matrix& x,
                                 const CodingConstants& constants);

struct FitResult {
  TrainedModel model;
  std::vector<TraceRecord> trace;
  /// Per class, per stable ball: row indices into the training dataset.
  std::vector<std::vector<std::vector<std::size_t>>> members;
  std::vector<std::size_t> compete_evaluations;  // per class
};

/// Trains every class (ascending index) and assembles the model. Classes are
/// independent and are trained on up to `threads` threads; the result does
/// not depend on the thread count.
FitResult fit(const LabeledDataset& data, const NormalizationParams& normalization,
              const CodingConstants& constants = {}, std::uint64_t seed = kDefaultSeed,
              unsigned threads = 1);

}  // namespace mdlgbc
