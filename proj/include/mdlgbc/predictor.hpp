#pragma once

// Class-level mixture coding cost and argmin prediction.

#include <cstddef>
#include <span>
#include <vector>

#include "mdlgbc/trainer.hpp"

namespace mdlgbc {

struct PredictiveQuantities {
  double radius = 0.0;
  std::vector<double> variance;
};

/// r~ = max(r, r0, eps_r); v~_j = max(v_j, eta_j, r~^2 / d, eps_v).
PredictiveQuantities predictive_effective(const StableBall& ball, const PredictionFloors& floors,
                                          const CodingConstants& constants);

struct BallEnergy {
  double gaussian = 0.0;
  double boundary = 0.0;
  double outside = 0.0;

  double total() const noexcept { return gaussian + boundary + outside; }
};

BallEnergy ball_energy(std::span<const double> x, const StableBall& ball,
                       const PredictionFloors& floors, const CodingConstants& constants,
                       bool has_negatives = true);

/// -ln(prior) - ln sum_k w_k exp(-E_k), evaluated from log-weights and
/// energies with the minimum energy factored out.
double mixture_cost(double prior, std::span<const double> weights,
                    std::span<const double> energies);

/// S_c(x) for class index c of `model`; x is already normalized.
double class_score(std::span<const double> x, const TrainedModel& model, std::size_t c);

struct BallContribution {
  std::size_t ball = 0;
  BallEnergy energy;
  double weight = 0.0;
};

struct PredictionExplanation {
  std::vector<double> scores;
  std::vector<std::vector<BallContribution>> balls;  // per class
};

struct Prediction {
  int label = 0;
  std::vector<double> scores;
};

/// Argmin of the class scores, lowest class index on exact ties.
/// Throws DataError when x does not match the model dimension.
Prediction predict(std::span<const double> x, const TrainedModel& model);
PredictionExplanation explain(std::span<const double> x, const TrainedModel& model);

/// Predicts every row of an already-normalized matrix on up to `threads` threads.
std::vector<Prediction> predict_all(const Matrix& x, const TrainedModel& model,
                                    unsigned threads = 1);

/// argmin with lowest-index tie-break.
int argmin_class(std::span<const double> scores) noexcept;

}  // namespace mdlgbc
