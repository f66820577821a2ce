#include "mdlgbc/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <thread>

#include "mdlgbc/errors.hpp"

namespace mdlgbc {
namespace {

void check_dimension(std::span<const double> x, const TrainedModel& model) {
  if (x.size() != model.dimension()) {
    throw DataError("dimension mismatch: model expects d=" + std::to_string(model.dimension()) +
                    ", got d=" + std::to_string(x.size()));
  }
}

std::vector<double> class_energies(std::span<const double> x, const TrainedModel& model,
                                   std::size_t c, std::vector<BallContribution>* detail) {
  const auto& balls = model.classes[c].balls;
  std::vector<double> energies;
  energies.reserve(balls.size());
  for (std::size_t k = 0; k < balls.size(); ++k) {
    const auto e = ball_energy(x, balls[k], model.floors, model.constants, model.has_negatives());
    energies.push_back(e.total());
    if (detail) detail->push_back({k, e, balls[k].weight});
  }
  return energies;
}

std::vector<double> class_weights(const ClassModel& cls) {
  std::vector<double> w;
  w.reserve(cls.balls.size());
  for (const auto& b : cls.balls) w.push_back(b.weight);
  return w;
}

}  // namespace

PredictiveQuantities predictive_effective(const StableBall& ball, const PredictionFloors& floors,
                                          const CodingConstants& constants) {
  PredictiveQuantities out;
  out.radius = std::max({ball.radius, floors.r0, constants.eps_r});
  const double d = static_cast<double>(ball.variance.size());
  const double spread = out.radius * out.radius / d;
  out.variance.resize(ball.variance.size());
  for (std::size_t j = 0; j < ball.variance.size(); ++j) {
    out.variance[j] = std::max({ball.variance[j], floors.eta[j], spread, constants.eps_v});
  }
  return out;
}

BallEnergy ball_energy(std::span<const double> x, const StableBall& ball,
                       const PredictionFloors& floors, const CodingConstants& constants,
                       bool has_negatives) {
  const auto eff = predictive_effective(ball, floors, constants);
  BallEnergy e;
  double quad = 0.0;
  double logdet = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double diff = x[j] - ball.center[j];
    quad += diff * diff / eff.variance[j];
    logdet += std::log(2.0 * std::numbers::pi * eff.variance[j]);
  }
  e.gaussian = 0.5 * (quad + logdet);
  e.boundary =
      has_negatives ? -std::log(std::max(1.0 - ball.avg_boundary_risk, constants.eps_num)) : 0.0;
  const double excess = std::max(0.0, distance(x, ball.center) - eff.radius);
  e.outside = std::log1p(excess / eff.radius);
  return e;
}

double mixture_cost(double prior, std::span<const double> weights,
                    std::span<const double> energies) {
  const double e_min = *std::min_element(energies.begin(), energies.end());
  double acc = 0.0;
  for (std::size_t k = 0; k < energies.size(); ++k) {
    acc += weights[k] * std::exp(-(energies[k] - e_min));
  }
  return -std::log(prior) + e_min - std::log(acc);
}

double class_score(std::span<const double> x, const TrainedModel& model, std::size_t c) {
  check_dimension(x, model);
  const auto energies = class_energies(x, model, c, nullptr);
  return mixture_cost(model.priors[c], class_weights(model.classes[c]), energies);
}

int argmin_class(std::span<const double> scores) noexcept {
  int best = 0;
  for (std::size_t c = 1; c < scores.size(); ++c) {
    if (scores[c] < scores[static_cast<std::size_t>(best)]) best = static_cast<int>(c);
  }
  return best;
}

Prediction predict(std::span<const double> x, const TrainedModel& model) {
  check_dimension(x, model);
  Prediction out;
  out.scores.resize(model.num_classes());
  for (std::size_t c = 0; c < model.num_classes(); ++c) {
    const auto energies = class_energies(x, model, c, nullptr);
    out.scores[c] = mixture_cost(model.priors[c], class_weights(model.classes[c]), energies);
  }
  out.label = argmin_class(out.scores);
  return out;
}

PredictionExplanation explain(std::span<const double> x, const TrainedModel& model) {
  check_dimension(x, model);
  PredictionExplanation out;
  out.scores.resize(model.num_classes());
  out.balls.resize(model.num_classes());
  for (std::size_t c = 0; c < model.num_classes(); ++c) {
    const auto energies = class_energies(x, model, c, &out.balls[c]);
    out.scores[c] = mixture_cost(model.priors[c], class_weights(model.classes[c]), energies);
  }
  return out;
}

std::vector<Prediction> predict_all(const Matrix& x, const TrainedModel& model, unsigned threads) {
  if (x.cols() != model.dimension()) {
    throw DataError("dimension mismatch: model expects d=" + std::to_string(model.dimension()) +
                    ", got d=" + std::to_string(x.cols()));
  }
  std::vector<Prediction> out(x.rows());
  const std::size_t workers = std::min<std::size_t>(std::max(1u, threads), std::max<std::size_t>(1, x.rows()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < x.rows(); ++i) out[i] = predict(x.row(i), model);
    return out;
  }
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < x.rows(); i += workers) out[i] = predict(x.row(i), model);
    });
  }
  pool.clear();
  return out;
}

}  // namespace mdlgbc
