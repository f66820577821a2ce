#include "mdlgbc/coding.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "mdlgbc/errors.hpp"

namespace mdlgbc {
namespace {

double log_max2(std::size_t n) { return std::log(static_cast<double>(std::max<std::size_t>(n, 2))); }

}  // namespace

double data_length(std::size_t n, std::span<const double> variance,
                   const CodingConstants& constants) {
  double per_sample = 0.0;
  for (double v : variance) {
    per_sample += 1.0 + std::log(2.0 * std::numbers::pi * std::max(v, constants.eps_v));
  }
  return 0.5 * static_cast<double>(n) * per_sample +
         static_cast<double>(variance.size()) * log_max2(n);
}

double data_length(const GranularBall& ball, const CodingConstants& constants) {
  return data_length(ball.size(), ball.variance, constants);
}

double intrusion_length(std::size_t n, double rho_bar, const CodingConstants& constants,
                        bool has_negatives) {
  if (!has_negatives) return 0.0;
  return static_cast<double>(n) * -std::log(std::max(1.0 - rho_bar, constants.eps_num));
}

double margin_length(std::size_t n, double omega) {
  return static_cast<double>(n) * std::log1p(omega);
}

double class_length(double prior) { return -std::log(prior); }

BallCost ball_cost(std::size_t n, std::span<const double> variance, double radius,
                   double avg_boundary_risk, double center_neg_dist, double prior,
                   bool has_negatives, const CodingConstants& constants) {
  BallCost cost;
  cost.data = data_length(n, variance, constants);
  cost.intrusion = intrusion_length(n, avg_boundary_risk, constants, has_negatives);
  cost.margin = margin_length(n, overlap_ratio(radius, center_neg_dist, has_negatives, constants));
  cost.cls = class_length(prior);
  cost.total = cost.data + cost.intrusion + cost.margin + cost.cls;
  return cost;
}

BallCost ball_total(const GranularBall& ball, const ClassContext& ctx,
                    const CodingConstants& constants) {
  return ball_cost(ball.size(), ball.variance, ball.radius, ball.avg_boundary_risk,
                   ball.center_neg_dist, ctx.prior, ctx.has_negatives(), constants);
}

double partition_entropy_code(std::size_t n_total, std::size_t n_left) {
  if (n_left < 1 || n_left + 1 > n_total) {
    throw UsageError("partition_entropy_code: need 1 <= k <= n-1, got n=" +
                     std::to_string(n_total) + " k=" + std::to_string(n_left));
  }
  const double n = static_cast<double>(n_total);
  const double small = static_cast<double>(std::min(n_left, n_total - n_left));
  const double large = n - small;
  // n H = n ln n - l ln l - r ln r, ordered so that code(n, k) == code(n, n - k) exactly
  return n * std::log(n) - (small * std::log(small) + large * std::log(large));
}

double selection_code_two_ball(std::size_t n, std::size_t n_directions) {
  return log_max2(n) + std::log(static_cast<double>(std::max<std::size_t>(n_directions, 1)));
}

double selection_code_core_boundary(std::size_t n) { return log_max2(n); }

}  // namespace mdlgbc
