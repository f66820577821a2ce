#pragma once

// Negative boundary evidence: nearest-negative distances, boundary risk and
// overlap of a class-conditional ball with other-class samples.

#include <cstddef>
#include <span>
#include <vector>

#include "mdlgbc/ball.hpp"
#include "mdlgbc/constants.hpp"
#include "mdlgbc/matrix.hpp"

namespace mdlgbc {

/// Everything the ball search needs for one class, fixed before training.
struct ClassContext {
  int class_id = 0;
  Matrix positives;
  Matrix negatives;
  double prior = 0.0;               // (n_c + 1) / (n + C)
  std::vector<double> delta_pos;    // nearest-negative distance of each positive
  std::size_t n_min = 1;

  bool has_negatives() const noexcept { return !negatives.empty(); }
  std::size_t dimension() const noexcept { return positives.cols(); }
};

/// Splits `x` into class `c` positives and negatives, computes the smoothed
/// prior and the exact nearest-negative distance of every positive.
ClassContext make_class_context(const Matrix& x, std::span<const int> y, std::size_t num_classes,
                                int c, std::size_t n_min);

/// Exhaustive-scan distance from q to the closest negative; 0 with no negatives.
double nearest_negative_distance(std::span<const double> q, const ClassContext& ctx);

/// Indices of the k negatives closest to q, nearest first (ties by index).
std::vector<std::size_t> nearest_negatives(std::span<const double> q, const ClassContext& ctx,
                                           std::size_t k);

/// 1 / (1 + (delta / r_eff)^2).
inline double boundary_risk(double delta, double r_eff) noexcept {
  const double u = delta / r_eff;
  return 1.0 / (1.0 + u * u);
}

/// Mean boundary risk over members at the ball's effective radius, from the
/// precomputed per-sample distances. Zero when the class has no negatives.
double average_boundary_risk(std::span<const std::size_t> members, double radius,
                             const ClassContext& ctx, const CodingConstants& constants);
double average_boundary_risk(const GranularBall& ball, const ClassContext& ctx,
                             const CodingConstants& constants);

/// max(0, r_eff - delta(center)) / r_eff; zero without negatives.
double overlap_ratio(double radius, double center_neg_dist, bool has_negatives,
                     const CodingConstants& constants);
double overlap_ratio(const GranularBall& ball, const ClassContext& ctx,
                     const CodingConstants& constants);

/// Fills avg_boundary_risk and center_neg_dist of `ball`.
void annotate_boundary(GranularBall& ball, const ClassContext& ctx,
                       const CodingConstants& constants);

}  // namespace mdlgbc
