#pragma once

// Description-length terms, in nats.

#include <cstddef>
#include <span>

#include "mdlgbc/ball.hpp"
#include "mdlgbc/boundary.hpp"
#include "mdlgbc/constants.hpp"

namespace mdlgbc {

struct BallCost {
  double data = 0.0;
  double intrusion = 0.0;
  double margin = 0.0;
  double cls = 0.0;
  double total = 0.0;
};

/// (n/2) * sum_j [1 + ln(2 pi v~_j)] + d ln max(n, 2), v~_j = max(v_j, eps_v).
double data_length(std::size_t n, std::span<const double> variance,
                   const CodingConstants& constants);
double data_length(const GranularBall& ball, const CodingConstants& constants);

/// n * (-ln max(1 - rho_bar, eps_num)); zero when the class has no negatives.
double intrusion_length(std::size_t n, double rho_bar, const CodingConstants& constants,
                        bool has_negatives = true);

/// n * ln(1 + omega).
double margin_length(std::size_t n, double omega);

/// -ln prior.
double class_length(double prior);

/// All four terms from stored ball fields. Used both during training and to
/// recompute the breakdown of a saved ball.
BallCost ball_cost(std::size_t n, std::span<const double> variance, double radius,
                   double avg_boundary_risk, double center_neg_dist, double prior,
                   bool has_negatives, const CodingConstants& constants);

/// Requires annotate_boundary to have been applied to `ball`.
BallCost ball_total(const GranularBall& ball, const ClassContext& ctx,
                    const CodingConstants& constants);

/// n * H(k/n) in nats; the entropy form of ln C(n, k).
/// Throws UsageError unless 1 <= n_left <= n_total - 1.
double partition_entropy_code(std::size_t n_total, std::size_t n_left);

/// ln max(n, 2) + ln max(|V|, 1).
double selection_code_two_ball(std::size_t n, std::size_t n_directions);

/// ln max(n, 2).
double selection_code_core_boundary(std::size_t n);

}  // namespace mdlgbc
