#include "mdlgbc/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "mdlgbc/errors.hpp"

namespace mdlgbc {

ClassContext make_class_context(const Matrix& x, std::span<const int> y, std::size_t num_classes,
                                int c, std::size_t n_min) {
  if (x.rows() != y.size()) throw UsageError("make_class_context: x and y lengths differ");
  std::vector<std::size_t> pos;
  std::vector<std::size_t> neg;
  for (std::size_t i = 0; i < y.size(); ++i) (y[i] == c ? pos : neg).push_back(i);

  ClassContext ctx;
  ctx.class_id = c;
  ctx.positives = x.select_rows(pos);
  ctx.negatives = x.select_rows(neg);
  // Keep the column count even when one side is empty.
  if (pos.empty()) ctx.positives = Matrix(0, x.cols());
  if (neg.empty()) ctx.negatives = Matrix(0, x.cols());
  ctx.prior = (static_cast<double>(pos.size()) + 1.0) /
              (static_cast<double>(y.size()) + static_cast<double>(num_classes));
  ctx.n_min = n_min;
  ctx.delta_pos.resize(pos.size(), 0.0);
  for (std::size_t i = 0; i < pos.size(); ++i) {
    ctx.delta_pos[i] = nearest_negative_distance(ctx.positives.row(i), ctx);
  }
  return ctx;
}

double nearest_negative_distance(std::span<const double> q, const ClassContext& ctx) {
  if (!ctx.has_negatives()) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ctx.negatives.rows(); ++i) {
    best = std::min(best, squared_distance(q, ctx.negatives.row(i)));
  }
  return std::sqrt(best);
}

std::vector<std::size_t> nearest_negatives(std::span<const double> q, const ClassContext& ctx,
                                           std::size_t k) {
  std::vector<std::pair<double, std::size_t>> dist;
  dist.reserve(ctx.negatives.rows());
  for (std::size_t i = 0; i < ctx.negatives.rows(); ++i) {
    dist.emplace_back(squared_distance(q, ctx.negatives.row(i)), i);
  }
  k = std::min(k, dist.size());
  std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
  std::vector<std::size_t> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = dist[i].second;
  return out;
}

double average_boundary_risk(std::span<const std::size_t> members, double radius,
                             const ClassContext& ctx, const CodingConstants& constants) {
  if (!ctx.has_negatives() || members.empty()) return 0.0;
  const double r_eff = effective_radius(radius, constants);
  double acc = 0.0;
  for (auto idx : members) acc += boundary_risk(ctx.delta_pos[idx], r_eff);
  return acc / static_cast<double>(members.size());
}

double average_boundary_risk(const GranularBall& ball, const ClassContext& ctx,
                             const CodingConstants& constants) {
  return average_boundary_risk(ball.members, ball.radius, ctx, constants);
}

double overlap_ratio(double radius, double center_neg_dist, bool has_negatives,
                     const CodingConstants& constants) {
  if (!has_negatives) return 0.0;
  const double r_eff = effective_radius(radius, constants);
  return std::max(0.0, r_eff - center_neg_dist) / r_eff;
}

double overlap_ratio(const GranularBall& ball, const ClassContext& ctx,
                     const CodingConstants& constants) {
  return overlap_ratio(ball.radius, ball.center_neg_dist, ctx.has_negatives(), constants);
}

void annotate_boundary(GranularBall& ball, const ClassContext& ctx,
                       const CodingConstants& constants) {
  ball.avg_boundary_risk = average_boundary_risk(ball, ctx, constants);
  ball.center_neg_dist = nearest_negative_distance(ball.center, ctx);
}

}  // namespace mdlgbc
