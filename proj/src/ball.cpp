#include "mdlgbc/ball.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_set>

#include "mdlgbc/errors.hpp"

namespace mdlgbc {
namespace {

constexpr int kPowerIterations = 100;
constexpr double kPowerTolerance = 1e-9;
constexpr double kZeroTrace = 1e-18;

void check_members(std::span<const std::size_t> members, const Matrix& x_pos) {
  if (members.empty()) throw UsageError("granular ball needs at least one member");
  for (auto idx : members) {
    if (idx >= x_pos.rows()) {
      throw UsageError("member index " + std::to_string(idx) + " out of range (" +
                       std::to_string(x_pos.rows()) + " rows)");
    }
  }
}

void mat_vec(const Matrix& m, std::span<const double> v, std::vector<double>& out) {
  out.assign(m.rows(), 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) out[i] = dot(m.row(i), v);
}

}  // namespace

void SufficientStats::add(std::span<const double> x) {
  ++n;
  for (std::size_t j = 0; j < x.size(); ++j) {
    sum[j] += x[j];
    sum_sq[j] += x[j] * x[j];
  }
}

SufficientStats& SufficientStats::operator+=(const SufficientStats& other) {
  n += other.n;
  for (std::size_t j = 0; j < sum.size(); ++j) {
    sum[j] += other.sum[j];
    sum_sq[j] += other.sum_sq[j];
  }
  return *this;
}

SufficientStats& SufficientStats::operator-=(const SufficientStats& other) {
  n -= other.n;
  for (std::size_t j = 0; j < sum.size(); ++j) {
    sum[j] -= other.sum[j];
    sum_sq[j] -= other.sum_sq[j];
  }
  return *this;
}

void moments_from_stats(const SufficientStats& stats, std::vector<double>& center,
                        std::vector<double>& variance) {
  const std::size_t d = stats.sum.size();
  const double inv_n = 1.0 / static_cast<double>(stats.n);
  center.resize(d);
  variance.resize(d);
  for (std::size_t j = 0; j < d; ++j) {
    const double mu = stats.sum[j] * inv_n;
    center[j] = mu;
    variance[j] = std::max(0.0, stats.sum_sq[j] * inv_n - mu * mu);
  }
}

double radius_over(std::span<const std::size_t> members, const Matrix& x_pos,
                   std::span<const double> center) {
  double best = 0.0;
  for (auto idx : members) best = std::max(best, squared_distance(x_pos.row(idx), center));
  return std::sqrt(best);
}

double spread_over(std::span<const std::size_t> members, const Matrix& x_pos,
                   const SufficientStats& stats, std::vector<double>& center,
                   std::vector<double>& variance) {
  const std::size_t d = stats.sum.size();
  const double inv_n = 1.0 / static_cast<double>(stats.n);
  center.resize(d);
  for (std::size_t j = 0; j < d; ++j) center[j] = stats.sum[j] * inv_n;
  variance.assign(d, 0.0);
  double best = 0.0;
  for (auto idx : members) {
    const auto x = x_pos.row(idx);
    double sq = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = x[j] - center[j];
      variance[j] += diff * diff;
      sq += diff * diff;
    }
    best = std::max(best, sq);
  }
  for (auto& v : variance) v *= inv_n;
  return std::sqrt(best);
}

GranularBall ball_from_stats(std::vector<std::size_t> members, SufficientStats stats,
                             const Matrix& x_pos, int class_id) {
  check_members(members, x_pos);
  GranularBall ball;
  ball.class_id = class_id;
  ball.members = std::move(members);
  ball.stats = std::move(stats);
  ball.radius = spread_over(ball.members, x_pos, ball.stats, ball.center, ball.variance);
  return ball;
}

GranularBall build_ball(std::span<const std::size_t> members, const Matrix& x_pos, int class_id) {
  check_members(members, x_pos);
  SufficientStats stats(x_pos.cols());
  for (auto idx : members) stats.add(x_pos.row(idx));
  return ball_from_stats({members.begin(), members.end()}, std::move(stats), x_pos, class_id);
}

EffectiveQuantities effective(const GranularBall& ball, const CodingConstants& constants) {
  EffectiveQuantities out;
  out.radius = effective_radius(ball.radius, constants);
  out.variance.resize(ball.variance.size());
  for (std::size_t j = 0; j < ball.variance.size(); ++j) {
    out.variance[j] = std::max(ball.variance[j], constants.eps_v);
  }
  return out;
}

std::pair<GranularBall, GranularBall> split_stats(const GranularBall& parent,
                                                  std::span<const std::size_t> left_members,
                                                  const Matrix& x_pos) {
  if (left_members.empty() || left_members.size() >= parent.size()) {
    throw UsageError("split_stats: left side must be a proper nonempty subset of the parent");
  }
  std::unordered_set<std::size_t> in_parent(parent.members.begin(), parent.members.end());
  std::unordered_set<std::size_t> in_left;
  SufficientStats left_stats(x_pos.cols());
  for (auto idx : left_members) {
    if (!in_parent.contains(idx) || !in_left.insert(idx).second) {
      throw UsageError("split_stats: index " + std::to_string(idx) +
                       " is not a distinct member of the parent");
    }
    left_stats.add(x_pos.row(idx));
  }
  std::vector<std::size_t> right_members;
  right_members.reserve(parent.size() - left_members.size());
  for (auto idx : parent.members) {
    if (!in_left.contains(idx)) right_members.push_back(idx);
  }
  SufficientStats right_stats = parent.stats;
  right_stats -= left_stats;

  return {ball_from_stats({left_members.begin(), left_members.end()}, std::move(left_stats), x_pos,
                          parent.class_id),
          ball_from_stats(std::move(right_members), std::move(right_stats), x_pos,
                          parent.class_id)};
}

void canonicalize_sign(std::vector<double>& v) {
  for (double x : v) {
    if (std::abs(x) > 1e-12) {
      if (x < 0) {
        for (auto& y : v) y = -y;
      }
      return;
    }
  }
  for (double x : v) {
    if (x != 0.0) {
      if (x < 0) {
        for (auto& y : v) y = -y;
      }
      return;
    }
  }
}

PrincipalAxis covariance_and_pca(const GranularBall& ball, const Matrix& x_pos) {
  if (ball.size() < 2) throw UsageError("covariance_and_pca: ball needs at least two members");
  const std::size_t d = ball.dimension();
  PrincipalAxis out;
  out.covariance = Matrix(d, d);
  std::vector<double> diff(d);
  for (auto idx : ball.members) {
    const auto x = x_pos.row(idx);
    for (std::size_t j = 0; j < d; ++j) diff[j] = x[j] - ball.center[j];
    for (std::size_t a = 0; a < d; ++a) {
      for (std::size_t b = a; b < d; ++b) out.covariance(a, b) += diff[a] * diff[b];
    }
  }
  const double inv_n = 1.0 / static_cast<double>(ball.size());
  double trace = 0.0;
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = a; b < d; ++b) {
      out.covariance(a, b) *= inv_n;
      out.covariance(b, a) = out.covariance(a, b);
    }
    trace += out.covariance(a, a);
  }
  if (trace < kZeroTrace) return out;

  std::vector<double> v(d, 1.0 / std::sqrt(static_cast<double>(d)));
  std::vector<double> w;
  mat_vec(out.covariance, v, w);
  if (norm(w) <= kZeroTrace) {
    // The all-ones start is in the null space; start from the widest axis.
    std::size_t widest = 0;
    for (std::size_t j = 1; j < d; ++j) {
      if (out.covariance(j, j) > out.covariance(widest, widest)) widest = j;
    }
    std::fill(v.begin(), v.end(), 0.0);
    v[widest] = 1.0;
  }

  for (int it = 0; it < kPowerIterations; ++it) {
    mat_vec(out.covariance, v, w);
    const double len = norm(w);
    if (!(len > 0.0) || !std::isfinite(len)) return out;
    for (auto& x : w) x /= len;
    double delta = 0.0;
    for (std::size_t j = 0; j < d; ++j) delta += (w[j] - v[j]) * (w[j] - v[j]);
    v.swap(w);
    if (std::sqrt(delta) < kPowerTolerance) break;
  }
  canonicalize_sign(v);
  out.direction = std::move(v);
  return out;
}

}  // namespace mdlgbc
