#include "mdlgbc/competition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

#include "mdlgbc/coding.hpp"

namespace mdlgbc {
namespace {

// Directions shorter than this carry no usable geometry in [0,1]-scaled space.
constexpr double kZeroDirection = 1e-12;
constexpr double kDuplicateCosine = 1.0 - 1e-9;

std::size_t ceil_sqrt(std::size_t n) {
  auto r = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
  while (r * r < n) ++r;
  while (r > 0 && (r - 1) * (r - 1) >= n) --r;
  return r;
}

// Member indices ordered by ascending key, ties by ascending index.
std::vector<std::size_t> order_by(std::span<const std::size_t> members,
                                  const std::vector<double>& keys) {
  std::vector<std::size_t> pos(members.size());
  std::iota(pos.begin(), pos.end(), std::size_t{0});
  std::sort(pos.begin(), pos.end(), [&](std::size_t a, std::size_t b) {
    if (keys[a] != keys[b]) return keys[a] < keys[b];
    return members[a] < members[b];
  });
  std::vector<std::size_t> out(members.size());
  for (std::size_t i = 0; i < pos.size(); ++i) out[i] = members[pos[i]];
  return out;
}

// Evaluates L(child, c) for candidate children described by member list and
// sufficient statistics, reusing scratch buffers across calls.
class ChildCoder {
 public:
  ChildCoder(const ClassContext& ctx, const CodingConstants& constants)
      : ctx_(ctx), constants_(constants) {}

  double length(std::span<const std::size_t> members, const SufficientStats& stats) {
    const double radius = spread_over(members, ctx_.positives, stats, center_, variance_);
    const double rho_bar = average_boundary_risk(members, radius, ctx_, constants_);
    const double center_neg = nearest_negative_distance(center_, ctx_);
    return ball_cost(members.size(), variance_, radius, rho_bar, center_neg, ctx_.prior,
                     ctx_.has_negatives(), constants_)
        .total;
  }

 private:
  const ClassContext& ctx_;
  const CodingConstants& constants_;
  std::vector<double> center_;
  std::vector<double> variance_;
};

// Sweeps the cuts of one ordering: the first k members form one child, the
// rest the other. Calls visit(k, length_first + length_second) for every
// admissible k in ascending order.
template <typename Visit>
void sweep_cuts(const std::vector<std::size_t>& order, const GranularBall& ball,
                const ClassContext& ctx, const CodingConstants& constants, Visit&& visit) {
  const std::size_t n = order.size();
  const std::size_t d = ball.dimension();
  ChildCoder coder(ctx, constants);
  SufficientStats first(d);
  SufficientStats second(d);
  for (std::size_t k = 1; k + ctx.n_min <= n; ++k) {
    first.add(ctx.positives.row(order[k - 1]));
    if (k < ctx.n_min) continue;
    second = ball.stats;
    second -= first;
    const std::span<const std::size_t> all(order);
    const double l_first = coder.length(all.subspan(0, k), first);
    const double l_second = coder.length(all.subspan(k), second);
    visit(k, l_first + l_second);
  }
}

}  // namespace

GranularityRule granularity(std::size_t n_c, std::size_t d) {
  GranularityRule rule;
  const double dd = static_cast<double>(d);
  const double candidate =
      std::min(std::sqrt(static_cast<double>(n_c)) / std::log(std::sqrt(dd + 2.0)), dd + 2.0);
  rule.alpha = static_cast<std::size_t>(std::ceil(candidate));
  if (n_c <= 3) {
    rule.n_min = 1;
  } else {
    rule.n_min = std::min(n_c / 2, std::max<std::size_t>(2, rule.alpha));
  }
  return rule;
}

std::vector<std::vector<double>> candidate_directions(const GranularBall& ball,
                                                      const ClassContext& ctx) {
  const std::size_t n = ball.size();
  const std::size_t d = ball.dimension();
  std::vector<std::vector<double>> raw;

  if (n >= 2) {
    if (auto pca = covariance_and_pca(ball, ctx.positives).direction) raw.push_back(*pca);
  }

  if (ctx.has_negatives()) {
    const std::size_t k = std::min(ctx.negatives.rows(), ceil_sqrt(n));
    const auto nearest = nearest_negatives(ball.center, ctx, k);
    std::vector<double> v_neg(ball.center);
    for (std::size_t j = 0; j < d; ++j) {
      double mean = 0.0;
      for (auto idx : nearest) mean += ctx.negatives(idx, j);
      v_neg[j] -= mean / static_cast<double>(nearest.size());
    }
    raw.push_back(std::move(v_neg));

    const std::size_t h = std::max<std::size_t>(1, std::min(n / 2, ceil_sqrt(n)));
    std::vector<double> keys(n);
    for (std::size_t i = 0; i < n; ++i) keys[i] = ctx.delta_pos[ball.members[i]];
    const auto risky = order_by(ball.members, keys);
    for (auto& key : keys) key = -key;
    const auto safe = order_by(ball.members, keys);
    std::vector<double> v_sb(d, 0.0);
    for (std::size_t i = 0; i < h; ++i) {
      const auto s = ctx.positives.row(safe[i]);
      const auto r = ctx.positives.row(risky[i]);
      for (std::size_t j = 0; j < d; ++j) v_sb[j] += s[j] - r[j];
    }
    for (auto& x : v_sb) x /= static_cast<double>(h);
    raw.push_back(std::move(v_sb));
  }

  std::size_t widest = 0;
  for (std::size_t j = 1; j < d; ++j) {
    if (ball.variance[j] > ball.variance[widest]) widest = j;
  }
  std::vector<double> v_var(d, 0.0);
  v_var[widest] = 1.0;
  raw.push_back(std::move(v_var));

  std::vector<std::vector<double>> out;
  for (auto& v : raw) {
    const double len = norm(v);
    if (!(len > kZeroDirection) || !std::isfinite(len)) continue;
    for (auto& x : v) x /= len;
    canonicalize_sign(v);
    const bool duplicate = std::any_of(out.begin(), out.end(), [&](const auto& u) {
      return std::abs(dot(u, v)) > kDuplicateCosine;
    });
    if (!duplicate) out.push_back(std::move(v));
  }
  return out;
}

SplitSearch best_two_ball(const GranularBall& ball, const ClassContext& ctx,
                          const CodingConstants& constants) {
  if (ball.size() < 2 * ctx.n_min || ball.size() < 2) return {};
  return best_two_ball(ball, ctx, constants, candidate_directions(ball, ctx));
}

SplitSearch best_two_ball(const GranularBall& ball, const ClassContext& ctx,
                          const CodingConstants& constants,
                          const std::vector<std::vector<double>>& directions) {
  SplitSearch best;
  const std::size_t n = ball.size();
  if (n < 2 * ctx.n_min || n < 2 || directions.empty()) return best;
  const double selection = selection_code_two_ball(n, directions.size());

  std::vector<std::size_t> best_order;
  std::vector<double> keys(n);
  for (std::size_t di = 0; di < directions.size(); ++di) {
    for (std::size_t i = 0; i < n; ++i) {
      keys[i] = dot(ctx.positives.row(ball.members[i]), directions[di]);
    }
    const auto order = order_by(ball.members, keys);
    bool improved = false;
    sweep_cuts(order, ball, ctx, constants, [&](std::size_t k, double children) {
      const double length = partition_entropy_code(n, k) + selection + children;
      if (length < best.length) {
        best.length = length;
        best.direction = di;
        best.cut = k;
        improved = true;
      }
    });
    if (improved) best_order = order;
  }
  if (best.length < kInfeasible) {
    const auto cut = static_cast<std::ptrdiff_t>(best.cut);
    best.split = Decomposition{{best_order.begin(), best_order.begin() + cut},
                               {best_order.begin() + cut, best_order.end()}};
  }
  return best;
}

SplitSearch best_core_boundary(const GranularBall& ball, const ClassContext& ctx,
                               const CodingConstants& constants) {
  SplitSearch best;
  const std::size_t n = ball.size();
  if (!ctx.has_negatives() || n < 2 * ctx.n_min || n < 2) return best;
  const double selection = selection_code_core_boundary(n);

  std::vector<double> keys(n);
  for (std::size_t i = 0; i < n; ++i) keys[i] = -ctx.delta_pos[ball.members[i]];
  const auto order = order_by(ball.members, keys);  // descending distance

  // The sweep grows the core, so boundary sizes arrive in descending order;
  // `<=` keeps the smallest boundary size among exact ties.
  std::size_t best_core = 0;
  sweep_cuts(order, ball, ctx, constants, [&](std::size_t n_core, double children) {
    const double length = partition_entropy_code(n, n_core) + selection + children;
    if (length <= best.length) {
      best.length = length;
      best_core = n_core;
    }
  });
  if (best.length < kInfeasible) {
    const auto cut = static_cast<std::ptrdiff_t>(best_core);
    best.cut = n - best_core;
    best.split = Decomposition{{order.begin(), order.begin() + cut}, {order.begin() + cut, order.end()}};
  }
  return best;
}

const char* to_string(LocalModel model) noexcept {
  switch (model) {
    case LocalModel::single: return "M1";
    case LocalModel::two_ball: return "M2";
    case LocalModel::core_boundary: return "M3";
  }
  return "?";
}

double CandidateDecision::chosen_length() const noexcept {
  switch (model) {
    case LocalModel::two_ball: return two_ball_length;
    case LocalModel::core_boundary: return core_boundary_length;
    case LocalModel::single: break;
  }
  return single_length;
}

LocalModel select_model(double l1, double l2, double l3, double eps_mdl) noexcept {
  LocalModel raw = LocalModel::single;
  double raw_length = l1;
  if (l2 < raw_length) {
    raw = LocalModel::two_ball;
    raw_length = l2;
  }
  if (l3 < raw_length) {
    raw = LocalModel::core_boundary;
    raw_length = l3;
  }
  if (raw != LocalModel::single && raw_length < l1 - eps_mdl) return raw;
  return LocalModel::single;
}

CandidateDecision compete(const GranularBall& ball, const ClassContext& ctx,
                          const CodingConstants& constants) {
  CandidateDecision decision;
  decision.single_length = ball_total(ball, ctx, constants).total;
  auto two = best_two_ball(ball, ctx, constants);
  auto core = best_core_boundary(ball, ctx, constants);
  decision.two_ball_length = two.length;
  decision.core_boundary_length = core.length;
  decision.model = select_model(decision.single_length, two.length, core.length, constants.eps_mdl);
  if (decision.model == LocalModel::two_ball) decision.split = std::move(two.split);
  if (decision.model == LocalModel::core_boundary) decision.split = std::move(core.split);
  return decision;
}

}  // namespace mdlgbc
