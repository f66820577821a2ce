#pragma once

// Local model competition for one unresolved ball: single ball (M1),
// projection split (M2) and core-boundary split (M3).

#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "mdlgbc/ball.hpp"
#include "mdlgbc/boundary.hpp"
#include "mdlgbc/constants.hpp"

namespace mdlgbc {

inline constexpr double kInfeasible = std::numeric_limits<double>::infinity();

struct GranularityRule {
  std::size_t alpha = 0;
  std::size_t n_min = 1;
};

/// alpha = ceil(min(sqrt(n_c) / ln sqrt(d + 2), d + 2));
/// n_min = 1 if n_c <= 3, else min(floor(n_c / 2), max(2, alpha)).
GranularityRule granularity(std::size_t n_c, std::size_t d);

/// Candidate projection directions, in order: principal axis, negative
/// evidence, safe-boundary contrast, largest-variance axis. Zero vectors are
/// dropped, the rest normalized with canonical sign, and near-duplicates
/// (|cos| > 1 - 1e-9) removed keeping the earlier one.
std::vector<std::vector<double>> candidate_directions(const GranularBall& ball,
                                                      const ClassContext& ctx);

struct Decomposition {
  std::vector<std::size_t> first;   // left child, or core
  std::vector<std::size_t> second;  // right child, or boundary
};

struct SplitSearch {
  double length = kInfeasible;
  std::optional<Decomposition> split;
  std::size_t direction = 0;  // M2 only: index into the direction list
  std::size_t cut = 0;        // M2: left size; M3: boundary size

  bool feasible() const noexcept { return split.has_value(); }
};

/// Minimum two-ball length over every direction and admissible cut.
SplitSearch best_two_ball(const GranularBall& ball, const ClassContext& ctx,
                          const CodingConstants& constants);
SplitSearch best_two_ball(const GranularBall& ball, const ClassContext& ctx,
                          const CodingConstants& constants,
                          const std::vector<std::vector<double>>& directions);

/// Minimum core-boundary length over admissible boundary sizes, members
/// ranked by descending nearest-negative distance. Infeasible without negatives.
SplitSearch best_core_boundary(const GranularBall& ball, const ClassContext& ctx,
                               const CodingConstants& constants);

enum class LocalModel { single = 1, two_ball = 2, core_boundary = 3 };

const char* to_string(LocalModel model) noexcept;

struct CandidateDecision {
  LocalModel model = LocalModel::single;
  double single_length = 0.0;
  double two_ball_length = kInfeasible;
  double core_boundary_length = kInfeasible;
  std::optional<Decomposition> split;  // set unless model == single

  double chosen_length() const noexcept;
};

/// Conservative selection among (L1, L2, L3): raw argmin with M1 < M2 < M3
/// on exact ties, and a split is kept only if it beats L1 by more than eps_mdl.
LocalModel select_model(double l1, double l2, double l3, double eps_mdl) noexcept;

/// `ball` must carry its boundary annotation.
CandidateDecision compete(const GranularBall& ball, const ClassContext& ctx,
                          const CodingConstants& constants);

}  // namespace mdlgbc
