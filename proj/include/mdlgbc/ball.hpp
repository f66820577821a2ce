#pragma once

// Class-conditional granular balls and their sufficient statistics.

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "mdlgbc/constants.hpp"
#include "mdlgbc/matrix.hpp"

namespace mdlgbc {

/// Count plus first- and second-order sums. Additive over disjoint sets.
struct SufficientStats {
  std::size_t n = 0;
  std::vector<double> sum;
  std::vector<double> sum_sq;

  explicit SufficientStats(std::size_t d = 0) : sum(d, 0.0), sum_sq(d, 0.0) {}

  void add(std::span<const double> x);
  SufficientStats& operator+=(const SufficientStats& other);
  SufficientStats& operator-=(const SufficientStats& other);

  friend bool operator==(const SufficientStats&, const SufficientStats&) = default;
};

/// A ball of same-class samples. `members` index rows of the class-positive
/// matrix it was built from.
struct GranularBall {
  std::vector<std::size_t> members;
  int class_id = 0;
  SufficientStats stats;
  std::vector<double> center;
  std::vector<double> variance;  // population variance, clipped at 0
  double radius = 0.0;
  double avg_boundary_risk = 0.0;  // filled by annotate_boundary
  double center_neg_dist = 0.0;    // filled by annotate_boundary

  std::size_t size() const noexcept { return members.size(); }
  std::size_t dimension() const noexcept { return center.size(); }
};

struct EffectiveQuantities {
  double radius = 0.0;
  std::vector<double> variance;
};

/// Center and clipped variance from (s, a, n).
void moments_from_stats(const SufficientStats& stats, std::vector<double>& center,
                        std::vector<double>& variance);

/// Center from (s, a, n); variance and radius from one pass over the members.
/// The centered pass avoids the cancellation in a/n - mu^2 on tight children.
/// Returns the radius.
double spread_over(std::span<const std::size_t> members, const Matrix& x_pos,
                   const SufficientStats& stats, std::vector<double>& center,
                   std::vector<double>& variance);

/// Largest Euclidean distance from `center` to any listed row.
double radius_over(std::span<const std::size_t> members, const Matrix& x_pos,
                   std::span<const double> center);

/// Builds a ball in one statistics pass plus one radius pass.
/// Throws UsageError on an empty member list or out-of-range index.
GranularBall build_ball(std::span<const std::size_t> members, const Matrix& x_pos, int class_id);

/// Builds a ball from statistics that are already known; only the radius
/// is recomputed from the members.
GranularBall ball_from_stats(std::vector<std::size_t> members, SufficientStats stats,
                             const Matrix& x_pos, int class_id);

EffectiveQuantities effective(const GranularBall& ball, const CodingConstants& constants);
inline double effective_radius(double radius, const CodingConstants& constants) {
  return radius > constants.eps_r ? radius : constants.eps_r;
}

/// Splits `parent` into (left_members, rest). The left statistics are
/// accumulated; the right ones are parent minus left. Throws UsageError
/// unless left_members is a proper nonempty subset of the parent.
std::pair<GranularBall, GranularBall> split_stats(const GranularBall& parent,
                                                  std::span<const std::size_t> left_members,
                                                  const Matrix& x_pos);

struct PrincipalAxis {
  Matrix covariance;                     // d x d population covariance
  std::optional<std::vector<double>> direction;  // unit dominant eigenvector
};

/// Population covariance and its dominant eigenvector by power iteration.
/// Start vector is the normalized all-ones vector (or, if the covariance
/// annihilates it, the axis of largest variance); at most 100 iterations,
/// stopping once successive iterates differ by less than 1e-9. The direction
/// is absent when the trace is below 1e-18. Sign is canonicalized so that the
/// first nonzero component is positive. Requires at least two members.
PrincipalAxis covariance_and_pca(const GranularBall& ball, const Matrix& x_pos);

/// Flips `v` in place so its first nonzero component is positive.
void canonicalize_sign(std::vector<double>& v);

}  // namespace mdlgbc
