#include <doctest.h>

#include <random>

#include "../support/oracles.hpp"
#include "mdlgbc/ball.hpp"
#include "mdlgbc/boundary.hpp"

using namespace mdlgbc;

namespace {

ClassContext context(const Matrix& pos, const Matrix& neg) {
  Matrix x;
  std::vector<int> y;
  for (std::size_t i = 0; i < pos.rows(); ++i) {
    x.append_row(pos.row(i));
    y.push_back(0);
  }
  for (std::size_t i = 0; i < neg.rows(); ++i) {
    x.append_row(neg.row(i));
    y.push_back(1);
  }
  return make_class_context(x, y, neg.empty() ? 1 : 2, 0, 1);
}

Matrix one(std::vector<double> r) {
  Matrix m;
  m.append_row(r);
  return m;
}

}  // namespace

TEST_SUITE("boundary_evidence") {

TEST_CASE("class context splits rows and computes the smoothed prior") {
  Matrix x;
  std::vector<int> y;
  for (int i = 0; i < 10; ++i) {
    x.append_row(std::vector<double>{i / 10.0});
    y.push_back(i < 7 ? 0 : (i < 9 ? 1 : 2));
  }
  double total = 0.0;
  for (int c = 0; c < 3; ++c) {
    const auto ctx = make_class_context(x, y, 3, c, 1);
    total += ctx.prior;
    CHECK(ctx.positives.rows() + ctx.negatives.rows() == 10);
    CHECK(ctx.delta_pos.size() == ctx.positives.rows());
  }
  CHECK(make_class_context(x, y, 3, 0, 1).prior == doctest::Approx(8.0 / 13.0));
  CHECK(total == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("nearest negative distance examples") {
  Matrix neg;
  neg.append_row(std::vector<double>{3.0, 4.0});
  const auto ctx = context(one({0.0, 0.0}), neg);
  const std::vector<double> q{0.0, 0.0};
  CHECK(nearest_negative_distance(q, ctx) == 5.0);
  const std::vector<double> on{3.0, 4.0};
  CHECK(nearest_negative_distance(on, ctx) == 0.0);
  CHECK(ctx.delta_pos[0] == 5.0);
}

TEST_CASE("nearest negative distance matches an exhaustive scan") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix pos, neg;
  for (int i = 0; i < 30; ++i) pos.append_row(std::vector<double>{u(rng), u(rng), u(rng)});
  for (int i = 0; i < 100; ++i) neg.append_row(std::vector<double>{u(rng), u(rng), u(rng)});
  const auto ctx = context(pos, neg);
  for (std::size_t i = 0; i < pos.rows(); ++i) {
    CHECK(ctx.delta_pos[i] == doctest::Approx(oracle::nearest(pos.row(i), neg)).epsilon(1e-15));
  }
  for (int t = 0; t < 50; ++t) {
    const std::vector<double> q{u(rng), u(rng), u(rng)};
    CHECK(nearest_negative_distance(q, ctx) == doctest::Approx(oracle::nearest(q, neg)).epsilon(1e-15));
  }
}

TEST_CASE("no negatives means zero distances") {
  const auto ctx = context(one({0.2}), Matrix{});
  CHECK_FALSE(ctx.has_negatives());
  CHECK(ctx.delta_pos[0] == 0.0);
  CHECK(nearest_negative_distance(std::vector<double>{0.9}, ctx) == 0.0);
}

TEST_CASE("boundary risk examples") {
  CHECK(boundary_risk(0.0, 0.3) == 1.0);
  CHECK(boundary_risk(0.3, 0.3) == 0.5);
  CHECK(boundary_risk(0.9, 0.3) == doctest::Approx(0.1).epsilon(1e-15));
}

TEST_CASE("boundary risk is strictly decreasing in delta") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    const double r = 1e-3 + u(rng);
    double a = u(rng), b = u(rng);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    const double ra = boundary_risk(a, r), rb = boundary_risk(b, r);
    CHECK(ra > rb);
    CHECK(ra <= 1.0);
    CHECK(rb > 0.0);
  }
}

TEST_CASE("average boundary risk examples") {
  const CodingConstants k;
  // Negative at the origin; members on a line at distance 0, r and 3r.
  Matrix neg = one({0.0});
  Matrix pos;
  pos.append_row(std::vector<double>{0.0});
  pos.append_row(std::vector<double>{0.5});
  pos.append_row(std::vector<double>{1.5});
  const auto ctx = context(pos, neg);
  const std::vector<std::size_t> all{0, 1, 2};
  CHECK(average_boundary_risk(all, 0.5, ctx, k) == doctest::Approx(1.6 / 3.0).epsilon(1e-15));
  CHECK(average_boundary_risk(all, 0.5, ctx, k) == doctest::Approx(0.5333333333333333).epsilon(1e-15));
  const std::vector<std::size_t> mid{1};
  CHECK(average_boundary_risk(mid, 0.5, ctx, k) == 0.5);
  const auto lone = context(pos, Matrix{});
  CHECK(average_boundary_risk(all, 0.5, lone, k) == 0.0);
}

TEST_CASE("overlap ratio examples and bounds") {
  const CodingConstants k;
  CHECK(overlap_ratio(0.5, 0.7, true, k) == 0.0);
  CHECK(overlap_ratio(0.5, 0.5, true, k) == 0.0);
  CHECK(overlap_ratio(0.5, 0.2, true, k) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(overlap_ratio(0.5, 0.0, true, k) == 1.0);
  CHECK(overlap_ratio(0.5, 0.0, false, k) == 0.0);
  CHECK(overlap_ratio(0.0, 0.0, true, k) == 1.0);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double r = u(rng), dl = u(rng);
    const double w = overlap_ratio(r, dl, true, k);
    CHECK(w >= 0.0);
    CHECK(w <= 1.0);
    CHECK((w == 0.0) == (dl >= std::max(r, k.eps_r)));
  }
}

TEST_CASE("delta_pos does not depend on how positives are grouped") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix x;
  std::vector<int> y;
  for (int i = 0; i < 80; ++i) {
    x.append_row(std::vector<double>{u(rng), u(rng)});
    y.push_back(i % 3 == 0 ? 1 : 0);
  }
  const auto ctx = make_class_context(x, y, 2, 0, 1);
  const CodingConstants k;
  auto ball = build_ball(std::vector<std::size_t>{0, 1, 2, 3}, ctx.positives, 0);
  annotate_boundary(ball, ctx, k);
  auto other = build_ball(std::vector<std::size_t>{2, 3, 4, 5, 6}, ctx.positives, 0);
  annotate_boundary(other, ctx, k);
  // Ball annotation reads delta_pos and never writes it.
  const auto again = make_class_context(x, y, 2, 0, 1);
  CHECK(again.delta_pos == ctx.delta_pos);
  CHECK(ball.center_neg_dist == doctest::Approx(oracle::nearest(ball.center, ctx.negatives)));
  CHECK(ball.avg_boundary_risk >= 0.0);
  CHECK(ball.avg_boundary_risk <= 1.0);
}

}
