#include <doctest.h>

#include <random>
#include <set>

#include "../support/oracles.hpp"
#include "mdlgbc/errors.hpp"
#include "mdlgbc/model_io.hpp"
#include "mdlgbc/trainer.hpp"
#include "test_paths.hpp"

using namespace mdlgbc;

namespace {

LabeledDataset dataset(std::initializer_list<std::pair<std::vector<double>, int>> rows,
                       std::size_t classes) {
  LabeledDataset data;
  for (const auto& [r, c] : rows) {
    data.x.append_row(r);
    data.y.push_back(c);
  }
  for (std::size_t c = 0; c < classes; ++c) data.label_names.push_back("c" + std::to_string(c));
  return data;
}

NormalizationParams identity(std::size_t d) {
  return {std::vector<double>(d, 0.0), std::vector<double>(d, 1.0)};
}

void check_conservation(const LabeledDataset& data, const FitResult& r) {
  for (std::size_t c = 0; c < data.num_classes(); ++c) {
    std::vector<std::size_t> expected;
    for (std::size_t i = 0; i < data.n(); ++i)
      if (data.y[i] == static_cast<int>(c)) expected.push_back(i);
    std::vector<std::size_t> got;
    double weights = 0.0;
    std::size_t n_sum = 0;
    for (std::size_t b = 0; b < r.members[c].size(); ++b) {
      got.insert(got.end(), r.members[c][b].begin(), r.members[c][b].end());
      weights += r.model.classes[c].balls[b].weight;
      n_sum += r.model.classes[c].balls[b].n;
      CHECK(r.members[c][b].size() == r.model.classes[c].balls[b].n);
    }
    CHECK(oracle::sorted(got) == expected);
    CHECK(n_sum == expected.size());
    CHECK(std::abs(weights - 1.0) <= 1e-12);
    CHECK(r.compete_evaluations[c] <= 2 * expected.size() - 1);
  }
}

}  // namespace

TEST_SUITE("trainer") {

TEST_CASE("singleton class gives one singleton ball") {
  Matrix x;
  x.append_row(std::vector<double>{0.4});
  x.append_row(std::vector<double>{0.1});
  x.append_row(std::vector<double>{0.2});
  const std::vector<int> y{0, 1, 1};
  const auto ctx = make_class_context(x, y, 2, 0, granularity(1, 1).n_min);
  std::vector<TraceRecord> trace;
  const auto out = train_class(ctx, CodingConstants{}, &trace);
  REQUIRE(out.stable.size() == 1);
  CHECK(out.stable[0].size() == 1);
  CHECK(out.compete_evaluations == 0);
  REQUIRE(trace.size() == 1);
  CHECK(trace[0].below_split_size);
  CHECK(out.stable[0].center_neg_dist == doctest::Approx(0.2));
}

TEST_CASE("tight cluster far from negatives stays a single ball") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0.0, 0.01);
  LabeledDataset data;
  data.label_names = {"a", "b"};
  for (int i = 0; i < 30; ++i) {
    data.x.append_row(std::vector<double>{0.2 + g(rng), 0.2 + g(rng)});
    data.y.push_back(0);
  }
  for (int i = 0; i < 30; ++i) {
    data.x.append_row(std::vector<double>{0.9 + g(rng), 0.9 + g(rng)});
    data.y.push_back(1);
  }
  const auto r = fit(data, identity(2));
  CHECK(r.model.classes[0].balls.size() == 1);
  CHECK(r.model.classes[1].balls.size() == 1);
  // The root decision must be M1 on direct evaluation.
  const auto ctx = make_class_context(data.x, data.y, 2, 0, granularity(30, 2).n_min);
  std::vector<std::size_t> all(30);
  std::iota(all.begin(), all.end(), std::size_t{0});
  auto ball = build_ball(all, ctx.positives, 0);
  annotate_boundary(ball, ctx, CodingConstants{});
  const auto dec = compete(ball, ctx, CodingConstants{});
  CHECK(dec.model == LocalModel::single);
  CHECK(dec.single_length < std::min(dec.two_ball_length, dec.core_boundary_length) + 1e-6);
}

TEST_CASE("two separated clusters with negatives between them split apart") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(0.0, 0.02);
  LabeledDataset data;
  data.label_names = {"a", "b"};
  for (int i = 0; i < 40; ++i) {
    const double cx = i < 20 ? 0.1 : 0.9;
    data.x.append_row(std::vector<double>{cx + g(rng), 0.5 + g(rng)});
    data.y.push_back(0);
  }
  for (int i = 0; i < 15; ++i) {
    data.x.append_row(std::vector<double>{0.5 + g(rng), 0.5 + g(rng)});
    data.y.push_back(1);
  }
  const auto r = fit(data, identity(2));
  CHECK(r.model.classes[0].balls.size() >= 2);
  for (const auto& rows : r.members[0]) {
    const bool left = rows.front() < 20;
    for (auto i : rows) CHECK((i < 20) == left);
  }
  check_conservation(data, r);
}

TEST_CASE("floors: fallback, nearest-rank percentile, constant feature") {
  const CodingConstants k;
  Matrix x;
  x.append_row(std::vector<double>{0.0, 0.5});
  x.append_row(std::vector<double>{1.0, 0.5});
  const std::vector<double> zeros{0.0, 0.0, 0.0};
  CHECK(estimate_floors(zeros, x, k).r0 == k.eps_r);
  std::vector<double> radii{0.0};
  for (int i = 1; i <= 10; ++i) radii.push_back(i / 10.0);
  const auto f = estimate_floors(radii, x, k);
  CHECK(f.r0 == 0.1);
  CHECK(f.eta[0] == doctest::Approx(1e-3 * 0.25));
  CHECK(f.eta[1] == k.eps_v);
  std::vector<double> many;
  for (int i = 1; i <= 100; ++i) many.push_back(i);
  CHECK(estimate_floors(many, x, k).r0 == 5.0);
  many.push_back(101);
  CHECK(estimate_floors(many, x, k).r0 == 6.0);
}

TEST_CASE("two-sample dataset") {
  const auto data = dataset({{{0.0}, 0}, {{1.0}, 1}}, 2);
  const auto r = fit(data, identity(1));
  REQUIRE(r.model.classes.size() == 2);
  CHECK(r.model.classes[0].balls.size() == 1);
  CHECK(r.model.classes[1].balls.size() == 1);
  CHECK(r.model.priors == std::vector<double>{0.5, 0.5});
  CHECK(r.model.floors.r0 == CodingConstants{}.eps_r);
}

TEST_CASE("single-class training drops every boundary term") {
  const auto data = dataset({{{0.1}, 0}, {{0.2}, 0}, {{0.3}, 0}, {{0.9}, 0}}, 1);
  const auto r = fit(data, identity(1));
  CHECK_FALSE(r.model.has_negatives());
  for (const auto& b : r.model.classes[0].balls) CHECK(b.avg_boundary_risk == 0.0);
  check_conservation(data, r);
}

TEST_CASE("missing class is a data error") {
  auto data = dataset({{{0.1}, 0}, {{0.2}, 0}}, 2);
  CHECK_THROWS_AS(fit(data, identity(1)), DataError);
}

TEST_CASE("iris: conservation, trace consistency and determinism") {
  const auto t = load_csv(test_data("iris.csv"), LabelColumn{"class"});
  const auto params = fit_normalizer(t);
  const auto data = transform(t, params, LabelEncoding::fit(t.labels));
  const auto a = fit(data, params);
  const auto b = fit(data, params, CodingConstants{}, kDefaultSeed, 3);
  CHECK(a.model == b.model);
  CHECK(dump_json(model_to_json(a.model)) == dump_json(model_to_json(b.model)));
  check_conservation(data, a);
  std::size_t total = 0;
  for (const auto& c : a.model.classes)
    for (const auto& ball : c.balls) total += ball.n;
  CHECK(total == 150);

  // Every split pushes two children, and each child shows up later in the
  // trace as an evaluation or as a small-ball emission.
  std::vector<std::size_t> evaluated(3, 0), pushed(3, 0);
  for (const auto& rec : a.trace) {
    ++evaluated[static_cast<std::size_t>(rec.class_id)];
    if (rec.model != LocalModel::single) {
      pushed[static_cast<std::size_t>(rec.class_id)] += 2;
      CHECK(std::min(rec.two_ball_length, rec.core_boundary_length) < rec.single_length - 1e-6);
      CHECK(rec.first_size + rec.second_size == rec.n);
    }
  }
  for (std::size_t c = 0; c < 3; ++c) CHECK(evaluated[c] == pushed[c] + 1);
}

TEST_CASE("random datasets conserve members and respect the evaluation bound") {
  std::mt19937_64 rng(123);
  for (int trial = 0; trial < 15; ++trial) {
    const auto t = oracle::blobs(rng, 20 + rng() % 150, 1 + rng() % 5, 1 + rng() % 4, 0.2);
    const auto data = oracle::prepared(t);
    const auto r = fit(data, fit_normalizer(t.features));
    check_conservation(data, r);
  }
}

}
