#include <doctest.h>

#include <random>
#include <set>

#include "../support/oracles.hpp"
#include "mdlgbc/errors.hpp"
#include "mdlgbc/evaluation.hpp"
#include "test_paths.hpp"

using namespace mdlgbc;

TEST_SUITE("eval_harness") {

TEST_CASE("accuracy examples") {
  const std::vector<int> t{0, 1, 1, 0};
  CHECK(accuracy(t, t) == 1.0);
  CHECK(accuracy(t, std::vector<int>{1, 0, 0, 1}) == 0.0);
  CHECK(accuracy(t, std::vector<int>{0, 1, 1, 1}) == 0.75);
  CHECK_THROWS_AS(accuracy(t, std::vector<int>{0}), UsageError);
  CHECK_THROWS_AS(accuracy(std::vector<int>{}, std::vector<int>{}), UsageError);
}

TEST_CASE("macro F1 examples") {
  const std::vector<int> t{0, 0, 1, 1};
  CHECK(macro_f1(t, t) == 1.0);
  CHECK(macro_f1(t, std::vector<int>{0, 0, 0, 0}) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  // A class in neither vector is outside the union and does not dilute.
  const std::vector<int> classes{0, 1, 2};
  CHECK(macro_f1(t, t, classes) == doctest::Approx(2.0 / 3.0));
  CHECK_THROWS_AS(macro_f1(t, std::vector<int>{0}), UsageError);
}

TEST_CASE("macro F1 equals accuracy on balanced diagonal confusion") {
  // Each class: 4 samples, 3 right, errors spread so precision = recall.
  const std::vector<int> t{0, 0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 2};
  const std::vector<int> p{0, 0, 0, 1, 1, 1, 1, 2, 2, 2, 2, 0};
  CHECK(macro_f1(t, p) == doctest::Approx(accuracy(t, p)).epsilon(1e-15));
}

TEST_CASE("metrics stay in [0,1]") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 200; ++i) {
    std::vector<int> a(1 + rng() % 30), b(a.size());
    for (auto& v : a) v = static_cast<int>(rng() % 4);
    for (auto& v : b) v = static_cast<int>(rng() % 4);
    const double acc = accuracy(a, b), f1 = macro_f1(a, b);
    CHECK(acc >= 0.0);
    CHECK(acc <= 1.0);
    CHECK(f1 >= 0.0);
    CHECK(f1 <= 1.0);
  }
}

TEST_CASE("1-NN baseline: exact hits, lowest index on ties, exhaustive agreement") {
  Matrix train;
  train.append_row(std::vector<double>{0.0});
  train.append_row(std::vector<double>{1.0});
  const std::vector<int> y{7, 3};
  Matrix test;
  test.append_row(std::vector<double>{1.0});
  test.append_row(std::vector<double>{0.5});
  CHECK(baseline_1nn(train, y, test) == std::vector<int>{3, 7});

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix tr, te;
  std::vector<int> ty;
  for (int i = 0; i < 50; ++i) {
    tr.append_row(std::vector<double>{u(rng), u(rng)});
    ty.push_back(i % 3);
  }
  for (int i = 0; i < 40; ++i) te.append_row(std::vector<double>{u(rng), u(rng)});
  const auto got = baseline_1nn(tr, ty, te);
  for (std::size_t i = 0; i < te.rows(); ++i) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < tr.rows(); ++j)
      if (distance(te.row(i), tr.row(j)) < distance(te.row(i), tr.row(best))) best = j;
    CHECK(got[i] == ty[best]);
  }
}

TEST_CASE("summary uses the sample standard deviation") {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  const auto s = summarize(v);
  CHECK(s.mean == 2.5);
  CHECK(s.stddev == doctest::Approx(std::sqrt(5.0 / 3.0)).epsilon(1e-15));
  CHECK(summarize(std::vector<double>{0.3}).stddev == 0.0);
}

TEST_CASE("separable blobs score perfectly, as does 1-NN") {
  RawTable t;
  t.feature_names = {"a", "b"};
  t.label_name = "class";
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g(0.0, 0.03);
  for (int i = 0; i < 20; ++i) {
    const bool pos = i % 2 == 0;
    t.features.append_row(std::vector<double>{(pos ? 0.2 : 0.8) + g(rng), (pos ? 0.2 : 0.8) + g(rng)});
    t.labels.push_back(pos ? "p" : "q");
  }
  CrossValidationOptions opt;
  opt.k = 5;
  const auto r = cross_validate(t, "blobs", opt);
  REQUIRE(r.folds.size() == 5);
  for (const auto& f : r.folds) {
    CHECK(f.accuracy == 1.0);
    CHECK(f.baseline_accuracy == 1.0);
    CHECK(f.macro_f1 == 1.0);
  }
}

TEST_CASE("leave-one-out on a tiny set") {
  RawTable t;
  t.feature_names = {"a"};
  for (int i = 0; i < 6; ++i) {
    t.features.append_row(std::vector<double>{static_cast<double>(i)});
    t.labels.push_back(i < 3 ? "x" : "y");
  }
  CrossValidationOptions opt;
  opt.k = 6;
  const auto r = cross_validate(t, "tiny", opt);
  CHECK(r.folds.size() == 6);
  for (const auto& f : r.folds) CHECK(f.test_size == 1);
}

TEST_CASE("iris report is deterministic, self-consistent and leakage-free") {
  const auto t = load_csv(test_data("iris.csv"), LabelColumn{"class"});
  CrossValidationOptions opt;
  const auto a = cross_validate(t, "iris", opt);
  opt.threads = 4;
  const auto b = cross_validate(t, "iris", opt);
  CHECK(report_to_json(a).dump() == report_to_json(b).dump());
  CHECK(report_to_text(a) == report_to_text(b));

  std::vector<double> acc;
  for (const auto& f : a.folds) acc.push_back(f.accuracy);
  const auto j = report_to_json(a);
  CHECK(std::abs(j["summary"]["accuracy"]["mean"].get<double>() - summarize(acc).mean) <= 1e-12);
  CHECK(std::abs(j["summary"]["accuracy"]["std"].get<double>() - summarize(acc).stddev) <= 1e-12);
  CHECK(j["fold_generator"] == fold_generator_name());
  CHECK(j["unit"] == "nats");
  CHECK(a.accuracy().mean >= 0.94);
  CHECK(report_to_text(a).find(" ± ") != std::string::npos);
  const auto timings = timings_to_json(a);
  CHECK(timings["folds"].size() == 10);

  // Normalizers differ between folds: each one saw only its training rows.
  const auto enc = LabelEncoding::fit(t.labels);
  std::vector<int> y;
  for (const auto& l : t.labels) y.push_back(enc.encode(l));
  const auto plan = stratified_folds(y, 10, 2035);
  std::set<std::vector<double>> mins;
  for (std::size_t f = 0; f < 10; ++f) {
    const auto rows = plan.training_indices(f);
    mins.insert(fit_normalizer(subset(t, rows)).mins);
  }
  CHECK(mins.size() > 1);
}

}
