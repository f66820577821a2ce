#include "mdlgbc/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>
#include <thread>

#include "mdlgbc/errors.hpp"
#include "mdlgbc/predictor.hpp"

namespace mdlgbc {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void check_lengths(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) {
    throw UsageError("label vectors differ in length: " + std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()));
  }
  if (a.empty()) throw UsageError("label vectors are empty");
}

template <typename Field>
Summary summarize_field(const std::vector<FoldResult>& folds, Field field) {
  std::vector<double> values;
  values.reserve(folds.size());
  for (const auto& f : folds) values.push_back(static_cast<double>(field(f)));
  return summarize(values);
}

nlohmann::json summary_json(const Summary& s) { return {{"mean", s.mean}, {"std", s.stddev}}; }

std::string cell(const Summary& s) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f ± %.4f", s.mean, s.stddev);
  return buf;
}

FoldResult run_fold(const RawTable& table, const LabelEncoding& all_labels,
                    std::span<const int> y_all, const FoldPlan& plan, std::size_t f,
                    const CrossValidationOptions& options) {
  const auto train_rows = plan.training_indices(f);
  const auto& test_rows = plan.folds[f];
  const RawTable train = subset(table, train_rows);
  const RawTable test = subset(table, test_rows);

  const auto start = Clock::now();
  const auto params = fit_normalizer(train);
  const auto train_labels = LabelEncoding::fit(train.labels);
  const auto train_data = transform(train, params, train_labels);
  const auto trained = fit(train_data, params, options.constants, options.seed, 1);
  FoldResult result;
  result.train_seconds = seconds_since(start);

  const auto predict_start = Clock::now();
  const Matrix test_x = normalize(test.features, params);
  const auto predictions = predict_all(test_x, trained.model, 1);
  result.predict_seconds = seconds_since(predict_start);

  // Metrics run in the label space of the whole table.
  std::vector<int> to_all(train_labels.size());
  for (std::size_t c = 0; c < train_labels.size(); ++c) {
    to_all[c] = all_labels.encode(train_labels.name(static_cast<int>(c)));
  }
  std::vector<int> y_true;
  std::vector<int> y_pred;
  for (std::size_t i = 0; i < test_rows.size(); ++i) {
    y_true.push_back(y_all[test_rows[i]]);
    y_pred.push_back(to_all[static_cast<std::size_t>(predictions[i].label)]);
  }
  std::vector<int> train_y_all;
  for (int c : train_data.y) train_y_all.push_back(to_all[static_cast<std::size_t>(c)]);
  const auto nn = baseline_1nn(train_data.x, train_y_all, test_x);

  result.fold = f;
  result.train_size = train_rows.size();
  result.test_size = test_rows.size();
  result.accuracy = accuracy(y_true, y_pred);
  result.macro_f1 = macro_f1(y_true, y_pred);
  result.baseline_accuracy = accuracy(y_true, nn);
  result.stable_balls = trained.model.ball_count();
  return result;
}

}  // namespace

double accuracy(std::span<const int> y_true, std::span<const int> y_pred) {
  check_lengths(y_true, y_pred);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) hits += y_true[i] == y_pred[i];
  return static_cast<double>(hits) / static_cast<double>(y_true.size());
}

double macro_f1(std::span<const int> y_true, std::span<const int> y_pred) {
  check_lengths(y_true, y_pred);
  std::set<int> classes(y_true.begin(), y_true.end());
  classes.insert(y_pred.begin(), y_pred.end());
  const std::vector<int> list(classes.begin(), classes.end());
  return macro_f1(y_true, y_pred, list);
}

double macro_f1(std::span<const int> y_true, std::span<const int> y_pred,
                std::span<const int> classes) {
  check_lengths(y_true, y_pred);
  if (classes.empty()) return 0.0;
  double total = 0.0;
  for (int c : classes) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
      const bool t = y_true[i] == c;
      const bool p = y_pred[i] == c;
      tp += t && p;
      fp += !t && p;
      fn += t && !p;
    }
    const double precision = tp + fp ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
    const double recall = tp + fn ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
    total += precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
  }
  return total / static_cast<double>(classes.size());
}

std::vector<int> baseline_1nn(const Matrix& train_x, std::span<const int> train_y,
                              const Matrix& test_x) {
  if (train_x.empty()) throw UsageError("baseline_1nn: empty training set");
  std::vector<int> out(test_x.rows());
  for (std::size_t i = 0; i < test_x.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_idx = 0;
    for (std::size_t t = 0; t < train_x.rows(); ++t) {
      const double dist = squared_distance(test_x.row(i), train_x.row(t));
      if (dist < best) {
        best = dist;
        best_idx = t;
      }
    }
    out[i] = train_y[best_idx];
  }
  return out;
}

Summary summarize(std::span<const double> values) {
  Summary s;
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

Summary EvalReport::accuracy() const {
  return summarize_field(folds, [](const FoldResult& f) { return f.accuracy; });
}
Summary EvalReport::macro_f1() const {
  return summarize_field(folds, [](const FoldResult& f) { return f.macro_f1; });
}
Summary EvalReport::baseline_accuracy() const {
  return summarize_field(folds, [](const FoldResult& f) { return f.baseline_accuracy; });
}
Summary EvalReport::stable_balls() const {
  return summarize_field(folds, [](const FoldResult& f) { return f.stable_balls; });
}
Summary EvalReport::train_seconds() const {
  return summarize_field(folds, [](const FoldResult& f) { return f.train_seconds; });
}
Summary EvalReport::predict_seconds() const {
  return summarize_field(folds, [](const FoldResult& f) { return f.predict_seconds; });
}
double EvalReport::total_seconds() const {
  double total = 0.0;
  for (const auto& f : folds) total += f.train_seconds + f.predict_seconds;
  return total;
}

EvalReport cross_validate(const RawTable& table, const std::string& dataset_name,
                          const CrossValidationOptions& options) {
  if (table.labels.size() != table.n()) throw DataError("cross-validation requires labels");
  const auto all_labels = LabelEncoding::fit(table.labels);
  std::vector<int> y_all;
  y_all.reserve(table.n());
  for (const auto& l : table.labels) y_all.push_back(all_labels.encode(l));
  const auto plan = stratified_folds(y_all, options.k, options.seed);

  EvalReport report;
  report.dataset = dataset_name;
  report.n = table.n();
  report.d = table.d();
  report.num_classes = all_labels.size();
  report.k = options.k;
  report.seed = options.seed;
  report.fold_generator = fold_generator_name();
  report.constants = options.constants;
  report.folds.resize(options.k);

  const std::size_t workers = std::min<std::size_t>(std::max(1u, options.threads), options.k);
  if (workers <= 1) {
    for (std::size_t f = 0; f < options.k; ++f) {
      report.folds[f] = run_fold(table, all_labels, y_all, plan, f, options);
    }
    return report;
  }
  std::vector<std::exception_ptr> errors(options.k);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t f = w; f < options.k; f += workers) {
          try {
            report.folds[f] = run_fold(table, all_labels, y_all, plan, f, options);
          } catch (...) {
            errors[f] = std::current_exception();
          }
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return report;
}

nlohmann::json report_to_json(const EvalReport& report) {
  nlohmann::json folds = nlohmann::json::array();
  for (const auto& f : report.folds) {
    folds.push_back({{"fold", f.fold},
                     {"train_size", f.train_size},
                     {"test_size", f.test_size},
                     {"accuracy", f.accuracy},
                     {"macro_f1", f.macro_f1},
                     {"baseline_1nn_accuracy", f.baseline_accuracy},
                     {"stable_balls", f.stable_balls}});
  }
  const auto& k = report.constants;
  return {{"format_version", report.format_version},
          {"dataset", report.dataset},
          {"n", report.n},
          {"d", report.d},
          {"classes", report.num_classes},
          {"k", report.k},
          {"seed", report.seed},
          {"fold_generator", report.fold_generator},
          {"unit", "nats"},
          {"constants",
           {{"eps_r", k.eps_r}, {"eps_v", k.eps_v}, {"eps_num", k.eps_num}, {"eps_mdl", k.eps_mdl}}},
          {"folds", folds},
          {"summary",
           {{"accuracy", summary_json(report.accuracy())},
            {"macro_f1", summary_json(report.macro_f1())},
            {"baseline_1nn_accuracy", summary_json(report.baseline_accuracy())},
            {"stable_balls", summary_json(report.stable_balls())}}}};
}

nlohmann::json timings_to_json(const EvalReport& report) {
  nlohmann::json folds = nlohmann::json::array();
  for (const auto& f : report.folds) {
    folds.push_back({{"fold", f.fold},
                     {"train_seconds", f.train_seconds},
                     {"predict_seconds", f.predict_seconds}});
  }
  return {{"dataset", report.dataset},
          {"folds", folds},
          {"train_seconds", summary_json(report.train_seconds())},
          {"predict_seconds", summary_json(report.predict_seconds())},
          {"total_seconds", report.total_seconds()}};
}

std::string report_to_text(const EvalReport& report) {
  std::ostringstream out;
  out << "dataset " << report.dataset << " (n=" << report.n << ", d=" << report.d
      << ", classes=" << report.num_classes << ")\n";
  out << report.k << "-fold stratified cross-validation, seed " << report.seed << " ("
      << report.fold_generator << ")\n\n";
  char line[160];
  std::snprintf(line, sizeof line, "%4s  %6s  %5s  %8s  %8s  %8s  %5s\n", "fold", "train", "test",
                "Acc.", "MF1", "1-NN", "balls");
  out << line;
  for (const auto& f : report.folds) {
    std::snprintf(line, sizeof line, "%4zu  %6zu  %5zu  %8.4f  %8.4f  %8.4f  %5zu\n", f.fold + 1,
                  f.train_size, f.test_size, f.accuracy, f.macro_f1, f.baseline_accuracy,
                  f.stable_balls);
    out << line;
  }
  out << "\n";
  std::snprintf(line, sizeof line, "%-8s  %-18s  %-18s  %-18s  %s\n", "Dataset", "Acc.", "MF1",
                "1-NN Acc.", "balls");
  out << line;
  std::snprintf(line, sizeof line, "%-8s  %-19s  %-19s  %-19s  %s\n", report.dataset.c_str(),
                cell(report.accuracy()).c_str(), cell(report.macro_f1()).c_str(),
                cell(report.baseline_accuracy()).c_str(), cell(report.stable_balls()).c_str());
  out << line;
  return out.str();
}

}  // namespace mdlgbc
