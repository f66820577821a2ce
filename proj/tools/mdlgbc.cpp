// mdlgbc: train, apply, cross-validate and inspect granular-ball classifiers.
//
// Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "mdlgbc/coding.hpp"
#include "mdlgbc/dataset.hpp"
#include "mdlgbc/errors.hpp"
#include "mdlgbc/evaluation.hpp"
#include "mdlgbc/model_io.hpp"
#include "mdlgbc/predictor.hpp"
#include "mdlgbc/trainer.hpp"

namespace fs = std::filesystem;
using namespace mdlgbc;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

unsigned default_threads() {
  if (const char* env = std::getenv("MDLGBC_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return 1;
}

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trace_line(const TraceRecord& r, const std::vector<std::string>& labels) {
  nlohmann::json j{{"class", labels[static_cast<std::size_t>(r.class_id)]},
                   {"n", r.n},
                   {"below_split_size", r.below_split_size},
                   {"L1", r.single_length},
                   {"L2", r.two_ball_length == kInfeasible ? nlohmann::json(nullptr)
                                                           : nlohmann::json(r.two_ball_length)},
                   {"L3", r.core_boundary_length == kInfeasible
                              ? nlohmann::json(nullptr)
                              : nlohmann::json(r.core_boundary_length)},
                   {"model", to_string(r.model)},
                   {"children", r.model == LocalModel::single
                                    ? nlohmann::json::array()
                                    : nlohmann::json::array({r.first_size, r.second_size})}};
  return j.dump();
}

struct TrainArgs {
  std::string data, label_col, model, trace, members;
  std::uint64_t seed = kDefaultSeed;
  unsigned threads = 1;
};

int cmd_train(const TrainArgs& a) {
  const auto table = load_csv(a.data, LabelColumn{a.label_col});
  const auto start = std::chrono::steady_clock::now();
  const auto params = fit_normalizer(table);
  const auto encoding = LabelEncoding::fit(table.labels);
  const auto data = transform(table, params, encoding);
  const auto result = fit(data, params, CodingConstants{}, a.seed, a.threads);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  auto doc = model_to_json(result.model);
  doc["label_column"] = table.label_name;
  write_file_atomic(a.model, dump_json(doc));

  if (!a.trace.empty()) {
    std::string text;
    for (const auto& r : result.trace) text += trace_line(r, encoding.names()) + "\n";
    write_file_atomic(a.trace, text);
  }
  if (!a.members.empty()) {
    nlohmann::json m = nlohmann::json::array();
    for (std::size_t c = 0; c < result.members.size(); ++c) {
      m.push_back({{"label", encoding.name(static_cast<int>(c))}, {"balls", result.members[c]}});
    }
    write_file_atomic(a.members, dump_json(m));
  }

  std::cout << "classes: " << result.model.num_classes() << "\n";
  for (const auto& cls : result.model.classes) {
    std::size_t n = 0;
    for (const auto& b : cls.balls) n += b.n;
    std::cout << "  " << cls.label << ": " << cls.balls.size() << " balls, " << n << " samples\n";
  }
  std::cout << "train seconds: " << fmt(seconds, 3) << "\n";
  return 0;
}

struct PredictArgs {
  std::string model, data, out, label_col;
  bool scores = false;
  unsigned threads = 1;
};

int cmd_predict(const PredictArgs& a) {
  std::ifstream in(a.model, std::ios::binary);
  if (!in) throw DataError(a.model + ": cannot open model file");
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(a.model + ": not valid JSON: " + e.what());
  }
  const auto model = model_from_json(doc);

  std::optional<LabelColumn> label;
  if (!a.label_col.empty()) {
    label = LabelColumn{a.label_col};
  } else if (doc.contains("label_column") && doc["label_column"].is_string()) {
    label = LabelColumn{doc["label_column"].get<std::string>()};
  }
  const auto table = load_unlabeled_csv(a.data, model.dimension(), label);
  const Matrix x = normalize(table.features, model.normalization);
  const auto predictions = predict_all(x, model, a.threads);

  std::ostringstream csv;
  csv << "predicted";
  if (a.scores) {
    for (const auto& cls : model.classes) csv << ",score_" << cls.label;
  }
  csv << "\n";
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const auto& name = model.classes[static_cast<std::size_t>(predictions[i].label)].label;
    csv << name;
    if (a.scores) {
      for (double s : predictions[i].scores) csv << "," << full(s);
    }
    csv << "\n";
    if (!table.labels.empty()) hits += table.labels[i] == name;
  }
  write_file_atomic(a.out, csv.str());
  std::cout << "predicted " << predictions.size() << " rows -> " << a.out << "\n";
  if (!table.labels.empty()) {
    std::cout << "accuracy: "
              << fmt(static_cast<double>(hits) / static_cast<double>(predictions.size())) << "\n";
  }
  return 0;
}

struct CrossvalArgs {
  std::string data, label_col, report, name, folds_out;
  std::size_t folds = 10;
  std::uint64_t seed = kDefaultSeed;
  unsigned threads = 1;
};

int cmd_crossval(const CrossvalArgs& a) {
  const auto table = load_csv(a.data, LabelColumn{a.label_col});
  CrossValidationOptions options;
  options.k = a.folds;
  options.seed = a.seed;
  options.threads = a.threads;
  const std::string name = a.name.empty() ? fs::path(a.data).stem().string() : a.name;
  const auto report = cross_validate(table, name, options);

  const auto text = report_to_text(report);
  fs::path json_path(a.report);
  auto text_path = json_path;
  text_path.replace_extension(".txt");
  auto timings_path = json_path;
  timings_path.replace_extension(".timings.json");
  write_file_atomic(json_path, dump_json(report_to_json(report)));
  write_file_atomic(text_path, text);
  write_file_atomic(timings_path, dump_json(timings_to_json(report)));

  if (!a.folds_out.empty()) {
    const auto encoding = LabelEncoding::fit(table.labels);
    std::vector<int> y;
    for (const auto& l : table.labels) y.push_back(encoding.encode(l));
    write_file_atomic(a.folds_out, dump_json(stratified_folds(y, a.folds, a.seed).to_json()));
  }

  std::cout << text << "\n";
  std::cout << "train seconds per fold: " << fmt(report.train_seconds().mean, 3)
            << ", total seconds: " << fmt(report.total_seconds(), 3) << "\n";
  std::cout << "report: " << json_path.string() << ", " << text_path.string() << "\n";
  return 0;
}

struct InspectArgs {
  std::string model, class_label;
};

int cmd_inspect(const InspectArgs& a) {
  const auto model = load_model(a.model);
  bool found = a.class_label.empty();
  std::cout << "model: " << a.model << "\n";
  std::cout << "features: " << model.dimension() << ", classes: " << model.num_classes()
            << ", balls: " << model.ball_count() << ", unit: nats\n";
  std::cout << "floors: r0=" << full(model.floors.r0) << "\n";
  for (std::size_t c = 0; c < model.num_classes(); ++c) {
    const auto& cls = model.classes[c];
    if (!a.class_label.empty() && cls.label != a.class_label) continue;
    found = true;
    std::cout << "\nclass " << cls.label << "  prior=" << fmt(model.priors[c], 6)
              << "  balls=" << cls.balls.size() << "\n";
    char line[256];
    std::snprintf(line, sizeof line, "%4s %6s %8s %9s %8s %9s %11s %10s %10s %8s %11s  %s\n", "ball",
                  "n", "weight", "radius", "risk", "neg_dist", "L_data", "L_intr", "L_mar", "L_cls",
                  "L_total", "center");
    std::cout << line;
    for (std::size_t k = 0; k < cls.balls.size(); ++k) {
      const auto& b = cls.balls[k];
      const auto cost = ball_cost(b.n, b.variance, b.radius, b.avg_boundary_risk,
                                  b.center_neg_dist, model.priors[c], model.has_negatives(),
                                  model.constants);
      std::string center = "[";
      for (std::size_t j = 0; j < b.center.size(); ++j) {
        center += (j ? ", " : "") + fmt(b.center[j]);
      }
      center += "]";
      std::snprintf(line, sizeof line,
                    "%4zu %6zu %8.4f %9.5f %8.5f %9.5f %11.4f %10.4f %10.4f %8.4f %11.4f  %s\n", k,
                    b.n, b.weight, b.radius, b.avg_boundary_risk, b.center_neg_dist, cost.data,
                    cost.intrusion, cost.margin, cost.cls, cost.total, center.c_str());
      std::cout << line;
    }
  }
  if (!found) throw UsageError("no class labelled '" + a.class_label + "' in the model");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Granular-ball classifier built by minimum description length"};
  app.require_subcommand(1);
  const unsigned threads = default_threads();

  TrainArgs train;
  train.threads = threads;
  auto* train_cmd = app.add_subcommand("train", "Fit a model on a labelled CSV file");
  train_cmd->add_option("--data", train.data, "Training CSV")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--label-col", train.label_col, "Label column name or index")->required();
  train_cmd->add_option("--model", train.model, "Output model file (JSON)")->required();
  train_cmd->add_option("--seed", train.seed, "Seed recorded in the model")->capture_default_str();
  train_cmd->add_option("--trace", train.trace, "Write one JSON line per evaluated ball");
  train_cmd->add_option("--members", train.members, "Write stable-ball row memberships (JSON)");
  train_cmd->add_option("--threads", train.threads, "Worker threads (env MDLGBC_THREADS)");

  PredictArgs predict;
  predict.threads = threads;
  auto* predict_cmd = app.add_subcommand("predict", "Label the rows of a CSV file");
  predict_cmd->add_option("--model", predict.model, "Model file")->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("--data", predict.data, "Input CSV")->required()->check(CLI::ExistingFile);
  predict_cmd->add_option("--out", predict.out, "Output CSV")->required();
  predict_cmd->add_option("--label-col", predict.label_col,
                          "Label column to ignore (default: the one used in training)");
  predict_cmd->add_flag("--scores", predict.scores, "Append every class score");
  predict_cmd->add_option("--threads", predict.threads, "Worker threads (env MDLGBC_THREADS)");

  CrossvalArgs crossval;
  crossval.threads = threads;
  auto* cv_cmd = app.add_subcommand("crossval", "Stratified k-fold cross-validation");
  cv_cmd->add_option("--data", crossval.data, "Labelled CSV")->required()->check(CLI::ExistingFile);
  cv_cmd->add_option("--label-col", crossval.label_col, "Label column name or index")->required();
  cv_cmd->add_option("--folds", crossval.folds, "Number of folds")->capture_default_str()->check(CLI::Range(2, 1 << 30));
  cv_cmd->add_option("--seed", crossval.seed, "Fold shuffling seed")->capture_default_str();
  cv_cmd->add_option("--report", crossval.report, "Report path (JSON; .txt and .timings.json alongside)")->required();
  cv_cmd->add_option("--name", crossval.name, "Dataset name in the report (default: file stem)");
  cv_cmd->add_option("--folds-out", crossval.folds_out, "Write the fold plan as JSON");
  cv_cmd->add_option("--threads", crossval.threads, "Folds run concurrently (env MDLGBC_THREADS)");

  InspectArgs inspect;
  auto* inspect_cmd = app.add_subcommand("inspect", "Print the balls of a model");
  inspect_cmd->add_option("--model", inspect.model, "Model file")->required()->check(CLI::ExistingFile);
  inspect_cmd->add_option("--class", inspect.class_label, "Only this class label");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*train_cmd) return cmd_train(train);
    if (*predict_cmd) return cmd_predict(predict);
    if (*cv_cmd) return cmd_crossval(crossval);
    if (*inspect_cmd) return cmd_inspect(inspect);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}
