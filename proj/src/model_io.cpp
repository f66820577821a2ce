#include "mdlgbc/model_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>

#include "mdlgbc/errors.hpp"

namespace mdlgbc {
namespace {

using nlohmann::json;

constexpr double kSumTolerance = 1e-9;

void require(bool ok, const std::string& what) {
  if (!ok) throw DataError("invalid model file: " + what);
}

std::vector<double> vector_field(const json& obj, const char* key, std::size_t expected) {
  auto v = obj.at(key).get<std::vector<double>>();
  require(v.size() == expected, std::string(key) + " has " + std::to_string(v.size()) +
                                    " entries, expected " + std::to_string(expected));
  for (double x : v) require(std::isfinite(x), std::string(key) + " contains a non-finite value");
  return v;
}

TrainedModel parse_model(const json& doc) {
  require(doc.is_object(), "top level must be an object");
  require(doc.contains("format_version") && doc.at("format_version").is_number_integer(),
          "missing format_version");
  const int version = doc.at("format_version").get<int>();
  if (version != kModelFormatVersion) {
    throw DataError("unsupported model format_version " + std::to_string(version) + " (expected " +
                    std::to_string(kModelFormatVersion) + ")");
  }
  require(doc.at("unit").get<std::string>() == "nats", "unit must be \"nats\"");

  TrainedModel model;
  model.format_version = version;
  model.seed = doc.at("seed").get<std::uint64_t>();

  const auto& norm = doc.at("normalization");
  model.normalization.mins = norm.at("mins").get<std::vector<double>>();
  const std::size_t d = model.normalization.mins.size();
  require(d > 0, "normalization has zero features");
  model.normalization.maxs = vector_field(norm, "maxs", d);
  for (std::size_t j = 0; j < d; ++j) {
    require(model.normalization.mins[j] <= model.normalization.maxs[j], "normalization min > max");
  }

  const auto labels = doc.at("labels").get<std::vector<std::string>>();
  const std::size_t num_classes = labels.size();
  require(num_classes > 0, "no classes");
  model.priors = vector_field(doc, "priors", num_classes);
  double prior_sum = 0.0;
  for (double p : model.priors) {
    require(p > 0.0 && p < 1.0 + kSumTolerance, "prior outside (0, 1]");
    prior_sum += p;
  }
  require(std::abs(prior_sum - 1.0) <= kSumTolerance, "priors do not sum to 1");

  const auto& k = doc.at("constants");
  model.constants.eps_r = k.at("eps_r").get<double>();
  model.constants.eps_v = k.at("eps_v").get<double>();
  model.constants.eps_num = k.at("eps_num").get<double>();
  model.constants.eps_mdl = k.at("eps_mdl").get<double>();
  require(model.constants.valid(), "constants must be strictly positive");

  const auto& floors = doc.at("floors");
  model.floors.r0 = floors.at("r0").get<double>();
  require(model.floors.r0 > 0.0, "r0 must be positive");
  model.floors.eta = vector_field(floors, "eta", d);
  for (double e : model.floors.eta) require(e > 0.0, "eta must be positive");

  const auto& classes = doc.at("classes");
  require(classes.is_array() && classes.size() == num_classes, "classes do not match labels");
  for (std::size_t c = 0; c < num_classes; ++c) {
    const auto& cls = classes[c];
    ClassModel cm;
    cm.label = cls.at("label").get<std::string>();
    require(cm.label == labels[c], "class label mismatch at index " + std::to_string(c));
    const auto& balls = cls.at("balls");
    require(balls.is_array() && !balls.empty(), "class '" + cm.label + "' has no balls");
    double weight_sum = 0.0;
    for (const auto& b : balls) {
      StableBall sb;
      sb.center = vector_field(b, "center", d);
      sb.variance = vector_field(b, "variance", d);
      sb.radius = b.at("radius").get<double>();
      sb.n = b.at("n").get<std::size_t>();
      sb.avg_boundary_risk = b.at("avg_boundary_risk").get<double>();
      sb.center_neg_dist = b.at("center_neg_dist").get<double>();
      sb.weight = b.at("weight").get<double>();
      require(sb.n > 0, "ball with n = 0");
      require(sb.radius >= 0.0 && std::isfinite(sb.radius), "bad radius");
      require(sb.avg_boundary_risk >= 0.0 && sb.avg_boundary_risk <= 1.0,
              "avg_boundary_risk outside [0, 1]");
      require(sb.center_neg_dist >= 0.0, "negative center_neg_dist");
      require(sb.weight > 0.0 && sb.weight <= 1.0, "ball weight outside (0, 1]");
      for (double v : sb.variance) require(v >= 0.0, "negative variance");
      weight_sum += sb.weight;
      cm.balls.push_back(std::move(sb));
    }
    require(std::abs(weight_sum - 1.0) <= kSumTolerance,
            "weights of class '" + cm.label + "' do not sum to 1");
    model.classes.push_back(std::move(cm));
  }
  return model;
}

}  // namespace

json model_to_json(const TrainedModel& model) {
  json classes = json::array();
  std::vector<std::string> labels;
  for (const auto& cls : model.classes) {
    labels.push_back(cls.label);
    json balls = json::array();
    for (const auto& b : cls.balls) {
      balls.push_back({{"center", b.center},
                       {"variance", b.variance},
                       {"radius", b.radius},
                       {"n", b.n},
                       {"avg_boundary_risk", b.avg_boundary_risk},
                       {"center_neg_dist", b.center_neg_dist},
                       {"weight", b.weight}});
    }
    classes.push_back({{"label", cls.label}, {"balls", balls}});
  }
  const auto& k = model.constants;
  return {{"format_version", model.format_version},
          {"unit", "nats"},
          {"seed", model.seed},
          {"normalization", {{"mins", model.normalization.mins}, {"maxs", model.normalization.maxs}}},
          {"labels", labels},
          {"priors", model.priors},
          {"constants",
           {{"eps_r", k.eps_r}, {"eps_v", k.eps_v}, {"eps_num", k.eps_num}, {"eps_mdl", k.eps_mdl}}},
          {"floors", {{"r0", model.floors.r0}, {"eta", model.floors.eta}}},
          {"classes", classes}};
}

TrainedModel model_from_json(const json& doc) {
  try {
    return parse_model(doc);
  } catch (const json::exception& e) {
    throw DataError(std::string("invalid model file: ") + e.what());
  }
}

std::string dump_json(const json& doc) { return doc.dump(2) + "\n"; }

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError(path.string() + ": cannot open for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw DataError(path.string() + ": write failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw DataError(path.string() + ": cannot move temporary file into place: " + ec.message());
  }
}

void save_model(const TrainedModel& model, const std::filesystem::path& path) {
  write_file_atomic(path, dump_json(model_to_json(model)));
}

TrainedModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path.string() + ": cannot open model file");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw DataError(path.string() + ": not valid JSON: " + e.what());
  }
  return model_from_json(doc);
}

}  // namespace mdlgbc
