#include "mdlgbc/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <sstream>
#include <string_view>

#include "mdlgbc/errors.hpp"
#include "mdlgbc/rng.hpp"

namespace mdlgbc {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

bool parse_double(std::string_view text, double& out) {
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value)) {
    return false;
  }
  out = value;
  return true;
}

bool is_index(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char ch) { return ch >= '0' && ch <= '9'; });
}

std::string location(const std::string& source, std::size_t line, std::size_t column) {
  return source + ":" + std::to_string(line) + ":" + std::to_string(column + 1);
}

// Resolves the label column; nullopt means "no label column".
std::optional<std::size_t> resolve_label_column(const std::vector<std::string>& header,
                                                const std::optional<LabelColumn>& label,
                                                const std::string& source, bool required) {
  if (!label) return std::nullopt;
  const auto& spec = label->spec;
  if (auto it = std::find(header.begin(), header.end(), spec); it != header.end()) {
    return static_cast<std::size_t>(it - header.begin());
  }
  if (is_index(spec)) {
    std::size_t idx = 0;
    std::from_chars(spec.data(), spec.data() + spec.size(), idx);
    if (idx < header.size()) return idx;
  }
  if (required) throw DataError(source + ": label column '" + spec + "' not found in header");
  return std::nullopt;
}

RawTable parse_table(std::istream& in, const std::optional<LabelColumn>& label_column,
                     const std::string& source, bool label_required) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;
    for (auto f : split_fields(line)) header.emplace_back(f);
    break;
  }
  if (header.empty()) throw DataError(source + ": empty file, header row required");

  const auto label_idx = resolve_label_column(header, label_column, source, label_required);

  RawTable table;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (label_idx && j == *label_idx) {
      table.label_name = header[j];
    } else {
      table.feature_names.push_back(header[j]);
    }
  }
  const std::size_t d = table.feature_names.size();
  if (d == 0) throw DataError(source + ": no feature columns");

  std::vector<double> row(d);
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != header.size()) {
      throw DataError(location(source, line_no, 0) + ": expected " + std::to_string(header.size()) +
                      " fields, found " + std::to_string(fields.size()));
    }
    std::size_t out = 0;
    for (std::size_t j = 0; j < fields.size(); ++j) {
      if (label_idx && j == *label_idx) {
        if (fields[j].empty()) throw DataError(location(source, line_no, j) + ": empty label");
        table.labels.emplace_back(fields[j]);
        continue;
      }
      if (!parse_double(fields[j], row[out])) {
        throw DataError(location(source, line_no, j) + ": cannot parse '" + std::string(fields[j]) +
                        "' in column '" + header[j] + "' as a finite number");
      }
      ++out;
    }
    table.features.append_row(row);
  }
  if (table.n() == 0) throw DataError(source + ": no data rows");
  return table;
}

bool parse_all_numeric(std::span<const std::string> names, std::vector<double>& values) {
  values.resize(names.size());
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (!parse_double(names[i], values[i])) return false;
  }
  return true;
}

}  // namespace

RawTable read_csv(std::istream& in, const LabelColumn& label_column, const std::string& source_name) {
  return parse_table(in, label_column, source_name, true);
}

RawTable load_csv(const std::filesystem::path& path, const LabelColumn& label_column) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path.string() + ": cannot open file");
  return parse_table(in, label_column, path.string(), true);
}

RawTable load_unlabeled_csv(const std::filesystem::path& path, std::size_t expected_d,
                            const std::optional<LabelColumn>& label_column) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(path.string() + ": cannot open file");
  auto table = parse_table(in, label_column, path.string(), false);
  if (table.d() != expected_d) {
    throw DataError(path.string() + ": dimension mismatch, model expects d=" +
                    std::to_string(expected_d) + " but file has d=" + std::to_string(table.d()));
  }
  return table;
}

NormalizationParams fit_normalizer(const Matrix& features) {
  NormalizationParams params;
  if (features.empty()) throw UsageError("fit_normalizer: empty table");
  const auto first = features.row(0);
  params.mins.assign(first.begin(), first.end());
  params.maxs.assign(first.begin(), first.end());
  for (std::size_t i = 1; i < features.rows(); ++i) {
    const auto r = features.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) {
      params.mins[j] = std::min(params.mins[j], r[j]);
      params.maxs[j] = std::max(params.maxs[j], r[j]);
    }
  }
  return params;
}

NormalizationParams fit_normalizer(const RawTable& table) { return fit_normalizer(table.features); }

Matrix normalize(const Matrix& features, const NormalizationParams& params) {
  if (features.cols() != params.dimension()) {
    throw DataError("dimension mismatch: normalization expects d=" +
                    std::to_string(params.dimension()) + ", data has d=" +
                    std::to_string(features.cols()));
  }
  Matrix out(features.rows(), features.cols());
  for (std::size_t i = 0; i < features.rows(); ++i) {
    for (std::size_t j = 0; j < features.cols(); ++j) {
      const double range = params.maxs[j] - params.mins[j];
      out(i, j) = range > 0.0 ? (features(i, j) - params.mins[j]) / range : 0.0;
    }
  }
  return out;
}

LabelEncoding::LabelEncoding(std::vector<std::string> names) : names_(std::move(names)) {}

LabelEncoding LabelEncoding::fit(std::span<const std::string> labels) {
  std::vector<std::string> names(labels.begin(), labels.end());
  std::sort(names.begin(), names.end());
  names.erase(std::unique(names.begin(), names.end()), names.end());
  std::vector<double> numeric;
  if (parse_all_numeric(names, numeric)) {
    std::vector<std::size_t> order(names.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return numeric[a] < numeric[b]; });
    std::vector<std::string> sorted;
    sorted.reserve(names.size());
    for (auto i : order) sorted.push_back(names[i]);
    names = std::move(sorted);
  }
  return LabelEncoding(std::move(names));
}

std::optional<int> LabelEncoding::find(const std::string& label) const {
  const auto it = std::find(names_.begin(), names_.end(), label);
  if (it == names_.end()) return std::nullopt;
  return static_cast<int>(it - names_.begin());
}

int LabelEncoding::encode(const std::string& label) const {
  if (auto idx = find(label)) return *idx;
  throw DataError("unknown label '" + label + "'");
}

LabeledDataset transform(const RawTable& table, const NormalizationParams& params,
                         const LabelEncoding& encoding) {
  LabeledDataset out;
  out.x = normalize(table.features, params);
  out.label_names = encoding.names();
  out.y.reserve(table.labels.size());
  for (const auto& label : table.labels) out.y.push_back(encoding.encode(label));
  return out;
}

RawTable subset(const RawTable& table, std::span<const std::size_t> rows) {
  RawTable out;
  out.features = table.features.select_rows(rows);
  out.feature_names = table.feature_names;
  out.label_name = table.label_name;
  if (!table.labels.empty()) {
    out.labels.reserve(rows.size());
    for (auto r : rows) out.labels.push_back(table.labels[r]);
  }
  return out;
}

std::vector<std::size_t> FoldPlan::training_indices(std::size_t f) const {
  std::vector<std::size_t> out;
  for (std::size_t g = 0; g < folds.size(); ++g) {
    if (g == f) continue;
    out.insert(out.end(), folds[g].begin(), folds[g].end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

nlohmann::json FoldPlan::to_json() const {
  return nlohmann::json{{"seed", seed}, {"k", k}, {"folds", folds}};
}

std::string fold_generator_name() {
  return std::string(SplitMix64::kName) + "/fisher-yates/per-class-round-robin";
}

FoldPlan stratified_folds(std::span<const int> y, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw UsageError("stratified_folds: k must be at least 2");
  if (k > y.size()) {
    throw UsageError("stratified_folds: k=" + std::to_string(k) + " exceeds n=" +
                     std::to_string(y.size()));
  }
  int max_class = -1;
  for (int c : y) {
    if (c < 0) throw UsageError("stratified_folds: negative class index");
    max_class = std::max(max_class, c);
  }
  std::vector<std::vector<std::size_t>> by_class(static_cast<std::size_t>(max_class + 1));
  for (std::size_t i = 0; i < y.size(); ++i) by_class[static_cast<std::size_t>(y[i])].push_back(i);

  FoldPlan plan;
  plan.seed = seed;
  plan.k = k;
  plan.folds.resize(k);
  SplitMix64 rng(seed);
  std::size_t next_fold = 0;
  for (auto& members : by_class) {
    rng.shuffle(std::span<std::size_t>(members));
    for (auto idx : members) {
      plan.folds[next_fold].push_back(idx);
      next_fold = (next_fold + 1) % k;
    }
  }
  for (auto& fold : plan.folds) std::sort(fold.begin(), fold.end());
  return plan;
}

}  // namespace mdlgbc
