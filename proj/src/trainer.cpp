#include "mdlgbc/trainer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <exception>
#include <mutex>
#include <numeric>
#include <string>
#include <thread>

#include "mdlgbc/coding.hpp"
#include "mdlgbc/errors.hpp"

namespace mdlgbc {
namespace {

constexpr double kEtaScale = 1e-3;
constexpr std::size_t kRadiusPercentile = 5;

// Runs job(i) for i in [0, count) on up to `threads` workers. The first
// exception thrown by any job is rethrown on the caller.
template <typename Job>
void run_indexed(std::size_t count, unsigned threads, Job&& job) {
  const auto workers = std::min<std::size_t>(std::max(1u, threads), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  if (error) std::rethrow_exception(error);
}

}  // namespace

std::size_t TrainedModel::ball_count() const noexcept {
  std::size_t total = 0;
  for (const auto& c : classes) total += c.balls.size();
  return total;
}

ClassTraining train_class(const ClassContext& ctx, const CodingConstants& constants,
                          std::vector<TraceRecord>* trace) {
  const std::size_t n_c = ctx.positives.rows();
  if (n_c == 0) {
    throw DataError("class " + std::to_string(ctx.class_id) + " has no training samples");
  }
  std::vector<std::size_t> all(n_c);
  std::iota(all.begin(), all.end(), std::size_t{0});

  ClassTraining out;
  std::deque<GranularBall> queue;
  queue.push_back(build_ball(all, ctx.positives, ctx.class_id));

  while (!queue.empty()) {
    GranularBall ball = std::move(queue.front());
    queue.pop_front();
    annotate_boundary(ball, ctx, constants);

    TraceRecord record;
    record.class_id = ctx.class_id;
    record.n = ball.size();

    if (ball.size() < 2 * ctx.n_min) {
      record.below_split_size = true;
      record.single_length = ball_total(ball, ctx, constants).total;
      if (trace) trace->push_back(record);
      out.stable.push_back(std::move(ball));
      continue;
    }

    auto decision = compete(ball, ctx, constants);
    ++out.compete_evaluations;
    record.single_length = decision.single_length;
    record.two_ball_length = decision.two_ball_length;
    record.core_boundary_length = decision.core_boundary_length;
    record.model = decision.model;

    if (decision.model == LocalModel::single) {
      if (trace) trace->push_back(record);
      out.stable.push_back(std::move(ball));
      continue;
    }
    if (!(decision.chosen_length() < decision.single_length - constants.eps_mdl)) {
      throw InvariantError("accepted split does not shorten the description length");
    }
    const auto& split = *decision.split;
    if (split.first.size() < ctx.n_min || split.second.size() < ctx.n_min ||
        split.first.size() + split.second.size() != ball.size()) {
      throw InvariantError("inadmissible decomposition returned by the model search");
    }
    record.first_size = split.first.size();
    record.second_size = split.second.size();
    if (trace) trace->push_back(record);
    queue.push_back(build_ball(split.first, ctx.positives, ctx.class_id));
    queue.push_back(build_ball(split.second, ctx.positives, ctx.class_id));
  }

  std::size_t covered = 0;
  for (const auto& b : out.stable) covered += b.size();
  if (covered != n_c) throw InvariantError("stable balls do not cover the class");
  return out;
}

PredictionFloors estimate_floors(std::span<const double> stable_radii, const Matrix& x,
                                 const CodingConstants& constants) {
  PredictionFloors floors;
  std::vector<double> positive;
  for (double r : stable_radii) {
    if (r > 0.0) positive.push_back(r);
  }
  if (positive.empty()) {
    floors.r0 = constants.eps_r;
  } else {
    std::sort(positive.begin(), positive.end());
    const std::size_t rank =
        std::max<std::size_t>(1, (kRadiusPercentile * positive.size() + 99) / 100);
    floors.r0 = positive[rank - 1];
  }

  const std::size_t d = x.cols();
  floors.eta.assign(d, constants.eps_v);
  if (x.rows() == 0) return floors;
  const double inv_n = 1.0 / static_cast<double>(x.rows());
  for (std::size_t j = 0; j < d; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) mean += x(i, j);
    mean *= inv_n;
    double var = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) var += (x(i, j) - mean) * (x(i, j) - mean);
    var *= inv_n;
    floors.eta[j] = std::max(kEtaScale * var, constants.eps_v);
  }
  return floors;
}

FitResult fit(const LabeledDataset& data, const NormalizationParams& normalization,
              const CodingConstants& constants, std::uint64_t seed, unsigned threads) {
  if (!constants.valid()) throw UsageError("coding constants must be strictly positive");
  if (data.n() == 0) throw DataError("cannot train on an empty dataset");
  if (data.d() != normalization.dimension()) {
    throw DataError("dataset dimension does not match normalization parameters");
  }
  const std::size_t num_classes = data.num_classes();
  std::vector<std::vector<std::size_t>> rows_of(num_classes);
  for (std::size_t i = 0; i < data.n(); ++i) {
    const int c = data.y[i];
    if (c < 0 || static_cast<std::size_t>(c) >= num_classes) {
      throw DataError("label index " + std::to_string(c) + " out of range");
    }
    rows_of[static_cast<std::size_t>(c)].push_back(i);
  }
  for (std::size_t c = 0; c < num_classes; ++c) {
    if (rows_of[c].empty()) {
      throw DataError("class '" + data.label_names[c] + "' has no training samples");
    }
  }

  std::vector<ClassTraining> trained(num_classes);
  std::vector<std::vector<TraceRecord>> traces(num_classes);
  run_indexed(num_classes, threads, [&](std::size_t c) {
    const auto rule = granularity(rows_of[c].size(), data.d());
    const auto ctx = make_class_context(data.x, data.y, num_classes, static_cast<int>(c), rule.n_min);
    trained[c] = train_class(ctx, constants, &traces[c]);
  });

  FitResult result;
  auto& model = result.model;
  model.seed = seed;
  model.normalization = normalization;
  model.constants = constants;
  model.classes.resize(num_classes);
  model.priors.resize(num_classes);
  result.members.resize(num_classes);
  std::vector<double> radii;
  for (std::size_t c = 0; c < num_classes; ++c) {
    const double n_c = static_cast<double>(rows_of[c].size());
    model.priors[c] = (n_c + 1.0) / (static_cast<double>(data.n()) + static_cast<double>(num_classes));
    auto& cls = model.classes[c];
    cls.label = data.label_names[c];
    for (const auto& ball : trained[c].stable) {
      StableBall sb;
      sb.center = ball.center;
      sb.variance = ball.variance;
      sb.radius = ball.radius;
      sb.n = ball.size();
      sb.avg_boundary_risk = ball.avg_boundary_risk;
      sb.center_neg_dist = ball.center_neg_dist;
      sb.weight = static_cast<double>(ball.size()) / n_c;
      cls.balls.push_back(std::move(sb));
      radii.push_back(ball.radius);

      std::vector<std::size_t> rows;
      rows.reserve(ball.size());
      for (auto m : ball.members) rows.push_back(rows_of[c][m]);
      std::sort(rows.begin(), rows.end());
      result.members[c].push_back(std::move(rows));
    }
    result.compete_evaluations.push_back(trained[c].compete_evaluations);
    result.trace.insert(result.trace.end(), traces[c].begin(), traces[c].end());
  }
  model.floors = estimate_floors(radii, data.x, constants);
  return result;
}

}  // namespace mdlgbc
