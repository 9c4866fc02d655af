#include "qppkit/sweep.hpp"

#include <cmath>

#include "qppkit/errors.hpp"

namespace qppkit {
namespace {

// Correlates one prediction pass against the actual values; per-query judge
// failures become the row error so one bad depth cannot abort a whole sweep.
template <typename Row>
void fill_row(Row& row, const PredictResult& outcome,
              const std::map<std::string, double>& actual) {
  try {
    if (!outcome.errors.empty()) {
      throw DataError(std::to_string(outcome.errors.size()) +
                      " queries failed judging (first: query " +
                      outcome.errors.front().query_id + ": " +
                      outcome.errors.front().message + ")");
    }
    row.report = correlate(align(outcome.predictions, actual).series);
  } catch (const std::exception& e) {
    row.error = e.what();
  }
}

} // namespace

std::vector<SweepRow> depth_sweep(const RunMap& run, Judge& judge, JudgmentStore& store,
                                  MetricKind kind, int k, const std::vector<int>& depths,
                                  const std::map<std::string, double>& actual,
                                  const JudgingContext& context, JudgeStats* stats) {
  if (depths.empty()) throw ConfigError("depth sweep needs at least one depth");
  if (k < 1) throw ConfigError("cutoff k must be positive");
  int previous = 0;
  for (int depth : depths) {
    if (depth < k) {
      throw ConfigError("sweep depth " + std::to_string(depth) +
                        " is below the cutoff " + std::to_string(k));
    }
    if (depth < previous) throw ConfigError("sweep depths must be non-decreasing");
    previous = depth;
  }

  std::vector<SweepRow> rows;
  rows.reserve(depths.size());
  for (int depth : depths) {
    MetricSpec spec{kind, k, depth};
    SweepRow row;
    row.depth = depth;
    fill_row(row, predict_run(run, judge, store, spec, context, stats), actual);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<ThresholdRow> threshold_scan(const RunMap& run, const ScoreTable& scores,
                                         const ThresholdScanConfig& config,
                                         const std::map<std::string, double>& actual,
                                         JudgmentStore& store, JudgeStats* stats) {
  if (!(config.step > 0.0)) throw ConfigError("threshold step must be positive");
  if (!std::isfinite(config.theta_min) || !std::isfinite(config.theta_max)) {
    throw ConfigError("threshold range must be finite");
  }
  if (config.theta_max < config.theta_min) {
    throw ConfigError("threshold range is empty (max below min)");
  }
  config.spec.validate();

  std::vector<ThresholdRow> rows;
  const double span = config.theta_max - config.theta_min;
  const int steps = static_cast<int>(std::floor(span / config.step + 1e-9));
  for (int i = 0; i <= steps; ++i) {
    const double theta = config.theta_min + i * config.step;
    ThresholdJudge judge(scores, theta);
    ThresholdRow row;
    row.theta = theta;
    fill_row(row, predict_run(run, judge, store, config.spec, {}, stats), actual);
    rows.push_back(std::move(row));
  }
  return rows;
}

TuneOutcome tune_baseline(const RunMap& run, const BaselineInputs& inputs,
                          const std::map<std::string, double>& actual,
                          const std::vector<BaselineSpec>& candidates) {
  if (candidates.empty()) throw ConfigError("no tuning candidates given");

  TuneOutcome outcome;
  bool have_best = false;
  for (const auto& candidate : candidates) {
    TuneCandidateResult entry;
    entry.spec = candidate;
    try {
      const auto predicted = predict_baseline(run, candidate, inputs);
      if (!predicted.errors.empty()) {
        throw DataError(std::to_string(predicted.errors.size()) +
                        " queries failed (first: query " +
                        predicted.errors.front().query_id + ": " +
                        predicted.errors.front().message + ")");
      }
      entry.pearson = pearson(align(predicted.predictions, actual).series);
    } catch (const std::exception& e) {
      entry.error = e.what();
    }

    if (entry.pearson) {
      const bool better =
          !have_best || *entry.pearson > outcome.pearson ||
          (*entry.pearson == outcome.pearson &&
           (candidate.k < outcome.best.k ||
            (candidate.k == outcome.best.k && candidate.x < outcome.best.x)));
      if (better) {
        outcome.best = candidate;
        outcome.pearson = *entry.pearson;
        have_best = true;
      }
    }
    outcome.candidates.push_back(std::move(entry));
  }
  if (!have_best) {
    throw StatError("every tuning candidate produced an undefined correlation");
  }
  return outcome;
}

} // namespace qppkit
