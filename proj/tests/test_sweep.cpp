#include <doctest.h>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "qppkit/errors.hpp"
#include "qppkit/sweep.hpp"

using namespace qppkit;

namespace {

RankedList make_list(const std::string& qid, int size, double top_score) {
  RankedList list;
  list.query_id = qid;
  for (int i = 0; i < size; ++i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "d%04d", i);
    list.entries.push_back({buf, top_score - i});
  }
  return list;
}

class CountingJudge final : public Judge {
public:
  std::string source() const override { return "file:counting"; }
  JudgmentRecord judge(const JudgeRequest& r) override {
    ++calls;
    const int label = r.doc_id.back() % 2 == 0 ? 1 : 0;
    return {r.query_id, r.doc_id, label, source(), std::nullopt, false};
  }
  std::atomic<int> calls{0};
};

class ZeroJudge final : public Judge {
public:
  std::string source() const override { return "file:zero"; }
  JudgmentRecord judge(const JudgeRequest& r) override {
    return {r.query_id, r.doc_id, 0, source(), std::nullopt, false};
  }
};

} // namespace

TEST_CASE("depth sweeps validate their depth grid") {
  Qrels qrels;
  OracleJudge judge(qrels, 2);
  JudgmentStore store;
  RunMap run;
  run["q1"] = make_list("q1", 20, 100);
  const std::map<std::string, double> actual{{"q1", 0.5}};

  CHECK_THROWS_AS(depth_sweep(run, judge, store, MetricKind::ndcg, 10, {}, actual), ConfigError);
  CHECK_THROWS_AS(depth_sweep(run, judge, store, MetricKind::ndcg, 10, {5}, actual), ConfigError);
  CHECK_THROWS_AS(depth_sweep(run, judge, store, MetricKind::ndcg, 10, {20, 10}, actual),
                  ConfigError);
  CHECK_THROWS_AS(depth_sweep(run, judge, store, MetricKind::ndcg, 0, {10}, actual), ConfigError);
}

TEST_CASE("an oracle judge makes every sweep row perfectly correlated") {
  // Distinct relevant-prefix lengths give distinct metric values per query.
  constexpr int kQueries = 8;
  Qrels qrels;
  RunMap run;
  std::map<std::string, double> actual;
  for (int q = 0; q < kQueries; ++q) {
    const std::string qid = "q" + std::to_string(q);
    run[qid] = make_list(qid, 60, 100);
    for (int d = 0; d <= q; ++d) {
      char buf[16];
      std::snprintf(buf, sizeof(buf), "d%04d", d);
      qrels.add(qid, buf, 2);
    }
  }
  OracleJudge judge(qrels, 2);

  // Actual values: precision@10 of the same labels, computed by hand (the
  // relevant prefix has length q+1).
  for (int q = 0; q < kQueries; ++q) actual["q" + std::to_string(q)] = (q + 1) / 10.0;

  JudgmentStore store;
  const auto rows = depth_sweep(run, judge, store, MetricKind::precision, 10, {10, 20, 60}, actual);
  REQUIRE(rows.size() == 3);
  for (const auto& row : rows) {
    CAPTURE(row.depth);
    REQUIRE_MESSAGE(row.report.has_value(), row.error);
    CHECK(row.report->pearson == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(row.report->kendall_tau_b == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(row.report->spearman == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(row.report->smare == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(row.report->n_queries == kQueries);
  }
}

TEST_CASE("repeated depths reuse the cache and produce identical rows") {
  Qrels qrels;
  RunMap run;
  std::map<std::string, double> actual;
  for (int q = 0; q < 6; ++q) {
    const std::string qid = "q" + std::to_string(q);
    run[qid] = make_list(qid, 30, 100 + q);
    for (int d = 0; d <= q; ++d) {
      char buf[16];
      std::snprintf(buf, sizeof(buf), "d%04d", d);
      qrels.add(qid, buf, 2);
    }
    actual[qid] = 0.1 * q + 0.05;
  }
  OracleJudge judge(qrels, 2);
  JudgmentStore store;
  JudgeStats stats;
  const auto rows = depth_sweep(run, judge, store, MetricKind::precision, 10, {10, 10}, actual,
                                {}, &stats);
  REQUIRE(rows.size() == 2);
  CHECK(stats.invocations == 60);  // judged once
  CHECK(stats.cache_hits == 60);   // reread once
  REQUIRE(rows[0].report.has_value());
  REQUIRE(rows[1].report.has_value());
  CHECK(rows[0].report->pearson == rows[1].report->pearson);
  CHECK(rows[0].report->smare == rows[1].report->smare);
}

TEST_CASE("a sweep over growing depths pays only for the new tail") {
  CountingJudge judge;
  JudgmentStore store;
  RunMap run;
  std::map<std::string, double> actual;
  for (int q = 0; q < 10; ++q) {
    const std::string qid = "q" + std::to_string(q);
    run[qid] = make_list(qid, 120, 100 + 7 * q);
    actual[qid] = 0.01 * q;
  }
  depth_sweep(run, judge, store, MetricKind::ndcg, 10, {10, 50, 100}, actual);
  // 10 queries x 100 docs: the union of all depths, each judged exactly once.
  CHECK(judge.calls == 1000);
}

TEST_CASE("a degenerate row carries an error and the sweep continues") {
  ZeroJudge judge;
  JudgmentStore store;
  RunMap run;
  std::map<std::string, double> actual;
  for (int q = 0; q < 4; ++q) {
    const std::string qid = "q" + std::to_string(q);
    run[qid] = make_list(qid, 20, 50);
    actual[qid] = 0.2 * q;
  }
  const auto rows = depth_sweep(run, judge, store, MetricKind::ndcg, 10, {10, 20}, actual);
  REQUIRE(rows.size() == 2);
  for (const auto& row : rows) {
    CHECK_FALSE(row.report.has_value());
    CHECK(row.error.find("constant") != std::string::npos);
  }
}

TEST_CASE("threshold scans cover the closed range in fixed steps") {
  RunMap run;
  std::map<std::string, double> actual;
  ScoreTable scores;
  for (int q = 0; q < 6; ++q) {
    const std::string qid = "q" + std::to_string(q);
    run[qid] = make_list(qid, 10, 5 + q);
    for (const auto& entry : run[qid].entries) scores[{qid, entry.doc_id}] = entry.score;
    actual[qid] = 0.1 * (q + 1);
  }
  ThresholdScanConfig config;
  config.theta_min = 0.0;
  config.theta_max = 2.0;
  config.step = 0.5;
  config.spec = MetricSpec{MetricKind::precision, 5, 5};

  JudgmentStore store;
  const auto rows = threshold_scan(run, scores, config, actual, store);
  REQUIRE(rows.size() == 5);
  CHECK(rows.front().theta == 0.0);
  CHECK(rows.back().theta == 2.0);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].theta - rows[i - 1].theta == doctest::Approx(0.5).epsilon(1e-12));
  }
}

TEST_CASE("each threshold judges under its own cache identity") {
  RunMap run;
  ScoreTable scores;
  std::map<std::string, double> actual;
  for (int q = 0; q < 4; ++q) {
    const std::string qid = "q" + std::to_string(q);
    run[qid] = make_list(qid, 8, 4 + q);
    for (const auto& entry : run[qid].entries) scores[{qid, entry.doc_id}] = entry.score;
    actual[qid] = 0.25 * q + 0.1;
  }
  ThresholdScanConfig config;
  config.theta_min = 1.0;
  config.theta_max = 2.0;
  config.step = 1.0;
  config.spec = MetricSpec{MetricKind::precision, 8, 8};

  JudgmentStore store;
  JudgeStats stats;
  threshold_scan(run, scores, config, actual, store, &stats);
  // Two thresholds, no sharing between them: 2 x 4 queries x 8 docs.
  CHECK(stats.invocations == 64);
  CHECK(stats.cache_hits == 0);
  CHECK(store.find("q0", "d0000", "threshold:theta=1") != nullptr);
  CHECK(store.find("q0", "d0000", "threshold:theta=2") != nullptr);
}

TEST_CASE("threshold scans validate their configuration") {
  RunMap run;
  run["q1"] = make_list("q1", 5, 10);
  ScoreTable scores;
  const std::map<std::string, double> actual{{"q1", 0.5}};
  JudgmentStore store;

  ThresholdScanConfig config;
  config.spec = MetricSpec{MetricKind::precision, 5, 5};
  config.step = 0.0;
  CHECK_THROWS_AS(threshold_scan(run, scores, config, actual, store), ConfigError);
  config.step = -1.0;
  CHECK_THROWS_AS(threshold_scan(run, scores, config, actual, store), ConfigError);
  config.step = 0.5;
  config.theta_min = 2.0;
  config.theta_max = 1.0;
  CHECK_THROWS_AS(threshold_scan(run, scores, config, actual, store), ConfigError);
  config.theta_min = std::nan("");
  config.theta_max = 3.0;
  CHECK_THROWS_AS(threshold_scan(run, scores, config, actual, store), ConfigError);
}

TEST_CASE("a single-point threshold range scans exactly once") {
  RunMap run;
  std::map<std::string, double> actual;
  ScoreTable scores;
  for (int q = 0; q < 3; ++q) {
    const std::string qid = "q" + std::to_string(q);
    run[qid] = make_list(qid, 6, 3 + q);
    for (const auto& entry : run[qid].entries) scores[{qid, entry.doc_id}] = entry.score;
    actual[qid] = 0.3 * q + 0.1;
  }
  ThresholdScanConfig config;
  config.theta_min = 1.0;
  config.theta_max = 1.0;
  config.step = 0.5;
  config.spec = MetricSpec{MetricKind::precision, 6, 6};
  JudgmentStore store;
  const auto rows = threshold_scan(run, scores, config, actual, store);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].theta == 1.0);
}

TEST_CASE("extreme thresholds surface their degenerate rows without aborting") {
  RunMap run;
  std::map<std::string, double> actual;
  ScoreTable scores;
  for (int q = 0; q < 4; ++q) {
    const std::string qid = "q" + std::to_string(q);
    run[qid] = make_list(qid, 6, 3 + q); // all scores well below 1000
    for (const auto& entry : run[qid].entries) scores[{qid, entry.doc_id}] = entry.score;
    actual[qid] = 0.2 * q + 0.1;
  }
  ThresholdScanConfig config;
  config.theta_min = 1000.0; // labels everything 0 -> constant predictions
  config.theta_max = 1000.0;
  config.step = 1.0;
  config.spec = MetricSpec{MetricKind::precision, 6, 6};
  JudgmentStore store;
  const auto rows = threshold_scan(run, scores, config, actual, store);
  REQUIRE(rows.size() == 1);
  CHECK_FALSE(rows[0].report.has_value());
  CHECK(rows[0].error.find("constant") != std::string::npos);
}

TEST_CASE("tuning picks the candidate with the best correlation") {
  // Top-2 spread grows with the actual value; the full-list spread shrinks.
  // nqc@2 then ranks the queries correctly and nqc@5 ranks them backwards.
  RunMap run;
  run["q0"] = {"q0", {{"dA", 10}, {"dB", 9}, {"dC", 1}, {"dD", 1}, {"dE", 1}}, ""};
  run["q1"] = {"q1", {{"dA", 12}, {"dB", 9}, {"dC", 5}, {"dD", 5}, {"dE", 5}}, ""};
  run["q2"] = {"q2", {{"dA", 15}, {"dB", 10}, {"dC", 9}, {"dD", 9}, {"dE", 9}}, ""};
  std::map<std::string, double> actual{{"q0", 0.1}, {"q1", 0.5}, {"q2", 0.9}};

  std::map<std::string, double> corpus{{"q0", 1.0}, {"q1", 1.0}, {"q2", 1.0}};
  BaselineInputs inputs;
  inputs.corpus_scores = &corpus;

  BaselineSpec good;
  good.method = BaselineMethod::nqc;
  good.k = 2;
  good.corpus_score_mode = CorpusScoreMode::provided;
  BaselineSpec alt = good;
  alt.k = 5;

  const auto outcome = tune_baseline(run, inputs, actual, {alt, good});
  CHECK(outcome.best.k == 2);
  CHECK(outcome.pearson == doctest::Approx(1.0).epsilon(1e-12));
  REQUIRE(outcome.candidates.size() == 2);
  REQUIRE(outcome.candidates[0].pearson.has_value());
  CHECK(*outcome.candidates[0].pearson < 0.0); // the k=5 ranking is reversed
}

TEST_CASE("exact ties go to the smaller k and then the smaller x") {
  // Two-item lists with a tight spread: every candidate sees the same scores
  // (k truncates to the list, every x keeps the whole head), so the pearson
  // values tie bit for bit and only the tie-break decides.
  RunMap run;
  std::map<std::string, double> actual;
  for (int q = 0; q < 5; ++q) {
    const std::string qid = "q" + std::to_string(q);
    run[qid] = RankedList{qid, {{"dA", 10.0 + 0.1 * (q + 1)}, {"dB", 10.0}}, ""};
    actual[qid] = 0.1 * (q + 1);
  }
  std::map<std::string, double> corpus;
  for (int q = 0; q < 5; ++q) corpus["q" + std::to_string(q)] = 1.0;
  BaselineInputs inputs;
  inputs.corpus_scores = &corpus;

  std::vector<BaselineSpec> grid;
  for (int k : {10, 5, 2}) {
    BaselineSpec spec;
    spec.method = BaselineMethod::nqc;
    spec.k = k;
    spec.corpus_score_mode = CorpusScoreMode::provided;
    grid.push_back(spec);
  }
  const auto outcome = tune_baseline(run, inputs, actual, grid);
  REQUIRE(outcome.candidates.size() == 3);
  CHECK(*outcome.candidates[0].pearson == *outcome.candidates[2].pearson);
  CHECK(outcome.best.k == 2);

  std::vector<BaselineSpec> x_grid;
  for (double x : {0.9, 0.5, 0.25}) {
    BaselineSpec spec;
    spec.method = BaselineMethod::n_sigma_x;
    spec.x = x;
    x_grid.push_back(spec);
  }
  const auto x_outcome = tune_baseline(run, inputs, actual, x_grid);
  CHECK(x_outcome.best.x == 0.25);
}

TEST_CASE("failed candidates are recorded and skipped") {
  RunMap run;
  run["q0"] = make_list("q0", 4, 10);
  run["q1"] = make_list("q1", 4, 20);
  std::map<std::string, double> actual{{"q0", 0.1}, {"q1", 0.9}};

  BaselineSpec broken; // nqc with mean-of-list corpus on a constant list is fine;
  broken.method = BaselineMethod::smv;
  broken.k = 4;
  BaselineSpec working;
  working.method = BaselineMethod::sigma_max;

  RunMap bad_run = run;
  bad_run["q2"] = RankedList{"q2", {{"dA", -1.0}, {"dB", -2.0}}, ""};
  actual["q2"] = 0.5;

  const auto outcome = tune_baseline(bad_run, {}, actual, {broken, working});
  CHECK(outcome.best.method == BaselineMethod::sigma_max);
  REQUIRE(outcome.candidates.size() == 2);
  CHECK_FALSE(outcome.candidates[0].pearson.has_value());
  CHECK(outcome.candidates[0].error.find("queries failed") != std::string::npos);
  CHECK(outcome.candidates[1].pearson.has_value());
}

TEST_CASE("tuning with no usable candidate is an error") {
  RunMap run;
  run["q0"] = make_list("q0", 4, 10);
  run["q1"] = make_list("q1", 4, 10);
  std::map<std::string, double> actual{{"q0", 0.1}, {"q1", 0.9}};

  // Identical lists make every deviation predictor constant across queries.
  BaselineSpec spec;
  spec.method = BaselineMethod::sigma_max;
  CHECK_THROWS_AS(tune_baseline(run, {}, actual, {spec}), StatError);
  CHECK_THROWS_AS(tune_baseline(run, {}, actual, {}), ConfigError);
}

TEST_CASE("tuning is deterministic across repeat calls") {
  RunMap run;
  std::map<std::string, double> actual;
  for (int q = 0; q < 6; ++q) {
    const std::string qid = "q" + std::to_string(q);
    RankedList list;
    list.query_id = qid;
    const double spread = 1.0 + 0.3 * q;
    for (int d = 0; d < 12; ++d) {
      char buf[16];
      std::snprintf(buf, sizeof(buf), "d%04d", d);
      list.entries.push_back({buf, 10.0 + spread * (11 - d)});
    }
    run[qid] = list;
    actual[qid] = 0.15 * q;
  }
  std::vector<BaselineSpec> grid;
  for (int k : {2, 5, 10}) {
    BaselineSpec spec;
    spec.method = BaselineMethod::sigma_max;
    spec.k = k;
    grid.push_back(spec);
  }
  const auto first = tune_baseline(run, {}, actual, grid);
  const auto second = tune_baseline(run, {}, actual, grid);
  CHECK(first.best.k == second.best.k);
  CHECK(first.pearson == second.pearson);
}
