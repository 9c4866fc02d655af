#include <doctest.h>

#include <atomic>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "qppkit/errors.hpp"
#include "qppkit/judge.hpp"

using namespace qppkit;

namespace {

RankedList make_list(const std::string& qid, int size, double top_score = 100.0) {
  RankedList list;
  list.query_id = qid;
  for (int i = 0; i < size; ++i) {
    // Zero-padded ids keep the (score desc, doc_id desc) order aligned with i.
    char buf[16];
    std::snprintf(buf, sizeof(buf), "d%04d", i);
    list.entries.push_back({buf, top_score - i});
  }
  return list;
}

/// Labels rank parity and counts every invocation.
class CountingJudge final : public Judge {
public:
  std::string source() const override { return "file:counting"; }

  JudgmentRecord judge(const JudgeRequest& request) override {
    calls.fetch_add(1);
    JudgmentRecord record;
    record.query_id = request.query_id;
    record.doc_id = request.doc_id;
    record.label = request.doc_id.back() % 2 == 0 ? 1 : 0;
    record.source = source();
    return record;
  }

  std::atomic<int> calls{0};
};

class ThrowingJudge final : public Judge {
public:
  explicit ThrowingJudge(std::string bad_doc) : bad_doc_(std::move(bad_doc)) {}

  std::string source() const override { return "file:throwing"; }

  JudgmentRecord judge(const JudgeRequest& request) override {
    if (request.doc_id == bad_doc_) throw std::runtime_error("backend unavailable");
    return {request.query_id, request.doc_id, 1, source(), std::nullopt, false};
  }

private:
  std::string bad_doc_;
};

class TextEchoJudge final : public Judge {
public:
  std::string source() const override { return "file:text-echo"; }
  bool needs_text() const override { return true; }

  JudgmentRecord judge(const JudgeRequest& request) override {
    if (!request.query || !request.document) throw std::logic_error("text not resolved");
    const int label = request.document->text.find(request.query->text) != std::string::npos ? 1 : 0;
    return {request.query_id, request.doc_id, label, source(), request.document->text, false};
  }
};

} // namespace

TEST_CASE("oracle judges binarize grades at min_grade") {
  Qrels qrels;
  qrels.add("q1", "d1", 3);
  qrels.add("q1", "d2", 1);
  qrels.add("q1", "d3", 2);
  OracleJudge judge(qrels, 2);
  CHECK(judge.source() == "oracle:min_grade=2");

  CHECK(judge.judge({"q1", "d1"}).label == 1);
  CHECK(judge.judge({"q1", "d2"}).label == 0);
  CHECK(judge.judge({"q1", "d3"}).label == 1);
  // Unjudged pairs default to 0 rather than erroring.
  CHECK(judge.judge({"q1", "dX"}).label == 0);

  OracleJudge lenient(qrels, 1);
  CHECK(lenient.source() == "oracle:min_grade=1");
  CHECK(lenient.judge({"q1", "d2"}).label == 1);
}

TEST_CASE("threshold judges compare scores to theta and cannot abstain") {
  ScoreTable scores;
  scores[{"q1", "d1"}] = 2.0;
  scores[{"q1", "d2"}] = 1.5;
  scores[{"q1", "d3"}] = -0.5;
  ThresholdJudge judge(scores, 1.5);
  CHECK(judge.source() == "threshold:theta=1.5");

  CHECK(judge.judge({"q1", "d1"}).label == 1);
  CHECK(judge.judge({"q1", "d2"}).label == 1); // >= is inclusive
  CHECK(judge.judge({"q1", "d3"}).label == 0);

  try {
    judge.judge({"q1", "dX"});
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("cannot abstain") != std::string::npos);
  }
}

TEST_CASE("judge_list fills labels in ranked order and records stats") {
  Qrels qrels;
  qrels.add("q1", "d0000", 2);
  qrels.add("q1", "d0002", 3);
  OracleJudge judge(qrels, 2);
  JudgmentStore store;
  JudgeStats stats;

  const auto vec = judge_list(make_list("q1", 4), 4, judge, store, {}, &stats);
  CHECK(vec.query_id == "q1");
  CHECK(vec.depth == 4);
  CHECK(vec.labels == std::vector<int>{1, 0, 1, 0});
  CHECK(stats.invocations == 4);
  CHECK(stats.cache_hits == 0);
  CHECK(store.size() == 4);

  // Store holds records in ranked order.
  const auto records = store.records();
  CHECK(records[0].doc_id == "d0000");
  CHECK(records[3].doc_id == "d0003");
}

TEST_CASE("judging depth beyond the list judges what exists") {
  Qrels qrels;
  OracleJudge judge(qrels, 2);
  JudgmentStore store;
  const auto vec = judge_list(make_list("q1", 3), 10, judge, store);
  CHECK(vec.depth == 10);
  CHECK(vec.labels.size() == 3);
}

TEST_CASE("a second pass is answered entirely from the cache") {
  CountingJudge judge;
  JudgmentStore store;
  JudgeStats stats;
  const auto list = make_list("q1", 50);

  const auto first = judge_list(list, 50, judge, store, {}, &stats);
  CHECK(judge.calls == 50);
  CHECK(stats.invocations == 50);

  JudgeStats again;
  const auto second = judge_list(list, 50, judge, store, {}, &again);
  CHECK(judge.calls == 50);
  CHECK(again.cache_hits == 50);
  CHECK(again.invocations == 0);
  CHECK(second.labels == first.labels);
}

TEST_CASE("deepening a judged list only judges the new tail") {
  CountingJudge judge;
  JudgmentStore store;
  const auto list = make_list("q1", 60);

  judge_list(list, 10, judge, store);
  CHECK(judge.calls == 10);
  JudgeStats stats;
  judge_list(list, 50, judge, store, {}, &stats);
  CHECK(judge.calls == 50);
  CHECK(stats.cache_hits == 10);
  CHECK(stats.invocations == 40);
}

TEST_CASE("distinct judges never share cache entries") {
  ScoreTable scores;
  for (int i = 0; i < 5; ++i) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "d%04d", i);
    scores[{"q1", buf}] = 10.0 - i;
  }
  ThresholdJudge strict(scores, 9.5);
  ThresholdJudge lax(scores, 0.0);
  JudgmentStore store;
  const auto list = make_list("q1", 5);

  const auto a = judge_list(list, 5, strict, store);
  const auto b = judge_list(list, 5, lax, store);
  CHECK(a.labels == std::vector<int>{1, 0, 0, 0, 0});
  CHECK(b.labels == std::vector<int>{1, 1, 1, 1, 1});
  CHECK(store.size() == 10);
}

TEST_CASE("depth below one is a configuration error") {
  Qrels qrels;
  OracleJudge judge(qrels, 2);
  JudgmentStore store;
  CHECK_THROWS_AS(judge_list(make_list("q1", 3), 0, judge, store), ConfigError);
  CHECK_THROWS_AS(judge_list(make_list("q1", 3), -1, judge, store), ConfigError);
}

TEST_CASE("text judges require configured collections") {
  TextEchoJudge judge;
  JudgmentStore store;
  CHECK_THROWS_AS(judge_list(make_list("q1", 2), 2, judge, store, {}), ConfigError);

  CollectionStore queries;
  queries.insert("q1", "capital of france");
  CollectionStore corpus;
  corpus.insert("d0000", "the capital of france is paris");
  // d0001 text missing.
  JudgingContext context{&queries, &corpus, 4};
  try {
    judge_list(make_list("q1", 2), 2, judge, store, context);
    FAIL("expected DataError");
  } catch (const DataError& e) {
    const std::string what = e.what();
    CHECK(what.find("d0001") != std::string::npos);
    CHECK(what.find("rank 2") != std::string::npos);
  }
}

TEST_CASE("text judges see resolved query and document text") {
  TextEchoJudge judge;
  JudgmentStore store;
  CollectionStore queries;
  queries.insert("q1", "capital of france");
  CollectionStore corpus;
  corpus.insert("d0000", "the capital of france is paris");
  corpus.insert("d0001", "tourism statistics for berlin");
  JudgingContext context{&queries, &corpus, 4};

  const auto vec = judge_list(make_list("q1", 2), 2, judge, store, context);
  CHECK(vec.labels == std::vector<int>{1, 0});
  const auto* rec = store.find("q1", "d0001", "file:text-echo");
  REQUIRE(rec != nullptr);
  REQUIRE(rec->raw_output.has_value());
  CHECK(*rec->raw_output == "tourism statistics for berlin");

  CollectionStore empty_queries;
  JudgingContext missing_query{&empty_queries, &corpus, 4};
  JudgmentStore fresh;
  CHECK_THROWS_AS(judge_list(make_list("q1", 2), 2, judge, fresh, missing_query), DataError);
}

TEST_CASE("judge failures are annotated with query, document, and rank") {
  ThrowingJudge judge("d0041");
  JudgmentStore store;
  try {
    judge_list(make_list("q7", 100), 100, judge, store, {nullptr, nullptr, 8});
    FAIL("expected JudgeError");
  } catch (const JudgeError& e) {
    const std::string what = e.what();
    CHECK(what.find("query q7") != std::string::npos);
    CHECK(what.find("doc d0041") != std::string::npos);
    CHECK(what.find("rank 42") != std::string::npos);
    CHECK(what.find("backend unavailable") != std::string::npos);
  }
}

TEST_CASE("parallel judging matches the serial labels") {
  const auto list = make_list("q1", 120);
  CountingJudge serial_judge;
  JudgmentStore serial_store;
  const auto serial = judge_list(list, 120, serial_judge, serial_store, {nullptr, nullptr, 1});

  CountingJudge parallel_judge;
  JudgmentStore parallel_store;
  const auto parallel = judge_list(list, 120, parallel_judge, parallel_store, {nullptr, nullptr, 8});

  CHECK(parallel.labels == serial.labels);
  CHECK(parallel_judge.calls == 120);
  CHECK(parallel_store.size() == 120);
  // Ranked append order holds regardless of worker interleaving.
  const auto records = parallel_store.records();
  CHECK(records.front().doc_id == "d0000");
  CHECK(records.back().doc_id == "d0119");
}

TEST_CASE("cached fallback records are recounted as fallbacks") {
  JudgmentStore store;
  store.append({"q1", "d0000", 0, "file:counting", "???", true});
  CountingJudge judge;
  JudgeStats stats;
  judge_list(make_list("q1", 2), 2, judge, store, {}, &stats);
  CHECK(stats.cache_hits == 1);
  CHECK(stats.invocations == 1);
  CHECK(stats.fallbacks == 1);
}
