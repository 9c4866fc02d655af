#include "qppkit/judge.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

#include "qppkit/errors.hpp"

namespace qppkit {

OracleJudge::OracleJudge(const Qrels& qrels, int min_grade) : qrels_(qrels), min_grade_(min_grade) {}

std::string OracleJudge::source() const { return "oracle:min_grade=" + std::to_string(min_grade_); }

JudgmentRecord OracleJudge::judge(const JudgeRequest& request) {
  auto grade = qrels_.grade(request.query_id, request.doc_id);
  JudgmentRecord record;
  record.query_id = request.query_id;
  record.doc_id = request.doc_id;
  record.label = (grade && *grade >= min_grade_) ? 1 : 0;
  record.source = source();
  return record;
}

ThresholdJudge::ThresholdJudge(const ScoreTable& scores, double theta) : scores_(scores), theta_(theta) {}

std::string ThresholdJudge::source() const { return "threshold:theta=" + format_double(theta_); }

JudgmentRecord ThresholdJudge::judge(const JudgeRequest& request) {
  auto it = scores_.find(PairKey{request.query_id, request.doc_id});
  if (it == scores_.end())
    throw DataError("no score for (" + request.query_id + ", " + request.doc_id +
                    "); a threshold judge cannot abstain");
  JudgmentRecord record;
  record.query_id = request.query_id;
  record.doc_id = request.doc_id;
  record.label = it->second >= theta_ ? 1 : 0;
  record.source = source();
  return record;
}

namespace {

struct Miss {
  std::size_t position = 0; // 0-based rank index
  JudgeRequest request;
  Query query;       // owned copies so pointers stay valid across threads
  Document document;
  JudgmentRecord record;
  std::exception_ptr error;
};

[[noreturn]] void rethrow_annotated(const Miss& miss, const std::string& query_id) {
  try {
    std::rethrow_exception(miss.error);
  } catch (const std::exception& e) {
    throw JudgeError("query " + query_id + " doc " + miss.request.doc_id + " at rank " +
                     std::to_string(miss.position + 1) + ": " + e.what());
  }
}

} // namespace

JudgmentVector judge_list(const RankedList& ranked, int depth, Judge& judge, JudgmentStore& store,
                          const JudgingContext& context, JudgeStats* stats) {
  if (depth < 1) throw ConfigError("judging depth must be >= 1, got " + std::to_string(depth));
  const std::size_t count = std::min<std::size_t>(depth, ranked.entries.size());
  const std::string source = judge.source();

  JudgmentVector vec;
  vec.query_id = ranked.query_id;
  vec.depth = depth;
  vec.labels.assign(count, 0);

  std::vector<Miss> misses;
  for (std::size_t i = 0; i < count; ++i) {
    const auto& entry = ranked.entries[i];
    if (const JudgmentRecord* hit = store.find(ranked.query_id, entry.doc_id, source)) {
      vec.labels[i] = hit->label;
      if (stats) {
        ++stats->cache_hits;
        if (hit->fallback) ++stats->fallbacks;
      }
      continue;
    }
    Miss miss;
    miss.position = i;
    miss.request.query_id = ranked.query_id;
    miss.request.doc_id = entry.doc_id;
    misses.push_back(std::move(miss));
  }

  if (!misses.empty() && judge.needs_text()) {
    if (!context.queries || !context.corpus)
      throw ConfigError("judge needs query and document text; configure queries and corpus");
    const std::string* query_text = context.queries->find(ranked.query_id);
    if (!query_text) throw DataError("query text not found for query " + ranked.query_id);
    for (Miss& miss : misses) {
      const std::string* doc_text = context.corpus->find(miss.request.doc_id);
      if (!doc_text)
        throw DataError("query " + ranked.query_id + " doc " + miss.request.doc_id + " at rank " +
                        std::to_string(miss.position + 1) + ": document text not found");
      miss.query = Query{ranked.query_id, *query_text};
      miss.document = Document{miss.request.doc_id, *doc_text};
      miss.request.query = &miss.query;
      miss.request.document = &miss.document;
    }
  }

  const int workers = std::max(1, std::min<int>(context.max_in_flight, static_cast<int>(misses.size())));
  if (workers <= 1) {
    for (Miss& miss : misses) {
      try {
        miss.record = judge.judge(miss.request);
      } catch (...) {
        miss.error = std::current_exception();
        rethrow_annotated(miss, ranked.query_id);
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < misses.size(); i = next.fetch_add(1)) {
          try {
            misses[i].record = judge.judge(misses[i].request);
          } catch (...) {
            misses[i].error = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    for (const Miss& miss : misses)
      if (miss.error) rethrow_annotated(miss, ranked.query_id);
  }

  // Append in ranked-list order so the store file is deterministic.
  for (Miss& miss : misses) {
    store.append(miss.record);
    vec.labels[miss.position] = miss.record.label;
    if (stats) {
      ++stats->invocations;
      if (miss.record.fallback) ++stats->fallbacks;
    }
  }
  return vec;
}

} // namespace qppkit
