#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qppkit/agreement.hpp"
#include "qppkit/baselines.hpp"
#include "qppkit/errors.hpp"
#include "qppkit/judge.hpp"
#include "qppkit/judgments.hpp"
#include "qppkit/llm.hpp"
#include "qppkit/metrics.hpp"
#include "qppkit/reports.hpp"
#include "qppkit/stats.hpp"
#include "qppkit/sweep.hpp"
#include "qppkit/trec.hpp"

namespace {

using namespace qppkit;

// Reserved for anything that samples (e.g. demonstration selection); fixed
// so identical invocations stay bit-identical.
constexpr std::uint64_t kDefaultSeed = 7451;

struct JudgeOptions {
  std::string kind;
  std::string qrels_path;
  int min_grade = 2;
  std::string scores_path;
  std::optional<double> theta;
  std::string endpoint_url;
  std::string model;
  std::string api_style = "completions";
  double temperature = 0.0;
  int max_new_tokens = 8;
  int max_attempts = 3;
  long backoff_ms = 1000;
  double backoff_factor = 2.0;
  long timeout_ms = 30000;
};

void add_endpoint_options(CLI::App* cmd, JudgeOptions& opt) {
  cmd->add_option("--endpoint", opt.endpoint_url, "Completion endpoint URL (llm judge)");
  cmd->add_option("--model", opt.model, "Model name sent to the endpoint");
  cmd->add_option("--api-style", opt.api_style, "Request shape: completions or chat")
      ->check(CLI::IsMember({"completions", "chat"}))
      ->capture_default_str();
  cmd->add_option("--temperature", opt.temperature, "Sampling temperature")
      ->capture_default_str();
  cmd->add_option("--max-new-tokens", opt.max_new_tokens, "Completion token budget")
      ->capture_default_str();
  cmd->add_option("--max-attempts", opt.max_attempts, "Attempts per item before giving up")
      ->capture_default_str();
  cmd->add_option("--backoff-ms", opt.backoff_ms, "First retry delay")
      ->capture_default_str();
  cmd->add_option("--backoff-factor", opt.backoff_factor, "Retry delay growth factor")
      ->capture_default_str();
  cmd->add_option("--timeout-ms", opt.timeout_ms, "Per-request timeout")
      ->capture_default_str();
}

void add_judge_options(CLI::App* cmd, JudgeOptions& opt) {
  cmd->add_option("--judge", opt.kind, "Judge kind")
      ->required()
      ->check(CLI::IsMember({"oracle", "threshold", "llm"}));
  cmd->add_option("--qrels", opt.qrels_path, "Human qrels file (oracle judge)");
  cmd->add_option("--min-grade", opt.min_grade, "Lowest grade counted relevant")
      ->capture_default_str();
  cmd->add_option("--scores", opt.scores_path,
                  "Run-format re-ranker scores (threshold judge)");
  cmd->add_option("--theta", opt.theta, "Relevance score threshold");
  add_endpoint_options(cmd, opt);
}

LlmEndpoint make_endpoint(const JudgeOptions& opt) {
  LlmEndpoint endpoint;
  endpoint.url = opt.endpoint_url;
  endpoint.model = opt.model;
  endpoint.style = api_style_from(opt.api_style);
  endpoint.temperature = opt.temperature;
  endpoint.max_new_tokens = opt.max_new_tokens;
  if (const char* key = std::getenv("QPP_API_KEY")) endpoint.api_key = key;
  endpoint.max_attempts = opt.max_attempts;
  endpoint.backoff_base = std::chrono::milliseconds(opt.backoff_ms);
  endpoint.backoff_factor = opt.backoff_factor;
  endpoint.timeout = std::chrono::milliseconds(opt.timeout_ms);
  return endpoint;
}

// The judge borrows the qrels / score table, so both live behind stable
// pointers for the bundle's lifetime.
struct JudgeBundle {
  std::unique_ptr<Qrels> qrels;
  std::unique_ptr<ScoreTable> scores;
  std::unique_ptr<Judge> judge;
};

JudgeBundle make_judge(const JudgeOptions& opt) {
  JudgeBundle bundle;
  if (opt.kind == "oracle") {
    if (opt.qrels_path.empty()) throw ConfigError("oracle judge needs --qrels");
    bundle.qrels = std::make_unique<Qrels>(parse_qrels_file(opt.qrels_path));
    bundle.judge = std::make_unique<OracleJudge>(*bundle.qrels, opt.min_grade);
  } else if (opt.kind == "threshold") {
    if (opt.scores_path.empty()) throw ConfigError("threshold judge needs --scores");
    if (!opt.theta) throw ConfigError("threshold judge needs --theta");
    bundle.scores =
        std::make_unique<ScoreTable>(score_table_from_run(parse_run_file(opt.scores_path).lists));
    bundle.judge = std::make_unique<ThresholdJudge>(*bundle.scores, *opt.theta);
  } else if (opt.kind == "llm") {
    bundle.judge = std::make_unique<LlmJudge>(make_endpoint(opt));
  } else {
    throw ConfigError("unknown judge kind: " + opt.kind);
  }
  return bundle;
}

std::unique_ptr<CollectionStore> load_collection(const std::string& path) {
  return std::make_unique<CollectionStore>(
      parse_collection_file(path, collection_format_from_path(path)));
}

struct TextOptions {
  std::string queries_path;
  std::string corpus_path;
  int max_in_flight = 8;
};

void add_text_options(CLI::App* cmd, TextOptions& opt) {
  cmd->add_option("--queries", opt.queries_path, "Query texts, id<TAB>text or JSONL");
  cmd->add_option("--corpus", opt.corpus_path, "Passage texts, id<TAB>text or JSONL");
  cmd->add_option("--max-in-flight", opt.max_in_flight, "Concurrent judge calls per list")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

struct TextBundle {
  std::unique_ptr<CollectionStore> queries;
  std::unique_ptr<CollectionStore> corpus;
  JudgingContext context;
};

TextBundle make_context(const TextOptions& opt) {
  TextBundle bundle;
  if (!opt.queries_path.empty()) bundle.queries = load_collection(opt.queries_path);
  if (!opt.corpus_path.empty()) bundle.corpus = load_collection(opt.corpus_path);
  bundle.context.queries = bundle.queries.get();
  bundle.context.corpus = bundle.corpus.get();
  bundle.context.max_in_flight = opt.max_in_flight;
  return bundle;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  return out;
}

// Empty path means stdout.
void write_to(const std::string& path, const std::function<void(std::ostream&)>& fn) {
  if (path.empty()) {
    fn(std::cout);
    return;
  }
  auto out = open_out(path);
  fn(out);
}

std::unique_ptr<JudgmentStore> open_store(const std::string& path) {
  if (path.empty()) return std::make_unique<JudgmentStore>();
  return std::make_unique<JudgmentStore>(path);
}

void report_prediction_errors(const PredictResult& result) {
  for (const auto& error : result.errors) {
    std::cerr << "query " << error.query_id << ": " << error.message << "\n";
  }
}

void write_prediction_files(const std::string& out_dir, const std::string& name,
                            const PredictResult& result) {
  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);
  const std::string base = out_dir.empty() ? name : out_dir + "/" + name;
  {
    auto out = open_out(base + ".tsv");
    write_predictions_tsv(out, result.predictions);
  }
  {
    auto out = open_out(base + ".json");
    write_predictions_json(out, name, result);
  }
  std::cout << "wrote " << base << ".tsv and " << base << ".json ("
            << result.predictions.size() << " queries)\n";
}

void fail_on_prediction_errors(const PredictResult& result, std::size_t total_queries) {
  if (result.errors.empty()) return;
  throw JudgeError(std::to_string(result.errors.size()) + " of " +
                   std::to_string(total_queries) +
                   " queries failed; partial predictions were written");
}

std::vector<Demonstration> load_demonstrations(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::vector<Demonstration> demos;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      Demonstration demo;
      demo.query = j.at("query").get<std::string>();
      for (const auto& passage : j.at("passages")) {
        demo.passages.push_back(passage.get<std::string>());
      }
      demo.value = j.at("value").get<double>();
      demos.push_back(std::move(demo));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("bad demonstration: ") + e.what(), lineno);
    }
  }
  return demos;
}

// ---- judge ----------------------------------------------------------------

struct JudgeCmd {
  std::string run_path;
  int depth = 10;
  std::string store_path;
  JudgeOptions judge;
  TextOptions text;
};

void run_judge(const JudgeCmd& opt) {
  const RunFile run = parse_run_file(opt.run_path);
  for (const auto& warning : run.warnings) std::cerr << warning << "\n";
  auto bundle = make_judge(opt.judge);
  auto texts = make_context(opt.text);
  auto store = open_store(opt.store_path);

  JudgeStats stats;
  std::size_t failed = 0;
  for (const auto& [query_id, ranked] : run.lists) {
    try {
      judge_list(ranked, opt.depth, *bundle.judge, *store, texts.context, &stats);
    } catch (const std::exception& e) {
      ++failed;
      std::cerr << "query " << query_id << ": " << e.what() << "\n";
    }
  }
  std::cout << "queries: " << run.lists.size() << ", cache hits: " << stats.cache_hits
            << ", new judgments: " << stats.invocations << ", fallbacks: " << stats.fallbacks
            << ", failed queries: " << failed << "\n";
  if (failed > 0) {
    throw JudgeError(std::to_string(failed) + " queries could not be judged");
  }
}

// ---- predict ---------------------------------------------------------------

struct PredictCmd {
  std::string run_path;
  std::vector<std::string> metrics;
  std::optional<int> depth;
  std::string store_path;
  std::string out_dir;
  JudgeOptions judge;
  TextOptions text;
};

void run_predict(const PredictCmd& opt) {
  const RunFile run = parse_run_file(opt.run_path);
  for (const auto& warning : run.warnings) std::cerr << warning << "\n";

  std::vector<MetricSpec> specs;
  int max_k = 1;
  for (const auto& text : opt.metrics) {
    specs.push_back(MetricSpec::parse(text));
    max_k = std::max(max_k, specs.back().k);
  }
  const int depth = opt.depth.value_or(max_k);
  for (auto& spec : specs) {
    spec.n = depth;
    spec.validate();
  }

  auto bundle = make_judge(opt.judge);
  auto texts = make_context(opt.text);
  auto store = open_store(opt.store_path);

  JudgeStats stats;
  const auto results =
      predict_run_multi(run.lists, *bundle.judge, *store, specs, texts.context, &stats);
  std::cerr << "cache hits: " << stats.cache_hits << ", new judgments: " << stats.invocations
            << ", fallbacks: " << stats.fallbacks << "\n";

  for (std::size_t i = 0; i < specs.size(); ++i) {
    report_prediction_errors(results[i]);
    write_prediction_files(opt.out_dir, specs[i].name(), results[i]);
  }
  fail_on_prediction_errors(results.front(), run.lists.size());
}

// ---- baseline --------------------------------------------------------------

struct BaselineCmd {
  std::string run_path;
  std::string method;
  int k = 100;
  double x = 0.5;
  std::string sigma_normalizer = "count";
  std::string corpus_score_mode = "mean";
  std::string corpus_scores_path;
  std::string demos_path;
  std::string out_dir;
  JudgeOptions judge; // endpoint settings for qpp-llm
  TextOptions text;
};

PredictResult run_qpp_llm(const BaselineCmd& opt, const RunMap& run) {
  if (opt.text.queries_path.empty() || opt.text.corpus_path.empty()) {
    throw ConfigError("qpp-llm needs --queries and --corpus");
  }
  auto queries = load_collection(opt.text.queries_path);
  auto corpus = load_collection(opt.text.corpus_path);
  std::vector<Demonstration> demos;
  if (!opt.demos_path.empty()) demos = load_demonstrations(opt.demos_path);
  LlmClient client(make_endpoint(opt.judge));

  PredictResult result;
  for (const auto& [query_id, ranked] : run) {
    try {
      const std::string* qtext = queries->find(query_id);
      if (qtext == nullptr) throw DataError("no query text for query " + query_id);
      std::vector<std::string> passages;
      const std::size_t count =
          std::min<std::size_t>(static_cast<std::size_t>(opt.k), ranked.entries.size());
      for (std::size_t i = 0; i < count; ++i) {
        const std::string* dtext = corpus->find(ranked.entries[i].doc_id);
        if (dtext == nullptr) {
          throw DataError("no passage text for doc " + ranked.entries[i].doc_id);
        }
        passages.push_back(*dtext);
      }
      const DirectScore score = qpp_llm_direct(client, *qtext, passages, demos);
      if (score.clamped) {
        std::cerr << "query " << query_id << ": score outside [0,1], clamped\n";
      }
      result.predictions.emplace(query_id, QppPrediction{query_id, score.value});
    } catch (const std::exception& e) {
      result.errors.push_back({query_id, e.what()});
    }
  }
  return result;
}

void run_baseline(const BaselineCmd& opt) {
  const RunFile run = parse_run_file(opt.run_path);
  for (const auto& warning : run.warnings) std::cerr << warning << "\n";

  PredictResult result;
  std::string name;
  if (opt.method == "qpp-llm") {
    name = "qpp_llm";
    result = run_qpp_llm(opt, run.lists);
  } else {
    BaselineSpec spec;
    spec.method = baseline_method_from(opt.method);
    spec.k = opt.k;
    spec.x = opt.x;
    spec.sigma_normalizer = sigma_normalizer_from(opt.sigma_normalizer);
    if (opt.corpus_score_mode == "provided") {
      spec.corpus_score_mode = CorpusScoreMode::provided;
    } else if (opt.corpus_score_mode == "mean") {
      spec.corpus_score_mode = CorpusScoreMode::mean_of_list;
    } else {
      throw ConfigError("unknown corpus score mode: " + opt.corpus_score_mode);
    }
    name = to_string(spec.method);

    BaselineInputs inputs;
    std::unique_ptr<CollectionStore> queries;
    std::map<std::string, double> corpus_scores;
    if (!opt.text.queries_path.empty()) {
      queries = load_collection(opt.text.queries_path);
      inputs.queries = queries.get();
    }
    if (!opt.corpus_scores_path.empty()) {
      corpus_scores = parse_value_tsv_file(opt.corpus_scores_path);
      inputs.corpus_scores = &corpus_scores;
    }
    result = predict_baseline(run.lists, spec, inputs);
  }

  report_prediction_errors(result);
  write_prediction_files(opt.out_dir, name, result);
  fail_on_prediction_errors(result, run.lists.size());
}

// ---- evaluate --------------------------------------------------------------

struct EvaluateCmd {
  std::string predicted_path;
  std::string actual_path;
  std::string out_path;
};

void run_evaluate(const EvaluateCmd& opt) {
  const auto predicted_values = parse_value_tsv_file(opt.predicted_path);
  const auto actual = parse_value_tsv_file(opt.actual_path);
  std::map<std::string, QppPrediction> predicted;
  for (const auto& [query_id, value] : predicted_values) {
    predicted.emplace(query_id, QppPrediction{query_id, value});
  }

  const AlignResult aligned = align(predicted, actual);
  if (aligned.dropped_predicted > 0 || aligned.dropped_actual > 0) {
    std::cerr << "dropped " << aligned.dropped_predicted << " predicted-only and "
              << aligned.dropped_actual << " actual-only queries\n";
  }
  CorrelationReport report;
  try {
    report = correlate(aligned.series);
  } catch (const StatError& e) {
    throw StatError(std::string(e.what()) +
                    " (hint: a constant series carries no ranking signal; check the "
                    "predictor output and the actual-metric file)");
  }
  write_to("", [&](std::ostream& out) { write_report_json(out, report, aligned.dropped_predicted, aligned.dropped_actual); });
  if (!opt.out_path.empty()) {
    auto out = open_out(opt.out_path);
    write_report_json(out, report, aligned.dropped_predicted, aligned.dropped_actual);
  }
}

// ---- sweep -----------------------------------------------------------------

struct SweepCmd {
  std::string run_path;
  std::string metric = "ndcg@10";
  std::vector<int> depths;
  std::string actual_path;
  std::string store_path;
  std::string out_path;
  JudgeOptions judge;
  TextOptions text;
};

void run_sweep(const SweepCmd& opt) {
  const RunFile run = parse_run_file(opt.run_path);
  for (const auto& warning : run.warnings) std::cerr << warning << "\n";
  const MetricSpec spec = MetricSpec::parse(opt.metric);
  const auto actual = parse_value_tsv_file(opt.actual_path);
  auto bundle = make_judge(opt.judge);
  auto texts = make_context(opt.text);
  auto store = open_store(opt.store_path);

  JudgeStats stats;
  const auto rows = depth_sweep(run.lists, *bundle.judge, *store, spec.kind, spec.k,
                                opt.depths, actual, texts.context, &stats);
  std::cerr << "cache hits: " << stats.cache_hits << ", new judgments: " << stats.invocations
            << "\n";

  std::size_t ok = 0;
  for (const auto& row : rows) {
    if (row.report) {
      ++ok;
    } else {
      std::cerr << "depth " << row.depth << ": " << row.error << "\n";
    }
  }
  write_to(opt.out_path, [&](std::ostream& out) { write_sweep_csv(out, rows); });
  if (ok == 0) throw JudgeError("every sweep depth failed");
}

// ---- agreement -------------------------------------------------------------

struct AgreementCmd {
  std::string judgments_path;
  std::string qrels_path;
  int min_grade = 2;
  std::string out_path;
  std::string predicted_path;
  std::string actual_path;
  std::string diff_out_path = "diffs.tsv";
};

void run_agreement(const AgreementCmd& opt) {
  const auto judgments = read_judgments_file(opt.judgments_path);
  const Qrels qrels = parse_qrels_file(opt.qrels_path);
  const ConfusionResult confusion = build_confusion(judgments, qrels, opt.min_grade);
  const double kappa = cohen_kappa(confusion.matrix);
  write_to("", [&](std::ostream& out) {
    write_agreement_json(out, confusion, kappa, opt.min_grade);
  });
  if (!opt.out_path.empty()) {
    auto out = open_out(opt.out_path);
    write_agreement_json(out, confusion, kappa, opt.min_grade);
  }

  if (opt.predicted_path.empty() != opt.actual_path.empty()) {
    throw ConfigError("--predicted and --actual must be given together");
  }
  if (!opt.predicted_path.empty()) {
    const auto predicted = parse_value_tsv_file(opt.predicted_path);
    const auto actual = parse_value_tsv_file(opt.actual_path);
    std::map<std::string, double> diffs;
    for (const auto& [query_id, value] : predicted) {
      auto it = actual.find(query_id);
      if (it != actual.end()) diffs.emplace(query_id, value - it->second);
    }
    if (diffs.empty()) throw DataError("prediction files share no queries");
    auto out = open_out(opt.diff_out_path);
    write_value_tsv(out, diffs);
    std::cerr << "wrote " << opt.diff_out_path << " (" << diffs.size()
              << " per-query differences)\n";
  }
}

// ---- threshold-scan --------------------------------------------------------

struct ThresholdScanCmd {
  std::string run_path;
  std::string scores_path;
  double theta_min = 0.0;
  double theta_max = 0.0;
  double step = 0.5;
  std::string metric = "ndcg@10";
  std::optional<int> depth;
  std::string actual_path;
  std::string qrels_path;
  int min_grade = 2;
  std::string store_path;
  std::string out_path;
};

void run_threshold_scan(const ThresholdScanCmd& opt) {
  const RunFile run = parse_run_file(opt.run_path);
  for (const auto& warning : run.warnings) std::cerr << warning << "\n";
  const ScoreTable scores = score_table_from_run(parse_run_file(opt.scores_path).lists);

  ThresholdScanConfig config;
  config.theta_min = opt.theta_min;
  config.theta_max = opt.theta_max;
  config.step = opt.step;
  config.spec = MetricSpec::parse(opt.metric);
  config.spec.n = opt.depth.value_or(config.spec.k);

  std::map<std::string, double> actual;
  if (!opt.actual_path.empty()) {
    actual = parse_value_tsv_file(opt.actual_path);
  } else if (!opt.qrels_path.empty()) {
    // Binary approximation of the actual metric from the qrels.
    const Qrels qrels = parse_qrels_file(opt.qrels_path);
    OracleJudge oracle(qrels, opt.min_grade);
    JudgmentStore scratch;
    const auto result = predict_run(run.lists, oracle, scratch, config.spec);
    report_prediction_errors(result);
    fail_on_prediction_errors(result, run.lists.size());
    for (const auto& [query_id, prediction] : result.predictions) {
      actual.emplace(query_id, prediction.value);
    }
  } else {
    throw ConfigError("threshold-scan needs --actual or --qrels");
  }

  auto store = open_store(opt.store_path);
  JudgeStats stats;
  const auto rows = threshold_scan(run.lists, scores, config, actual, *store, &stats);

  std::size_t ok = 0;
  for (const auto& row : rows) {
    if (row.report) {
      ++ok;
    } else {
      std::cerr << "theta " << format_double(row.theta) << ": " << row.error << "\n";
    }
  }
  write_to(opt.out_path, [&](std::ostream& out) { write_threshold_csv(out, rows); });
  if (ok == 0) throw JudgeError("every threshold failed");
}

// ---- tune ------------------------------------------------------------------

struct TuneCmd {
  std::string run_path;
  std::string actual_path;
  std::string method;
  std::vector<int> k_grid{5, 10, 15, 20, 25, 50, 100, 300, 500, 1000};
  std::vector<double> x_grid{0.25, 0.4, 0.5, 0.6, 0.75, 0.9};
  std::string sigma_normalizer = "count";
  std::string corpus_score_mode = "mean";
  std::string corpus_scores_path;
  std::string queries_path;
  std::string eval_run_path;
  std::string eval_actual_path;
  std::string out_path;
};

void run_tune(const TuneCmd& opt) {
  const RunFile run = parse_run_file(opt.run_path);
  const auto actual = parse_value_tsv_file(opt.actual_path);
  const BaselineMethod method = baseline_method_from(opt.method);

  BaselineInputs inputs;
  std::unique_ptr<CollectionStore> queries;
  std::map<std::string, double> corpus_scores;
  if (!opt.queries_path.empty()) {
    queries = load_collection(opt.queries_path);
    inputs.queries = queries.get();
  }
  if (!opt.corpus_scores_path.empty()) {
    corpus_scores = parse_value_tsv_file(opt.corpus_scores_path);
    inputs.corpus_scores = &corpus_scores;
  }

  BaselineSpec base;
  base.method = method;
  base.sigma_normalizer = sigma_normalizer_from(opt.sigma_normalizer);
  base.corpus_score_mode = opt.corpus_score_mode == "provided" ? CorpusScoreMode::provided
                                                               : CorpusScoreMode::mean_of_list;
  std::vector<BaselineSpec> candidates;
  if (method == BaselineMethod::n_sigma_x) {
    for (double x : opt.x_grid) {
      BaselineSpec spec = base;
      spec.x = x;
      candidates.push_back(spec);
    }
  } else if (method == BaselineMethod::sigma_max) {
    candidates.push_back(base); // no hyper-parameter to pick
  } else {
    for (int k : opt.k_grid) {
      BaselineSpec spec = base;
      spec.k = k;
      candidates.push_back(spec);
    }
  }

  const TuneOutcome outcome = tune_baseline(run.lists, inputs, actual, candidates);

  nlohmann::ordered_json doc;
  doc["method"] = to_string(method);
  doc["k"] = outcome.best.k;
  if (method == BaselineMethod::n_sigma_x) doc["x"] = outcome.best.x;
  doc["tuning_pearson"] = outcome.pearson;
  auto& tried = doc["candidates"] = nlohmann::ordered_json::array();
  for (const auto& candidate : outcome.candidates) {
    nlohmann::ordered_json entry;
    entry["k"] = candidate.spec.k;
    if (method == BaselineMethod::n_sigma_x) entry["x"] = candidate.spec.x;
    if (candidate.pearson) {
      entry["pearson"] = *candidate.pearson;
    } else {
      entry["error"] = candidate.error;
    }
    tried.push_back(std::move(entry));
  }

  if (opt.eval_run_path.empty() != opt.eval_actual_path.empty()) {
    throw ConfigError("--eval-run and --eval-actual must be given together");
  }
  if (!opt.eval_run_path.empty()) {
    const RunFile eval_run = parse_run_file(opt.eval_run_path);
    const auto eval_actual = parse_value_tsv_file(opt.eval_actual_path);
    const auto predicted = predict_baseline(eval_run.lists, outcome.best, inputs);
    report_prediction_errors(predicted);
    doc["eval_pearson"] = pearson(align(predicted.predictions, eval_actual).series);
  }

  write_to(opt.out_path, [&](std::ostream& out) { out << doc.dump(2) << "\n"; });
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Query performance prediction toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from a key=value config file");
  std::uint64_t seed = kDefaultSeed;
  app.add_option("--seed", seed, "Seed for any sampling feature")->capture_default_str();

  auto judge_cmd = std::make_shared<JudgeCmd>();
  auto* judge_app = app.add_subcommand("judge", "Generate relevance judgments for a run");
  judge_app->add_option("--run", judge_cmd->run_path, "TREC run file")->required();
  judge_app->add_option("--depth", judge_cmd->depth, "Items judged per query")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  judge_app->add_option("--store", judge_cmd->store_path, "Judgment store (JSONL, appended)")
      ->required();
  add_judge_options(judge_app, judge_cmd->judge);
  add_text_options(judge_app, judge_cmd->text);
  judge_app->callback([judge_cmd] { run_judge(*judge_cmd); });

  auto predict_cmd = std::make_shared<PredictCmd>();
  auto* predict_app = app.add_subcommand("predict", "Predict IR measures from judgments");
  predict_app->add_option("--run", predict_cmd->run_path, "TREC run file")->required();
  predict_app->add_option("--metric", predict_cmd->metrics, "Measure, e.g. rr@10 (repeatable)")
      ->required();
  predict_app->add_option("--depth", predict_cmd->depth, "Judging depth (default: largest cutoff)");
  predict_app->add_option("--store", predict_cmd->store_path, "Judgment store (JSONL)");
  predict_app->add_option("--out-dir", predict_cmd->out_dir, "Output directory");
  add_judge_options(predict_app, predict_cmd->judge);
  add_text_options(predict_app, predict_cmd->text);
  predict_app->callback([predict_cmd] { run_predict(*predict_cmd); });

  auto baseline_cmd = std::make_shared<BaselineCmd>();
  auto* baseline_app = app.add_subcommand("baseline", "Score-based QPP baselines");
  baseline_app->add_option("--run", baseline_cmd->run_path, "TREC run file")->required();
  baseline_app
      ->add_option("--method", baseline_cmd->method,
                   "wig | nqc | sigma_max | n_sigma_x | smv | qpp-llm")
      ->required()
      ->check(CLI::IsMember({"wig", "nqc", "sigma_max", "n_sigma_x", "smv", "qpp-llm"}));
  baseline_app->add_option("--k", baseline_cmd->k, "Score cutoff")->capture_default_str();
  baseline_app->add_option("--x", baseline_cmd->x, "Top-score fraction (n_sigma_x)")
      ->capture_default_str();
  baseline_app
      ->add_option("--sigma-normalizer", baseline_cmd->sigma_normalizer,
                   "n_sigma_x divisor: count | query_length | none")
      ->capture_default_str();
  baseline_app
      ->add_option("--corpus-score-mode", baseline_cmd->corpus_score_mode,
                   "mean | provided")
      ->check(CLI::IsMember({"mean", "provided"}))
      ->capture_default_str();
  baseline_app->add_option("--corpus-scores", baseline_cmd->corpus_scores_path,
                           "qid<TAB>score file for provided mode");
  baseline_app->add_option("--demos", baseline_cmd->demos_path,
                           "Demonstrations JSONL for qpp-llm");
  baseline_app->add_option("--out-dir", baseline_cmd->out_dir, "Output directory");
  add_endpoint_options(baseline_app, baseline_cmd->judge);
  add_text_options(baseline_app, baseline_cmd->text);
  baseline_app->callback([baseline_cmd] { run_baseline(*baseline_cmd); });

  auto evaluate_cmd = std::make_shared<EvaluateCmd>();
  auto* evaluate_app = app.add_subcommand("evaluate", "Correlate predicted vs actual values");
  evaluate_app->add_option("--predicted", evaluate_cmd->predicted_path, "qid<TAB>value file")
      ->required();
  evaluate_app->add_option("--actual", evaluate_cmd->actual_path, "qid<TAB>value file")
      ->required();
  evaluate_app->add_option("--out", evaluate_cmd->out_path, "Also write the JSON report here");
  evaluate_app->callback([evaluate_cmd] { run_evaluate(*evaluate_cmd); });

  auto sweep_cmd = std::make_shared<SweepCmd>();
  auto* sweep_app = app.add_subcommand("sweep", "Correlation as a function of judging depth");
  sweep_app->add_option("--run", sweep_cmd->run_path, "TREC run file")->required();
  sweep_app->add_option("--metric", sweep_cmd->metric, "Measure, e.g. ndcg@10")
      ->capture_default_str();
  sweep_app->add_option("--depths", sweep_cmd->depths, "Judging depths, e.g. 10,25,50")
      ->required()
      ->delimiter(',');
  sweep_app->add_option("--actual", sweep_cmd->actual_path, "qid<TAB>value file")->required();
  sweep_app->add_option("--store", sweep_cmd->store_path, "Judgment store (JSONL)");
  sweep_app->add_option("--out", sweep_cmd->out_path, "CSV output path (default stdout)");
  add_judge_options(sweep_app, sweep_cmd->judge);
  add_text_options(sweep_app, sweep_cmd->text);
  sweep_app->callback([sweep_cmd] { run_sweep(*sweep_cmd); });

  auto agreement_cmd = std::make_shared<AgreementCmd>();
  auto* agreement_app =
      app.add_subcommand("agreement", "Confusion matrix and kappa vs human qrels");
  agreement_app->add_option("--judgments", agreement_cmd->judgments_path, "Judgment store file")
      ->required();
  agreement_app->add_option("--qrels", agreement_cmd->qrels_path, "Human qrels")->required();
  agreement_app->add_option("--min-grade", agreement_cmd->min_grade, "Lowest grade counted relevant")
      ->capture_default_str();
  agreement_app->add_option("--out", agreement_cmd->out_path, "Also write the JSON report here");
  agreement_app->add_option("--predicted", agreement_cmd->predicted_path,
                            "Predicted per-query values (with --actual: emit differences)");
  agreement_app->add_option("--actual", agreement_cmd->actual_path, "Actual per-query values");
  agreement_app->add_option("--diff-out", agreement_cmd->diff_out_path,
                            "Where to write per-query differences")
      ->capture_default_str();
  agreement_app->callback([agreement_cmd] { run_agreement(*agreement_cmd); });

  auto scan_cmd = std::make_shared<ThresholdScanCmd>();
  auto* scan_app =
      app.add_subcommand("threshold-scan", "Correlation as a function of the judge threshold");
  scan_app->add_option("--run", scan_cmd->run_path, "TREC run file")->required();
  scan_app->add_option("--scores", scan_cmd->scores_path, "Run-format re-ranker scores")
      ->required();
  scan_app->add_option("--theta-min", scan_cmd->theta_min, "Lowest threshold")->required();
  scan_app->add_option("--theta-max", scan_cmd->theta_max, "Highest threshold")->required();
  scan_app->add_option("--step", scan_cmd->step, "Threshold increment")->capture_default_str();
  scan_app->add_option("--metric", scan_cmd->metric, "Measure, e.g. ndcg@10")
      ->capture_default_str();
  scan_app->add_option("--depth", scan_cmd->depth, "Judging depth (default: cutoff)");
  scan_app->add_option("--actual", scan_cmd->actual_path, "qid<TAB>value file");
  scan_app->add_option("--qrels", scan_cmd->qrels_path,
                       "Derive binary actual values from these qrels instead");
  scan_app->add_option("--min-grade", scan_cmd->min_grade, "Lowest grade counted relevant")
      ->capture_default_str();
  scan_app->add_option("--store", scan_cmd->store_path, "Judgment store (JSONL)");
  scan_app->add_option("--out", scan_cmd->out_path, "CSV output path (default stdout)");
  scan_app->callback([scan_cmd] { run_threshold_scan(*scan_cmd); });

  auto tune_cmd = std::make_shared<TuneCmd>();
  auto* tune_app = app.add_subcommand("tune", "Pick baseline hyper-parameters on a labeled set");
  tune_app->add_option("--run", tune_cmd->run_path, "Tuning-set TREC run")->required();
  tune_app->add_option("--actual", tune_cmd->actual_path, "Tuning-set qid<TAB>value file")
      ->required();
  tune_app->add_option("--method", tune_cmd->method, "wig | nqc | sigma_max | n_sigma_x | smv")
      ->required()
      ->check(CLI::IsMember({"wig", "nqc", "sigma_max", "n_sigma_x", "smv"}));
  tune_app->add_option("--k-grid", tune_cmd->k_grid, "Candidate cutoffs")->delimiter(',');
  tune_app->add_option("--x-grid", tune_cmd->x_grid, "Candidate fractions (n_sigma_x)")
      ->delimiter(',');
  tune_app->add_option("--sigma-normalizer", tune_cmd->sigma_normalizer,
                       "count | query_length | none");
  tune_app->add_option("--corpus-score-mode", tune_cmd->corpus_score_mode, "mean | provided")
      ->check(CLI::IsMember({"mean", "provided"}));
  tune_app->add_option("--corpus-scores", tune_cmd->corpus_scores_path,
                       "qid<TAB>score file for provided mode");
  tune_app->add_option("--queries", tune_cmd->queries_path, "Query texts (for wig term counts)");
  tune_app->add_option("--eval-run", tune_cmd->eval_run_path, "Held-out TREC run");
  tune_app->add_option("--eval-actual", tune_cmd->eval_actual_path, "Held-out qid<TAB>value file");
  tune_app->add_option("--out", tune_cmd->out_path, "JSON output path (default stdout)");
  tune_app->callback([tune_cmd] { run_tune(*tune_cmd); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
