#pragma once

#include <map>
#include <string>

#include "qppkit/metrics.hpp"
#include "qppkit/trec.hpp"

namespace qppkit {

enum class BaselineMethod { wig, nqc, sigma_max, n_sigma_x, smv };
enum class CorpusScoreMode { provided, mean_of_list };
enum class SigmaNormalizer { count, query_length, none };

BaselineMethod baseline_method_from(const std::string& name);
std::string to_string(BaselineMethod method);
SigmaNormalizer sigma_normalizer_from(const std::string& name);

struct BaselineSpec {
  BaselineMethod method = BaselineMethod::nqc;
  int k = 100;
  double x = 0.5; // n_sigma_x score fraction
  CorpusScoreMode corpus_score_mode = CorpusScoreMode::mean_of_list;
  SigmaNormalizer sigma_normalizer = SigmaNormalizer::count;

  void validate() const;
};

/// Corpus-level score estimate s_C. mean_of_list averages over the whole
/// ranked list; provided passes through a value from an external retriever.
double corpus_score(const RankedList& ranked, CorpusScoreMode mode, double provided = 0.0);

/// Mean score gap between the top k and the corpus, damped by query length:
/// (1/k) * sum(s_i - s_C) / sqrt(|q|). Lists shorter than k use what exists.
double wig(const RankedList& ranked, int query_term_count, int k, double corpus);

/// Population standard deviation of the top-k scores over s_C.
double nqc(const RankedList& ranked, int k, double corpus);

/// Maximum over i of the population standard deviation of scores s_1..s_i.
double sigma_max(const RankedList& ranked);

/// Standard deviation over the head of the list whose scores stay within a
/// fraction x of the top score, with a configurable normalizer.
double n_sigma_x(const RankedList& ranked, double x,
                 SigmaNormalizer normalizer = SigmaNormalizer::count,
                 int query_term_count = 0);

/// Score-magnitude variance: (1/k) * sum s_i * |ln(s_i / mu)| / s_C where mu
/// is the top-k mean. Requires positive top-k scores.
double smv(const RankedList& ranked, int k, double corpus);

/// Per-query side inputs: query texts for term counts, externally computed
/// corpus scores for CorpusScoreMode::provided.
struct BaselineInputs {
  const CollectionStore* queries = nullptr;
  const std::map<std::string, double>* corpus_scores = nullptr;
};

/// Applies spec.method to every list in the run. Per-query failures go to
/// the error manifest; values are raw predictor outputs, not confined to
/// [0,1].
PredictResult predict_baseline(const RunMap& run, const BaselineSpec& spec,
                               const BaselineInputs& inputs = {});

} // namespace qppkit
