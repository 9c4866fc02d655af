#include "qppkit/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "qppkit/errors.hpp"

namespace qppkit {
namespace {

std::vector<double> top_scores(const RankedList& ranked, int k) {
  if (ranked.entries.empty()) {
    throw DataError("empty ranked list for query " + ranked.query_id);
  }
  const std::size_t count = std::min<std::size_t>(static_cast<std::size_t>(k), ranked.entries.size());
  std::vector<double> scores;
  scores.reserve(count);
  for (std::size_t i = 0; i < count; ++i) scores.push_back(ranked.entries[i].score);
  return scores;
}

double mean_of(const std::vector<double>& values) {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

double population_std(const std::vector<double>& values) {
  const double mu = mean_of(values);
  double ss = 0.0;
  for (double v : values) ss += (v - mu) * (v - mu);
  return std::sqrt(ss / static_cast<double>(values.size()));
}

void require_nonzero_corpus(double corpus) {
  if (corpus == 0.0) throw DataError("corpus score must be nonzero");
}

} // namespace

BaselineMethod baseline_method_from(const std::string& name) {
  if (name == "wig") return BaselineMethod::wig;
  if (name == "nqc") return BaselineMethod::nqc;
  if (name == "sigma_max" || name == "sigma-max") return BaselineMethod::sigma_max;
  if (name == "n_sigma_x" || name == "n-sigma-x") return BaselineMethod::n_sigma_x;
  if (name == "smv") return BaselineMethod::smv;
  throw ConfigError("unknown baseline method: " + name);
}

std::string to_string(BaselineMethod method) {
  switch (method) {
    case BaselineMethod::wig: return "wig";
    case BaselineMethod::nqc: return "nqc";
    case BaselineMethod::sigma_max: return "sigma_max";
    case BaselineMethod::n_sigma_x: return "n_sigma_x";
    case BaselineMethod::smv: return "smv";
  }
  return "?";
}

SigmaNormalizer sigma_normalizer_from(const std::string& name) {
  if (name == "count") return SigmaNormalizer::count;
  if (name == "query_length" || name == "query-length") return SigmaNormalizer::query_length;
  if (name == "none") return SigmaNormalizer::none;
  throw ConfigError("unknown sigma normalizer: " + name);
}

void BaselineSpec::validate() const {
  if (k < 1) throw ConfigError("baseline cutoff k must be positive");
  if (method == BaselineMethod::n_sigma_x && (!(x > 0.0) || x > 1.0)) {
    throw ConfigError("x must lie in (0,1], got " + format_double(x));
  }
}

double corpus_score(const RankedList& ranked, CorpusScoreMode mode, double provided) {
  if (mode == CorpusScoreMode::provided) return provided;
  if (ranked.entries.empty()) {
    throw DataError("empty ranked list for query " + ranked.query_id);
  }
  double sum = 0.0;
  for (const auto& entry : ranked.entries) sum += entry.score;
  return sum / static_cast<double>(ranked.entries.size());
}

double wig(const RankedList& ranked, int query_term_count, int k, double corpus) {
  if (k < 1) throw ConfigError("cutoff k must be positive");
  if (query_term_count < 1) throw ConfigError("query term count must be positive");
  const auto scores = top_scores(ranked, k);
  double sum = 0.0;
  for (double s : scores) sum += s - corpus;
  return sum / static_cast<double>(scores.size()) / std::sqrt(static_cast<double>(query_term_count));
}

double nqc(const RankedList& ranked, int k, double corpus) {
  if (k < 1) throw ConfigError("cutoff k must be positive");
  require_nonzero_corpus(corpus);
  return population_std(top_scores(ranked, k)) / corpus;
}

double sigma_max(const RankedList& ranked) {
  if (ranked.entries.empty()) {
    throw DataError("empty ranked list for query " + ranked.query_id);
  }
  // Running prefix variance (Welford), taking the max over prefixes.
  double best = 0.0;
  double mean = 0.0;
  double m2 = 0.0;
  std::size_t n = 0;
  for (const auto& entry : ranked.entries) {
    ++n;
    const double delta = entry.score - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (entry.score - mean);
    best = std::max(best, std::sqrt(m2 / static_cast<double>(n)));
  }
  return best;
}

double n_sigma_x(const RankedList& ranked, double x, SigmaNormalizer normalizer,
                 int query_term_count) {
  if (!(x > 0.0) || x > 1.0) throw ConfigError("x must lie in (0,1], got " + format_double(x));
  if (ranked.entries.empty()) {
    throw DataError("empty ranked list for query " + ranked.query_id);
  }
  const double cutoff = x * ranked.entries.front().score;
  std::vector<double> head;
  for (const auto& entry : ranked.entries) {
    if (entry.score >= cutoff) head.push_back(entry.score);
  }
  const double sd = population_std(head);
  switch (normalizer) {
    case SigmaNormalizer::count:
      return sd / static_cast<double>(head.size());
    case SigmaNormalizer::query_length:
      if (query_term_count < 1) throw ConfigError("query term count must be positive");
      return sd / static_cast<double>(query_term_count);
    case SigmaNormalizer::none:
      return sd;
  }
  throw ConfigError("unknown sigma normalizer");
}

double smv(const RankedList& ranked, int k, double corpus) {
  if (k < 1) throw ConfigError("cutoff k must be positive");
  require_nonzero_corpus(corpus);
  const auto scores = top_scores(ranked, k);
  for (double s : scores) {
    if (s <= 0.0) {
      throw DataError("smv needs positive scores in the top k for query " + ranked.query_id +
                      " (got " + format_double(s) + ")");
    }
  }
  const double mu = mean_of(scores);
  double sum = 0.0;
  for (double s : scores) sum += s * std::abs(std::log(s / mu));
  return sum / static_cast<double>(scores.size()) / corpus;
}

PredictResult predict_baseline(const RunMap& run, const BaselineSpec& spec,
                               const BaselineInputs& inputs) {
  spec.validate();
  const bool needs_corpus = spec.method == BaselineMethod::wig ||
                            spec.method == BaselineMethod::nqc ||
                            spec.method == BaselineMethod::smv;
  const bool needs_terms =
      spec.method == BaselineMethod::wig ||
      (spec.method == BaselineMethod::n_sigma_x &&
       spec.sigma_normalizer == SigmaNormalizer::query_length);
  if (needs_corpus && spec.corpus_score_mode == CorpusScoreMode::provided &&
      inputs.corpus_scores == nullptr) {
    throw ConfigError("corpus_score_mode=provided needs a corpus-score table");
  }
  if (needs_terms && inputs.queries == nullptr) {
    throw ConfigError(to_string(spec.method) + " needs query texts for term counts");
  }

  PredictResult result;
  for (const auto& [query_id, ranked] : run) {
    try {
      double s_c = 0.0;
      if (needs_corpus) {
        if (spec.corpus_score_mode == CorpusScoreMode::provided) {
          auto it = inputs.corpus_scores->find(query_id);
          if (it == inputs.corpus_scores->end()) {
            throw DataError("no corpus score provided for query " + query_id);
          }
          s_c = it->second;
        } else {
          s_c = corpus_score(ranked, CorpusScoreMode::mean_of_list);
        }
      }

      int terms = 0;
      if (needs_terms) {
        const std::string* text = inputs.queries->find(query_id);
        if (text == nullptr) {
          throw DataError("no query text for query " + query_id);
        }
        terms = term_count(*text);
      }

      double value = 0.0;
      switch (spec.method) {
        case BaselineMethod::wig: value = wig(ranked, terms, spec.k, s_c); break;
        case BaselineMethod::nqc: value = nqc(ranked, spec.k, s_c); break;
        case BaselineMethod::sigma_max: value = sigma_max(ranked); break;
        case BaselineMethod::n_sigma_x:
          value = n_sigma_x(ranked, spec.x, spec.sigma_normalizer, terms);
          break;
        case BaselineMethod::smv: value = smv(ranked, spec.k, s_c); break;
      }
      result.predictions.emplace(query_id, QppPrediction{query_id, value});
    } catch (const std::exception& e) {
      result.errors.push_back({query_id, e.what()});
    }
  }
  return result;
}

} // namespace qppkit
