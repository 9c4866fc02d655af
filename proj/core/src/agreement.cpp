#include "qppkit/agreement.hpp"

#include "qppkit/errors.hpp"

namespace qppkit {

ConfusionResult build_confusion(const std::vector<JudgmentRecord>& judgments,
                                const Qrels& qrels, int min_grade) {
  ConfusionResult result;
  for (const auto& record : judgments) {
    const auto grade = qrels.grade(record.query_id, record.doc_id);
    if (!grade) {
      ++result.excluded_unjudged;
      continue;
    }
    const bool human = *grade >= min_grade;
    if (record.label == 1) {
      (human ? result.matrix.tp : result.matrix.fp) += 1;
    } else {
      (human ? result.matrix.fn : result.matrix.tn) += 1;
    }
  }
  if (result.matrix.total() == 0) {
    throw DataError("no judged (query, doc) pair appears in the qrels");
  }
  return result;
}

double cohen_kappa(const ConfusionMatrix2x2& m) {
  const double total = static_cast<double>(m.total());
  if (total <= 0.0) throw StatError("kappa needs a non-empty confusion matrix");
  const double observed = static_cast<double>(m.tp + m.tn) / total;
  const double gen_pos = static_cast<double>(m.tp + m.fp) / total;
  const double hum_pos = static_cast<double>(m.tp + m.fn) / total;
  const double expected = gen_pos * hum_pos + (1.0 - gen_pos) * (1.0 - hum_pos);
  if (expected >= 1.0) {
    throw StatError("kappa undefined: both sides assign a single label");
  }
  return (observed - expected) / (1.0 - expected);
}

} // namespace qppkit
