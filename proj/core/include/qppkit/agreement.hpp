#pragma once

#include <cstdint>
#include <vector>

#include "qppkit/judgments.hpp"
#include "qppkit/trec.hpp"

namespace qppkit {

/// Agreement counts between generated judgments and binarized human labels.
/// "Positive" on the human side means grade >= min_grade.
struct ConfusionMatrix2x2 {
  std::int64_t tp = 0; // generated 1, human positive
  std::int64_t fp = 0; // generated 1, human negative
  std::int64_t fn = 0; // generated 0, human positive
  std::int64_t tn = 0; // generated 0, human negative

  std::int64_t total() const { return tp + fp + fn + tn; }
};

struct ConfusionResult {
  ConfusionMatrix2x2 matrix;
  int excluded_unjudged = 0; // judged pairs with no grade in the qrels
};

/// Counts agreement over the (query, doc) pairs both sides cover. Pairs the
/// qrels never graded are excluded and counted. Empty intersection is an
/// error.
ConfusionResult build_confusion(const std::vector<JudgmentRecord>& judgments,
                                const Qrels& qrels, int min_grade = 2);

/// Chance-corrected agreement (p_o - p_e) / (1 - p_e) from the 2x2 counts.
/// Degenerate marginals (expected agreement 1) are an error.
double cohen_kappa(const ConfusionMatrix2x2& m);

} // namespace qppkit
