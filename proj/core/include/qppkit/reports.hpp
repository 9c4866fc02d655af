#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include "qppkit/agreement.hpp"
#include "qppkit/metrics.hpp"
#include "qppkit/stats.hpp"
#include "qppkit/sweep.hpp"

namespace qppkit {

/// `qid<TAB>value`, one line per query, sorted by qid.
void write_predictions_tsv(std::ostream& out,
                           const std::map<std::string, QppPrediction>& predictions);

/// JSON document with the measure name, per-query values, and the error
/// manifest for queries that produced none.
void write_predictions_json(std::ostream& out, const std::string& measure,
                            const PredictResult& result);

void write_report_json(std::ostream& out, const CorrelationReport& report,
                       int dropped_predicted = 0, int dropped_actual = 0);

/// CSV `depth,pearson,kendall,spearman,smare,p_value,n`; failed rows are
/// omitted (callers report them separately).
void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows);

/// CSV `theta,pearson,kendall,spearman,smare,p_value,n`, same shape.
void write_threshold_csv(std::ostream& out, const std::vector<ThresholdRow>& rows);

void write_agreement_json(std::ostream& out, const ConfusionResult& confusion,
                          double kappa, int min_grade);

} // namespace qppkit
