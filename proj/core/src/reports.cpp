#include "qppkit/reports.hpp"

#include <ostream>

#include <nlohmann/json.hpp>

#include "qppkit/trec.hpp"

namespace qppkit {
namespace {

nlohmann::ordered_json report_json(const CorrelationReport& report) {
  nlohmann::ordered_json j;
  j["pearson"] = report.pearson;
  j["kendall_tau_b"] = report.kendall_tau_b;
  j["spearman"] = report.spearman;
  j["smare"] = report.smare;
  j["pearson_p_value"] = report.pearson_p_value;
  j["n_queries"] = report.n_queries;
  return j;
}

void csv_report_line(std::ostream& out, const std::string& key,
                     const CorrelationReport& r) {
  out << key << ',' << format_double(r.pearson) << ',' << format_double(r.kendall_tau_b)
      << ',' << format_double(r.spearman) << ',' << format_double(r.smare) << ','
      << format_double(r.pearson_p_value) << ',' << r.n_queries << '\n';
}

} // namespace

void write_predictions_tsv(std::ostream& out,
                           const std::map<std::string, QppPrediction>& predictions) {
  for (const auto& [query_id, prediction] : predictions) {
    out << query_id << '\t' << format_double(prediction.value) << '\n';
  }
}

void write_predictions_json(std::ostream& out, const std::string& measure,
                            const PredictResult& result) {
  nlohmann::ordered_json doc;
  doc["measure"] = measure;
  auto& values = doc["predictions"] = nlohmann::ordered_json::object();
  for (const auto& [query_id, prediction] : result.predictions) {
    values[query_id] = prediction.value;
  }
  auto& errors = doc["errors"] = nlohmann::ordered_json::array();
  for (const auto& error : result.errors) {
    errors.push_back({{"query_id", error.query_id}, {"message", error.message}});
  }
  out << doc.dump(2) << '\n';
}

void write_report_json(std::ostream& out, const CorrelationReport& report,
                       int dropped_predicted, int dropped_actual) {
  auto doc = report_json(report);
  doc["dropped_predicted"] = dropped_predicted;
  doc["dropped_actual"] = dropped_actual;
  out << doc.dump(2) << '\n';
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << "depth,pearson,kendall,spearman,smare,p_value,n\n";
  for (const auto& row : rows) {
    if (row.report) csv_report_line(out, std::to_string(row.depth), *row.report);
  }
}

void write_threshold_csv(std::ostream& out, const std::vector<ThresholdRow>& rows) {
  out << "theta,pearson,kendall,spearman,smare,p_value,n\n";
  for (const auto& row : rows) {
    if (row.report) csv_report_line(out, format_double(row.theta), *row.report);
  }
}

void write_agreement_json(std::ostream& out, const ConfusionResult& confusion,
                          double kappa, int min_grade) {
  nlohmann::ordered_json doc;
  doc["min_grade"] = min_grade;
  doc["confusion"] = {
      {"tp", confusion.matrix.tp},
      {"fp", confusion.matrix.fp},
      {"fn", confusion.matrix.fn},
      {"tn", confusion.matrix.tn},
  };
  doc["total"] = confusion.matrix.total();
  doc["excluded_unjudged"] = confusion.excluded_unjudged;
  doc["cohen_kappa"] = kappa;
  out << doc.dump(2) << '\n';
}

} // namespace qppkit
