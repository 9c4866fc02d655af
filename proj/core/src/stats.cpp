#include "qppkit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <unordered_set>

#include "qppkit/errors.hpp"

namespace qppkit {
namespace {

double clamp_unit(double v) { return std::clamp(v, -1.0, 1.0); }

double pearson_core(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double sxy = 0.0;
  double sxx = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw StatError("correlation undefined: a series is constant");
  }
  return clamp_unit(sxy / std::sqrt(sxx * syy));
}

// Merge sort counting strict inversions (earlier value > later value).
std::int64_t count_inversions(std::vector<double>& values, std::vector<double>& scratch,
                              std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::int64_t swaps = count_inversions(values, scratch, lo, mid) +
                       count_inversions(values, scratch, mid, hi);
  std::size_t a = lo;
  std::size_t b = mid;
  std::size_t out = lo;
  while (a < mid && b < hi) {
    if (values[b] < values[a]) {
      swaps += static_cast<std::int64_t>(mid - a);
      scratch[out++] = values[b++];
    } else {
      scratch[out++] = values[a++];
    }
  }
  while (a < mid) scratch[out++] = values[a++];
  while (b < hi) scratch[out++] = values[b++];
  std::copy(scratch.begin() + static_cast<std::ptrdiff_t>(lo),
            scratch.begin() + static_cast<std::ptrdiff_t>(hi),
            values.begin() + static_cast<std::ptrdiff_t>(lo));
  return swaps;
}

std::int64_t tie_pair_count(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  std::int64_t pairs = 0;
  std::size_t i = 0;
  while (i < values.size()) {
    std::size_t j = i;
    while (j < values.size() && values[j] == values[i]) ++j;
    const std::int64_t t = static_cast<std::int64_t>(j - i);
    pairs += t * (t - 1) / 2;
    i = j;
  }
  return pairs;
}

// Continued-fraction part of the regularized incomplete beta (Lentz).
double beta_cf(double a, double b, double x) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 3e-15;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < kEps) return h;
  }
  throw StatError("incomplete beta did not converge");
}

double regularized_incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_cf(a, b, x) / a;
  }
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

} // namespace

void PairedSeries::validate() const {
  if (predicted.size() != query_ids.size() || actual.size() != query_ids.size()) {
    throw StatError("paired series fields have mismatched lengths");
  }
  if (size() < 2) {
    throw StatError("need at least 2 paired queries, have " + std::to_string(size()));
  }
  std::unordered_set<std::string> seen;
  for (const auto& id : query_ids) {
    if (!seen.insert(id).second) throw StatError("duplicate query id in series: " + id);
  }
}

AlignResult align(const std::map<std::string, QppPrediction>& predicted,
                  const std::map<std::string, double>& actual) {
  AlignResult result;
  for (const auto& [query_id, prediction] : predicted) {
    auto it = actual.find(query_id);
    if (it == actual.end()) {
      ++result.dropped_predicted;
      continue;
    }
    result.series.query_ids.push_back(query_id);
    result.series.predicted.push_back(prediction.value);
    result.series.actual.push_back(it->second);
  }
  result.dropped_actual = static_cast<int>(actual.size()) -
                          static_cast<int>(result.series.size());
  if (result.series.size() < 2) {
    throw StatError("predicted and actual values share fewer than 2 queries");
  }
  return result;
}

std::vector<double> mean_ranks(const std::vector<double>& values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && values[order[j]] == values[order[i]]) ++j;
    const double mean_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t p = i; p < j; ++p) ranks[order[p]] = mean_rank;
    i = j;
  }
  return ranks;
}

double pearson(const PairedSeries& series) {
  series.validate();
  return pearson_core(series.predicted, series.actual);
}

double kendall_tau_b(const PairedSeries& series) {
  series.validate();
  const std::size_t n = series.size();

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (series.predicted[a] != series.predicted[b]) {
      return series.predicted[a] < series.predicted[b];
    }
    return series.actual[a] < series.actual[b];
  });

  // Pair counts: total, tied on x, tied on y, tied on both.
  const std::int64_t n0 = static_cast<std::int64_t>(n) * (static_cast<std::int64_t>(n) - 1) / 2;
  std::int64_t n1 = 0;
  std::int64_t n3 = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && series.predicted[order[j]] == series.predicted[order[i]]) ++j;
    const std::int64_t t = static_cast<std::int64_t>(j - i);
    n1 += t * (t - 1) / 2;
    std::size_t p = i;
    while (p < j) {
      std::size_t q = p;
      while (q < j && series.actual[order[q]] == series.actual[order[p]]) ++q;
      const std::int64_t v = static_cast<std::int64_t>(q - p);
      n3 += v * (v - 1) / 2;
      p = q;
    }
    i = j;
  }
  const std::int64_t n2 = tie_pair_count(series.actual);

  if (n0 == n1 || n0 == n2) {
    throw StatError("rank correlation undefined: a series is entirely tied");
  }

  std::vector<double> y_in_x_order(n);
  for (std::size_t p = 0; p < n; ++p) y_in_x_order[p] = series.actual[order[p]];
  std::vector<double> scratch(n);
  const std::int64_t swaps = count_inversions(y_in_x_order, scratch, 0, n);

  const std::int64_t concordant_minus_discordant = n0 - n1 - n2 + n3 - 2 * swaps;
  const double denom = std::sqrt(static_cast<double>(n0 - n1)) *
                       std::sqrt(static_cast<double>(n0 - n2));
  return clamp_unit(static_cast<double>(concordant_minus_discordant) / denom);
}

double spearman(const PairedSeries& series) {
  series.validate();
  return pearson_core(mean_ranks(series.predicted), mean_ranks(series.actual));
}

double smare(const PairedSeries& series) {
  series.validate();
  const auto rank_pred = mean_ranks(series.predicted);
  const auto rank_act = mean_ranks(series.actual);
  const double n = static_cast<double>(series.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < series.size(); ++i) {
    sum += std::abs(rank_pred[i] - rank_act[i]);
  }
  return sum / (n * n);
}

double pearson_significance(double r, int n) {
  if (n < 3) throw StatError("significance test needs at least 3 queries");
  if (!std::isfinite(r) || std::abs(r) > 1.0 + 1e-9) {
    throw StatError("correlation coefficient out of range");
  }
  r = clamp_unit(r);
  if (std::abs(r) >= 1.0 - 1e-12) return 0.0;
  if (r == 0.0) return 1.0;
  // Two-tailed t test, expressed through the incomplete beta:
  // p = I_{1-r^2}((n-2)/2, 1/2).
  const double df = static_cast<double>(n - 2);
  const double p = regularized_incomplete_beta(df / 2.0, 0.5, 1.0 - r * r);
  return std::clamp(p, 0.0, 1.0);
}

CorrelationReport correlate(const PairedSeries& series) {
  series.validate();
  CorrelationReport report;
  report.n_queries = static_cast<int>(series.size());
  report.pearson = pearson(series);
  report.kendall_tau_b = kendall_tau_b(series);
  report.spearman = spearman(series);
  report.smare = smare(series);
  report.pearson_p_value =
      series.size() >= 3 ? pearson_significance(report.pearson, report.n_queries)
                         : (std::abs(report.pearson) >= 1.0 - 1e-12 ? 0.0 : 1.0);
  return report;
}

} // namespace qppkit
