#include <benchmark/benchmark.h>

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qppkit/judge.hpp"
#include "qppkit/metrics.hpp"
#include "qppkit/stats.hpp"
#include "qppkit/trec.hpp"

namespace {

const std::string& big_run_text() {
  static const std::string text = [] {
    std::ostringstream out;
    for (int q = 0; q < 200; ++q) {
      for (int d = 0; d < 100; ++d) {
        out << 'q' << q << " Q0 d" << q << '_' << d << ' ' << (d + 1) << ' '
            << 1000.0 - d * 0.5 << " bench\n";
      }
    }
    return out.str();
  }();
  return text;
}

void parse_big_run(benchmark::State& state) {
  const std::string& text = big_run_text();
  for (auto _ : state) {
    std::istringstream in(text);
    auto run = qppkit::parse_run(in);
    benchmark::DoNotOptimize(run);
  }
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations()) * text.size());
}
BENCHMARK(parse_big_run);

void ndcg_long_vector(benchmark::State& state) {
  std::mt19937_64 rng(42);
  std::bernoulli_distribution coin(0.3);
  qppkit::JudgmentVector j;
  j.query_id = "q";
  j.depth = 1000;
  j.labels.resize(1000);
  for (int& label : j.labels) label = coin(rng) ? 1 : 0;
  const int k = static_cast<int>(state.range(0));

  for (auto _ : state) {
    benchmark::DoNotOptimize(qppkit::ndcg_at_k(j, k));
  }
}
BENCHMARK(ndcg_long_vector)->Arg(10)->Arg(1000);

void kendall_ten_thousand(benchmark::State& state) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> value(0, 99);
  qppkit::PairedSeries series;
  for (int i = 0; i < 10000; ++i) {
    series.query_ids.push_back("q" + std::to_string(i));
    series.predicted.push_back(value(rng));
    series.actual.push_back(value(rng));
  }

  for (auto _ : state) {
    benchmark::DoNotOptimize(qppkit::kendall_tau_b(series));
  }
}
BENCHMARK(kendall_ten_thousand);

} // namespace
