#include <benchmark/benchmark.h>

#include "riskmine/expr/evaluate.hpp"
#include "riskmine/expr/formula.hpp"
#include "riskmine/market/synthetic.hpp"
#include "riskmine/metrics/ic.hpp"

namespace {

using namespace riskmine;

struct Fixture {
  expr::OptionCatalog catalog = expr::OptionCatalog::default_catalog();
  expr::FactorExpr factor;
  market::SyntheticData data;

  Fixture() {
    factor = expr::parse("log((0.5·close)+(0.1·volume))·sqrt((0.4·vwap)/(0.3·high))", catalog);
    market::SyntheticSpec spec;
    spec.symbols = 200;
    spec.days = 60;
    spec.minutes = 240;
    data = market::generate_synthetic(spec, factor, catalog);
  }
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

void BM_EvaluateParallel(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(expr::evaluate(f.factor, f.catalog, f.data.panel));
  }
}
BENCHMARK(BM_EvaluateParallel)->Unit(benchmark::kMillisecond);

void BM_EvaluateSequential(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(expr::evaluate_sequential(f.factor, f.catalog, f.data.panel));
  }
}
BENCHMARK(BM_EvaluateSequential)->Unit(benchmark::kMillisecond);

void BM_EvaluateReference(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) {
    benchmark::DoNotOptimize(expr::evaluate_reference(f.factor, f.catalog, f.data.panel));
  }
}
BENCHMARK(BM_EvaluateReference)->Unit(benchmark::kMillisecond);

void BM_IcSeriesParallel(benchmark::State& state) {
  const auto& f = fixture();
  auto values = expr::evaluate(f.factor, f.catalog, f.data.panel);
  for (auto _ : state) benchmark::DoNotOptimize(metrics::ic_series(values, f.data.target));
}
BENCHMARK(BM_IcSeriesParallel)->Unit(benchmark::kMicrosecond);

void BM_IcSeriesSequential(benchmark::State& state) {
  const auto& f = fixture();
  auto values = expr::evaluate(f.factor, f.catalog, f.data.panel);
  for (auto _ : state) {
    benchmark::DoNotOptimize(metrics::ic_series_sequential(values, f.data.target));
  }
}
BENCHMARK(BM_IcSeriesSequential)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
