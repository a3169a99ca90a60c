// Microbenchmarks for the hot paths: the Poisson layer, the closed-form
// measures, and a single simulated seller lifetime.

#include <benchmark/benchmark.h>

#include "repsim/baseline_analytics.hpp"
#include "repsim/insurance.hpp"
#include "repsim/numerics.hpp"
#include "repsim/simulator.hpp"
#include "repsim/tables.hpp"

namespace {

repsim::MarketParams bench_market() {
  repsim::MarketParams m = repsim::reference_market();
  m.adoption.prob_average = 0.03;
  return m;
}

void BM_poisson_cdf(benchmark::State& state) {
  double mean = 180.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(repsim::poisson_cdf(199, mean));
    mean += 1e-9;  // defeat caching of a constant argument
  }
}
BENCHMARK(BM_poisson_cdf);

void BM_expected_ramp_up(benchmark::State& state) {
  const repsim::MarketParams m = bench_market();
  for (auto _ : state) {
    benchmark::DoNotOptimize(repsim::expected_ramp_up_time(m));
  }
}
BENCHMARK(BM_expected_ramp_up);

void BM_baseline_profit_quadrature(benchmark::State& state) {
  const repsim::MarketParams m = bench_market();
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        repsim::long_term_profit(m, repsim::GainMethod::ReducedQuadrature));
  }
}
BENCHMARK(BM_baseline_profit_quadrature);

void BM_insured_profit_quadrature(benchmark::State& state) {
  const repsim::MarketParams m = bench_market();
  const repsim::InsurancePolicy pol = repsim::reference_policy();
  for (auto _ : state) {
    benchmark::DoNotOptimize(repsim::insured_long_term_profit(m, pol));
  }
}
BENCHMARK(BM_insured_profit_quadrature);

void BM_simulate_seller_baseline(benchmark::State& state) {
  const repsim::MarketParams m = bench_market();
  repsim::SimConfig cfg;
  cfg.runs = 1;
  long long run = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(repsim::simulate_seller(m, cfg, run++));
  }
}
BENCHMARK(BM_simulate_seller_baseline);

void BM_simulate_seller_insured(benchmark::State& state) {
  const repsim::MarketParams m = bench_market();
  repsim::SimConfig cfg;
  cfg.runs = 1;
  cfg.regime = repsim::Regime::Insured;
  cfg.policy = repsim::reference_policy();
  long long run = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(repsim::simulate_seller(m, cfg, run++));
  }
}
BENCHMARK(BM_simulate_seller_insured);

}  // namespace

BENCHMARK_MAIN();
