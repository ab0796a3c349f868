#include <benchmark/benchmark.h>

#include "cfwm/dressed_spectra.hpp"
#include "cfwm/dynamics.hpp"
#include "cfwm/observables.hpp"
#include "cfwm/system_model.hpp"

using namespace cfwm;

static void BM_Couplings(benchmark::State& state) {
  const auto scheme = presets::rb87_diamond_scheme();
  const auto pos = presets::diamond_positions(2, 120.0);
  for (auto _ : state) benchmark::DoNotOptimize(compute_couplings(pos, scheme.transitions));
}
BENCHMARK(BM_Couplings);

static void BM_BuildGenerator(benchmark::State& state) {
  const auto m = presets::rb87_diamond();
  const CMatrix h = m.h_sys();
  const OperatorBasis basis(4, 2);
  for (auto _ : state) benchmark::DoNotOptimize(build_generator(h, m.couplings, basis));
}
BENCHMARK(BM_BuildGenerator)->Unit(benchmark::kMillisecond);

static void BM_SteadyState(benchmark::State& state) {
  const auto m = presets::rb87_diamond();
  const OperatorBasis basis(4, 2);
  const auto gen = build_generator(m.h_sys(), m.couplings, basis);
  const RVector w0 = product_initial_state(basis, {0, 0});
  for (auto _ : state) benchmark::DoNotOptimize(steady_state(gen.lambda, w0, basis));
}
BENCHMARK(BM_SteadyState)->Unit(benchmark::kMillisecond);

static void BM_EvaluatePoint(benchmark::State& state) {
  const auto m = presets::rb87_diamond();
  const OperatorBasis basis(4, 2);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_point(m, basis));
}
BENCHMARK(BM_EvaluatePoint)->Unit(benchmark::kMillisecond);

static void BM_Integrate(benchmark::State& state) {
  const auto m = presets::rb87_diamond();
  const OperatorBasis basis(4, 2);
  const auto gen = build_generator(m.h_sys(), m.couplings, basis);
  const RVector w0 = product_initial_state(basis, {0, 0});
  IntegrationOptions o;
  o.method = state.range(0) == 0 ? IntegrationMethod::Adaptive : IntegrationMethod::Exponential;
  for (auto _ : state) benchmark::DoNotOptimize(integrate(gen.lambda, w0, 100.0, o));
}
BENCHMARK(BM_Integrate)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_Diagonalize(benchmark::State& state) {
  const CMatrix h = presets::rb87_diamond().h_sys();
  const CMatrix s = swap_operator(4);
  for (auto _ : state) benchmark::DoNotOptimize(diagonalize(h, &s));
}
BENCHMARK(BM_Diagonalize);
BENCHMARK_MAIN();
