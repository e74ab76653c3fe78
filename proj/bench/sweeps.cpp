#include <benchmark/benchmark.h>

#include "ermakov/linearize.hpp"
#include "ermakov/poisson.hpp"
#include "ermakov/sampling.hpp"
#include "ermakov/systems.hpp"
#include "ermakov/verify.hpp"

using namespace ermakov;

namespace {

FuncHandle fexpr(const char* text) { return FuncHandle::from_expr(parse(text)); }

Execution mode(const benchmark::State& state) {
  return state.range(1) == 0 ? Execution::Serial : Execution::Parallel;
}

void set_label(benchmark::State& state) {
  state.SetLabel(state.range(1) == 0 ? "serial" : "openmp");
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_JacobiClass1(benchmark::State& state) {
  const MatrixField field = class1_field(fexpr("sin(theta)*alpha"));
  const auto states = sample_states(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(jacobi_sweep(field, states, 1e-5, mode(state)).max);
  set_label(state);
}

void BM_JacobiClass2(benchmark::State& state) {
  const MatrixField field = class2_field(fexpr("1 + alpha^2"), parse("r*theta"));
  const auto states = sample_states(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(jacobi_sweep(field, states, 1e-5, mode(state)).max);
  set_label(state);
}

void BM_Flow(benchmark::State& state) {
  const auto spec = SystemSpec::class2(parse("cos(theta)"), fexpr("2 + r"), parse("r*theta"));
  const auto states = sample_states(static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(flow_sweep(spec, states, mode(state)).max);
  set_label(state);
}

void BM_Affinity(benchmark::State& state) {
  const FuncHandle phi = build_phi_from_potential(Potential::from_expr(parse("1/(2*rbar^2)")));
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(affinity_test(phi, 0.0, 0.0, {0.5, 2.0}, {-1.0, 1.0}, n, 1e-8, mode(state)).residual);
  }
  state.SetLabel(state.range(1) == 0 ? "serial" : "openmp");
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

}  // namespace

BENCHMARK(BM_JacobiClass1)->ArgsProduct({{1000, 4000}, {0, 1}})->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_JacobiClass2)->ArgsProduct({{1000, 4000}, {0, 1}})->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Flow)->ArgsProduct({{1000, 4000}, {0, 1}})->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Affinity)->ArgsProduct({{32, 128}, {0, 1}})->UseRealTime()->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
