#include <benchmark/benchmark.h>

#include <cstdlib>
#include <random>

#include "apsim/ap_ops.hpp"
#include "apsim/simulator.hpp"

using namespace apsim;

namespace {

const bool kDataDirSet = [] { return setenv("APSIM_DATA_DIR", APSIM_BENCH_DATA_DIR, 0) == 0; }();

std::vector<std::int64_t> random_words(std::size_t n, unsigned m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::int64_t> d(0, (std::int64_t{1} << m) - 1);
  std::vector<std::int64_t> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

// Functional emulation: one lane-parallel multiply on a full 4800-row array.
void BM_EmulateMultiply(benchmark::State& state) {
  const auto m = static_cast<unsigned>(state.range(0));
  const auto a = random_words(4800, m, 1);
  const auto b = random_words(4800, m, 2);
  for (auto _ : state) benchmark::DoNotOptimize(multiply(a, b, m, ApVariant::ap2d));
  state.SetItemsProcessed(state.iterations() * 4800);
}
BENCHMARK(BM_EmulateMultiply)->Arg(2)->Arg(4)->Arg(8);

void BM_EmulateMatmat(benchmark::State& state) {
  const auto j = static_cast<std::size_t>(state.range(0));
  IntMatrix k(4, j);
  IntMatrix p(j, 4);
  k.data = random_words(4 * j, 8, 3);
  p.data = random_words(4 * j, 8, 4);
  for (auto _ : state) benchmark::DoNotOptimize(matmat(k, p, 8, ApVariant::ap2d));
}
BENCHMARK(BM_EmulateMatmat)->Arg(9)->Arg(64)->Arg(288);

void BM_AnalyticTrace(benchmark::State& state) {
  OpParams p;
  p.m = 8;
  p.i = 1;
  p.j = 576;
  p.u = 8;
  for (auto _ : state) benchmark::DoNotOptimize(analytic_trace(OpKind::matmat, p, ApVariant::ap2d));
}
BENCHMARK(BM_AnalyticTrace);

void BM_PlanLr(benchmark::State& state) {
  const auto model = resolve_model("vgg16");
  const auto precision = fixed_precision(8);
  for (auto _ : state) benchmark::DoNotOptimize(plan_lr(model, precision));
}
BENCHMARK(BM_PlanLr);

void BM_SimulateResnet50(benchmark::State& state) {
  const auto model = resolve_model("resnet50");
  const auto precision = fixed_precision(8);
  SimConfig cfg;
  cfg.hw.mode = state.range(0) == 0 ? HwMode::lr : HwMode::ir;
  for (auto _ : state) benchmark::DoNotOptimize(simulate(model, precision, cfg));
}
BENCHMARK(BM_SimulateResnet50)->Arg(0)->Arg(1);

void BM_SweepPrecisionByTech(benchmark::State& state) {
  SweepSpec spec;
  apply_axis(spec, "model=vgg16");
  apply_axis(spec, "precision=fixed:2..8");
  apply_axis(spec, "tech=sram16nm,reram16nm");
  spec.threads = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(sweep(spec));
}
BENCHMARK(BM_SweepPrecisionByTech)->Arg(1)->Arg(4)->UseRealTime();

}  // namespace
BENCHMARK_MAIN();
