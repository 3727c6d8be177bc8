#include <benchmark/benchmark.h>

#include <vector>

#include "beamqe/point_set.hpp"
#include "beamqe/quadrature.hpp"
#include "beamqe/superposition.hpp"

using namespace beamqe;

namespace {

BeamSuperposition fibonacci_superposition(int N, double D) {
  const auto ps = generate(PointKind::fibonacci, choose_m(N, D));
  const auto cert = verify(ps);
  BuildOptions options;
  options.certificate = &cert;
  return BeamSuperposition::build(N, D, ps, options);
}

void BM_EvalGrid(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const auto F = fibonacci_superposition(N, 2.0);
  const auto grid = generate(PointKind::fibonacci, 1 << 16);
  for (auto _ : state) benchmark::DoNotOptimize(F.eval_grid(grid.points()));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(grid.m() * F.m()));
}
BENCHMARK(BM_EvalGrid)->Arg(64)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_SupNorm(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const auto F = fibonacci_superposition(N, 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(sup_norm(F));
}
BENCHMARK(BM_SupNorm)->Arg(64)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_MaxCircleCount(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const auto ps = generate(PointKind::fibonacci, m);
  for (auto _ : state) benchmark::DoNotOptimize(max_circle_count(ps, 1.0 / double(m)));
}
BENCHMARK(BM_MaxCircleCount)->Arg(64)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_SphereRule(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(SphereRule(d));
}
BENCHMARK(BM_SphereRule)->Arg(128)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
