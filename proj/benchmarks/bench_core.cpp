#include <benchmark/benchmark.h>

#include <memory>
#include <random>
#include <vector>

#include "warpcheck/flow.hpp"
#include "warpcheck/functionals.hpp"
#include "warpcheck/symfunc.hpp"

using namespace warpcheck;

namespace {

std::shared_ptr<const WarpedProduct> h(int n) { return std::make_shared<const WarpedProduct>(make_space_form(-1, n)); }

RadialGraph graph(int n_mu) {
  const std::vector<std::pair<int, double>> modes{{2, 0.05}, {3, 0.02}};
  return build_perturbed_graph(h(2), 1.0, modes, GridSpec::sphere(n_mu, 2 * n_mu));
}

}  // namespace

static void BM_EvalPm(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> d(-1.0, 2.0);
  std::vector<double> x(static_cast<std::size_t>(state.range(0)));
  for (auto& v : x) v = d(rng);
  const Spectrum s(x);
  for (auto _ : state) benchmark::DoNotOptimize(eval_pm(s, static_cast<int>(x.size()) / 2));
}
BENCHMARK(BM_EvalPm)->Arg(2)->Arg(6);

static void BM_Geometry(benchmark::State& state) {
  const RadialGraph g = graph(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(compute_geometry(g));
}
BENCHMARK(BM_Geometry)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_EmbeddedGeometry(benchmark::State& state) {
  const RadialGraph g = graph(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(compute_geometry_embedded(g));
}
BENCHMARK(BM_EmbeddedGeometry)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_HkDeficit(benchmark::State& state) {
  const Surface s(graph(32));
  for (auto _ : state) benchmark::DoNotOptimize(hk_deficit(s, 0.5));
}
BENCHMARK(BM_HkDeficit)->Unit(benchmark::kMillisecond);

static void BM_FlowStep(benchmark::State& state) {
  const FlowState st = make_flow_state(graph(16));
  for (auto _ : state) benchmark::DoNotOptimize(flow_step(st, FlowSpeed{}, 0.01));
}
BENCHMARK(BM_FlowStep)->Unit(benchmark::kMillisecond);

static void BM_VerifyEvolution(benchmark::State& state) {
  const FlowState st = make_flow_state(graph(16));
  for (auto _ : state) benchmark::DoNotOptimize(verify_evolution(st, FlowSpeed{}, 2e-5, 0.5));
}
BENCHMARK(BM_VerifyEvolution)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
