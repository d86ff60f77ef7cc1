// Serial vs OpenMP factor advance, and naive vs improved event loop.

#include "sli/kernels.hpp"
#include "sli/particle_system.hpp"

#include <benchmark/benchmark.h>

#include <vector>

namespace sli {
namespace {

Model default_model() {
  ModelParams p;
  return make_linear_decay_model(p);
}

struct Particles {
  std::vector<int> xs;
  std::vector<double> ys;
  std::vector<double> t_last;
  std::vector<Rng> streams;

  explicit Particles(std::size_t n) : xs(n, 0), ys(n, 1.0), t_last(n, 0.0) {
    for (std::size_t i = 0; i < n; ++i) streams.push_back(make_stream(1, i, StreamRole::brownian));
  }
};

template <bool Omp>
void BM_AdvanceFactors(benchmark::State& state) {
  const auto model = default_model();
  const FactorDynamics dyn = CirDynamics{};
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    state.PauseTiming();
    Particles p(n);
    state.ResumeTiming();
    if constexpr (Omp) {
      kernels::advance_factors_omp(dyn, model.intensity, p.xs, p.ys, p.t_last, p.streams, 0.1, 0.01);
    } else {
      kernels::advance_factors_serial(dyn, model.intensity, p.xs, p.ys, p.t_last, p.streams, 0.1,
                                      0.01);
    }
    benchmark::DoNotOptimize(p.ys.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AdvanceFactors<false>)->Name("advance/serial")->Arg(10000)->Arg(100000);
BENCHMARK(BM_AdvanceFactors<true>)->Name("advance/omp")->Arg(10000)->Arg(100000);

template <Algorithm A>
void BM_System(benchmark::State& state) {
  EngineOptions opt;
  opt.n = static_cast<std::size_t>(state.range(0));
  opt.algorithm = A;
  for (auto _ : state) {
    auto res = run_system(default_model(), CirDynamics{}, opt, 8);
    benchmark::DoNotOptimize(res.stats.accepted);
  }
}
BENCHMARK(BM_System<Algorithm::naive>)
    ->Name("system/naive")
    ->Arg(1000)
    ->Arg(2000)
    ->Arg(4000)
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_System<Algorithm::improved>)
    ->Name("system/improved")
    ->Arg(1000)
    ->Arg(2000)
    ->Arg(4000)
    ->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace sli

BENCHMARK_MAIN();
