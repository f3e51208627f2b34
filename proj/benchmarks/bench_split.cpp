#include <benchmark/benchmark.h>

#include "smart/datagen.hpp"
#include "smart/forward.hpp"
#include "smart/tree.hpp"

namespace {

// Full candidate scan over all variables at varying n; expected to scale
// linearly in n at fixed model size.
void BM_BestSplit(benchmark::State& state) {
  auto n = static_cast<std::size_t>(state.range(0));
  smart::Dataset data = smart::gen_friedman1(n, 10, 5.0, 3);
  smart::ForwardConfig fwd;
  fwd.max_terms = 21;
  smart::NodeModel model = smart::forward_pass(data, fwd);
  smart::TreeConfig cfg;

  for (auto _ : state) {
    auto cand = smart::best_split(data, model, cfg, 17);
    benchmark::DoNotOptimize(cand);
  }
}

void BM_ForwardPass(benchmark::State& state) {
  auto n = static_cast<std::size_t>(state.range(0));
  smart::Dataset data = smart::gen_friedman1(n, 10, 5.0, 3);
  smart::ForwardConfig fwd;

  for (auto _ : state) {
    auto model = smart::forward_pass(data, fwd);
    benchmark::DoNotOptimize(model.coefficients.data());
  }
}

}  // namespace

BENCHMARK(BM_BestSplit)->Arg(2500)->Arg(5000)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ForwardPass)->Arg(1000)->Arg(2000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
