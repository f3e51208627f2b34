#include <benchmark/benchmark.h>

#include <vector>

#include "smart/qr.hpp"
#include "smart/rng.hpp"

namespace {

// Cost of streaming n random rows into a p-column factor.
void BM_TriangularUpdate(benchmark::State& state) {
  auto n = static_cast<std::size_t>(state.range(0));
  auto p = static_cast<std::size_t>(state.range(1));
  smart::Rng rng(7);
  std::vector<double> rows(n * p);
  std::vector<double> ys(n);
  for (auto& v : rows) v = rng.normal();
  for (auto& y : ys) y = rng.normal();

  for (auto _ : state) {
    smart::TriangularFactor factor(p);
    for (std::size_t i = 0; i < n; ++i)
      factor.update({rows.data() + i * p, p}, ys[i]);
    benchmark::DoNotOptimize(factor.fit_rss());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(n));
}

void BM_BatchSolve(benchmark::State& state) {
  auto n = static_cast<std::size_t>(state.range(0));
  auto p = static_cast<std::size_t>(state.range(1));
  smart::Rng rng(11);
  std::vector<double> X(n * p);
  std::vector<double> Y(n);
  for (auto& v : X) v = rng.normal();
  for (auto& y : Y) y = rng.normal();

  for (auto _ : state) {
    auto fit = smart::batch_ols(X, Y, n, p);
    benchmark::DoNotOptimize(fit.coefficients.data());
  }
}

}  // namespace

BENCHMARK(BM_TriangularUpdate)
    ->Args({1000, 8})
    ->Args({1000, 16})
    ->Args({1000, 32})
    ->Args({10000, 16});
BENCHMARK(BM_BatchSolve)->Args({1000, 16})->Args({10000, 16});
