#include <benchmark/benchmark.h>

#include <cmath>

#include "thermodtn/dtn_assembly.hpp"
#include "thermodtn/oracle.hpp"
#include "thermodtn/reconstruction.hpp"

using namespace thermodtn;
using C = Complex;

namespace {

MaterialJet<C> material(const SpacePtr& sp, double omega) {
  const int n = sp->nx();
  const auto xn = TaylorJet<C>::x_coordinate(sp, n - 1);
  const auto x0 = TaylorJet<C>::x_coordinate(sp, 0);
  auto k = [&](double v) { return TaylorJet<C>::constant(sp, C(v)); };
  return {k(0.7) + xn * C(0.2) + x0 * C(0.1), k(1.3) - xn * xn * C(0.1), k(0.9) + xn * C(0.3), k(1.0) + xn * C(0.4),
          1.1, omega, 1.3, 0.8};
}

MetricJet<C> warped(const SpacePtr& sp) {
  const int n = sp->nx();
  const auto xn = TaylorJet<C>::x_coordinate(sp, n - 1);
  const auto x0 = TaylorJet<C>::x_coordinate(sp, 0);
  return MetricJet<C>::warped(n, TaylorJet<C>::constant(sp, C(1.2)) + xn * C(0.3) + x0 * xn * C(0.2));
}

void BM_BuildTable(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0)), depth = static_cast<int>(state.range(1));
  auto sp = make_x_space(n, depth);
  const auto g = warped(sp);
  const auto m = material(sp, 0.3);
  const std::vector<double> xi = n == 2 ? std::vector<double>{1.3} : std::vector<double>{0.6, -0.9};
  for (auto _ : state) {
    const auto ctx = make_context(g, m, xi, depth);
    benchmark::DoNotOptimize(build_table(ctx, depth));
  }
}
BENCHMARK(BM_BuildTable)->Args({2, 2})->Args({2, 4})->Args({3, 2})->Args({3, 4})->Unit(benchmark::kMillisecond);

void BM_HalfspaceMultiplier(benchmark::State& state) {
  auto sp = make_x_space(3, 1);
  auto k = [&](double v) { return TaylorJet<C>::constant(sp, C(v)); };
  const MaterialJet<C> m{k(0.7), k(1.3), k(0.9), k(1.0), 1.1, 0.2, 1.3, 0.8};
  for (auto _ : state) benchmark::DoNotOptimize(halfspace_multiplier(m, {3.0, 4.0}));
}
BENCHMARK(BM_HalfspaceMultiplier);

void BM_SlabDtn(benchmark::State& state) {
  auto sp = make_x_space(2, 2);
  const auto m = material(sp, 0.3);
  const double t = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(slab_dtn(m, {t}));
}
BENCHMARK(BM_SlabDtn)->Arg(8)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_LayerStrip(benchmark::State& state) {
  const int depth = static_cast<int>(state.range(0));
  auto sp = make_x_space(2, depth + 1);
  const auto xn = TaylorJet<C>::x_coordinate(sp, 1);
  auto k = [&](double v) { return TaylorJet<C>::constant(sp, C(v)); };
  const MaterialJet<C> m{k(0.7) + xn * C(0.2), k(1.3) - xn * C(0.1), k(0.9) + xn * C(0.3), k(1.0) + xn * C(0.4),
                         1.1, 0.3, 1.3, 0.8};
  std::vector<std::vector<double>> cov;
  for (int i = 0; i < 8; ++i) cov.push_back({(i % 2 ? -1.0 : 1.0) * (1.0 + 0.25 * i)});
  const auto pr = make_problem(MetricJet<C>::euclidean(2, depth + 1), m, cov, depth);
  for (auto _ : state) benchmark::DoNotOptimize(layer_strip(pr, depth));
}
BENCHMARK(BM_LayerStrip)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
