#include <random>

#include <benchmark/benchmark.h>

#include "bivmap/cartogram.hpp"
#include "bivmap/popchart.hpp"
#include "bivmap/scene.hpp"
#include "bivmap/stats.hpp"
#include "bivmap/techniques.hpp"
#include "fixtures.hpp"

namespace {

bivmap::DataMap grid_data(int nx, int ny) {
  std::mt19937_64 rng(1);
  return testkit::random_grid_data(rng, {nx, ny, 10.0, 0.15, 2});
}

void BM_ContiguousCartogram(benchmark::State& state) {
  const auto n = static_cast<int>(state.range(0));
  const auto data = grid_data(n, n);
  for (auto _ : state) benchmark::DoNotOptimize(bivmap::contiguous_cartogram(data));
  state.SetLabel(std::to_string(n * n) + " regions");
}
BENCHMARK(BM_ContiguousCartogram)->Arg(4)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

void BM_NonContiguousLayout(benchmark::State& state) {
  const auto data = grid_data(12, 8);
  for (auto _ : state) benchmark::DoNotOptimize(bivmap::noncontiguous_layout(data));
}
BENCHMARK(BM_NonContiguousLayout)->Unit(benchmark::kMillisecond);

void BM_KdeGrid(benchmark::State& state) {
  const testkit::Grid g{12, 8};
  std::mt19937_64 rng(3);
  const auto cities = testkit::random_cities(rng, g, static_cast<int>(state.range(1)));
  bivmap::BBox box;
  box.expand(bivmap::Point{0, 0});
  box.expand(bivmap::Point{120, 80});
  const auto res = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(bivmap::kde_grid(cities, 2.16, res, box));
}
BENCHMARK(BM_KdeGrid)->Args({256, 200})->Args({512, 200})->Args({256, 2000})->Unit(benchmark::kMillisecond);

void BM_BootstrapMean(benchmark::State& state) {
  std::mt19937_64 rng(4);
  std::bernoulli_distribution coin(0.7);
  std::vector<double> v(58);
  for (auto& x : v) x = coin(rng);
  const auto resamples = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(bivmap::bootstrap_mean_ci(v, resamples, 9));
}
BENCHMARK(BM_BootstrapMean)->Arg(2000)->Arg(10000)->Unit(benchmark::kMicrosecond);

void BM_WriteSvg(benchmark::State& state) {
  const auto data = grid_data(12, 8);
  bivmap::RegionTechniqueSpec spec;
  spec.technique = bivmap::Technique::prism3d;
  const auto scene = bivmap::render_region_map(data, spec);
  for (auto _ : state) benchmark::DoNotOptimize(bivmap::write_svg(scene));
}
BENCHMARK(BM_WriteSvg)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
