#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "perronlab/correct_factors.hpp"
#include "perronlab/maximal.hpp"
#include "perronlab/perron.hpp"
#include "perronlab/raster.hpp"
#include "perronlab/union_area.hpp"

using namespace perronlab;

namespace {

std::vector<ConvexPolygon> random_rects(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<ConvexPolygon> out;
  for (std::size_t i = 0; i < count; ++i) {
    const Rect r = Rect::from_sides(0.1 + u(rng), 0.05 + 0.5 * u(rng), 3.0 * u(rng));
    out.push_back(r.polygon({4.0 * u(rng), 4.0 * u(rng)}));
  }
  return out;
}

// Rectangles through the origin, for the star-shaped union.
std::vector<ConvexPolygon> star_rects(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<ConvexPolygon> out;
  for (std::size_t i = 0; i < count; ++i) {
    const Rect r = Rect::from_sides(0.1 + u(rng), 0.05 + 0.5 * u(rng), 3.0 * u(rng));
    out.push_back(r.polygon({0.04 * (u(rng) - 0.5), 0.04 * (u(rng) - 0.5)}));
  }
  return out;
}

void BM_UnionAreaStar(benchmark::State& state) {
  const auto ps = star_rects(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(union_area_star(ps));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_UnionAreaStar)->RangeMultiplier(4)->Range(16, 1024)->Complexity();

void BM_UnionAreaGrid(benchmark::State& state) {
  const auto ps = random_rects(64, 2);
  const Box window{-1.0, -1.0, 5.0, 5.0};
  for (auto _ : state) benchmark::DoNotOptimize(union_area_grid(ps, window, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_UnionAreaGrid)->Arg(256)->Arg(1024);

void BM_BuildBlock(benchmark::State& state) {
  const SlopeSequence b = SlopeSequence::power(1.0, 1024);
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_block(b, n).eps_measured);
}
BENCHMARK(BM_BuildBlock)->DenseRange(3, 9, 2)->Unit(benchmark::kMillisecond);

void BM_CorrectFactor(benchmark::State& state) {
  const RectSequence seq = nested_similar_family(static_cast<std::size_t>(state.range(0)), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(correct_factor(seq, 0).q_hi);
}
BENCHMARK(BM_CorrectFactor)->Arg(8)->Arg(32);

void BM_MaximalOperator(benchmark::State& state) {
  const int res = static_cast<int>(state.range(0));
  const RectSequence seq = nested_similar_family(4, 1.0);
  const RasterGrid grid{window_for({-0.75, -0.75, 0.75, 0.75}, seq.rects), res, res};
  std::mt19937_64 rng(3);
  const RasterField f = random_simple_function(rng, grid, {-0.75, -0.75, 0.75, 0.75}, 5);
  const MaximalOperator op(grid, seq.rects);
  for (auto _ : state) benchmark::DoNotOptimize(op.apply(f).values.data());
}
BENCHMARK(BM_MaximalOperator)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_Rasterize(benchmark::State& state) {
  const auto ps = random_rects(64, 4);
  const Box window{-1.0, -1.0, 5.0, 5.0};
  for (auto _ : state) benchmark::DoNotOptimize(rasterize(ps, window, static_cast<int>(state.range(0))).values.data());
}
BENCHMARK(BM_Rasterize)->Arg(512)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
