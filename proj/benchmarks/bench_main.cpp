#include <benchmark/benchmark.h>

#include <random>

#include "sflow/densify.hpp"
#include "sflow/geodesic.hpp"
#include "sflow/recombination.hpp"
#include "sflow/synthgen.hpp"

using namespace sflow;

namespace {

SceneSpec benchScene(int w, int h) {
  SceneSpec spec;
  spec.width = w;
  spec.height = h;
  spec.rig = {500.0, 500.0, w / 2.0, h / 2.0, 0.5};
  RegionSpec bg;
  bg.polygon = {{-1.0, -1.0}, {w + 1.0, -1.0}, {w + 1.0, h + 1.0}, {-1.0, h + 1.0}};
  bg.plane = {0.01, 0.0, 20.0};
  bg.translation[0] = 0.1;
  RegionSpec fg;
  fg.polygon = {{w * 0.3, h * 0.3}, {w * 0.7, h * 0.3}, {w * 0.7, h * 0.7}, {w * 0.3, h * 0.7}};
  fg.plane = {0.0, 0.01, 40.0};
  fg.translation[0] = -0.05;
  spec.regions = {bg, fg};
  return spec;
}

void BM_WarpDisparity(benchmark::State& state) {
  int w = 1242, h = 375;
  SynthBundle b = render(benchScene(w, h));
  for (auto _ : state) {
    DisparityMap warped = warpDisparity(b.d_next_frame, b.flow);
    benchmark::DoNotOptimize(warped);
  }
  state.SetItemsProcessed(state.iterations() * w * h);
}
BENCHMARK(BM_WarpDisparity);

void BM_GeodesicField(benchmark::State& state) {
  int w = 256, h = 256;
  EdgeCostMap cost(w, h);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uc(0.0, 1.0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) cost.set(x, y, uc(rng));
  std::vector<PixelCoord> seeds;
  for (int y = 2; y < h; y += 9)
    for (int x = 3; x < w; x += 9) seeds.push_back({x, y});
  for (auto _ : state) {
    GeodesicField field(seeds, cost, static_cast<int>(state.range(0)), 0.01);
    benchmark::DoNotOptimize(field);
  }
}
BENCHMARK(BM_GeodesicField)->Arg(10)->Arg(25);

void BM_DensifyFull(benchmark::State& state) {
  SynthBundle b = render(benchScene(128, 128));
  sparsify(b, 0.3, 99);
  SceneFlowImage sparse = combine(b.d_t, b.flow, warpDisparity(b.d_next_frame, b.flow));
  CameraRig rig{500.0, 500.0, 64.0, 64.0, 0.5};
  DensifyParams params;
  for (auto _ : state) {
    SceneFlowImage dense = densify(sparse, b.edges, rig, params);
    benchmark::DoNotOptimize(dense);
  }
}
BENCHMARK(BM_DensifyFull);

}  // namespace

BENCHMARK_MAIN();
