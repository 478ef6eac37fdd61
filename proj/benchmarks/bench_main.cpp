#include <benchmark/benchmark.h>

#include <vector>

#include "distrep/divergence.hpp"
#include "distrep/fit.hpp"
#include "distrep/harness/oracle.hpp"
#include "distrep/harness/rng.hpp"
#include "distrep/harness/suites.hpp"
#include "distrep/harness/synth.hpp"
#include "distrep/postproc.hpp"

namespace {

using namespace distrep;

Gaussian2D random_gaussian(harness::Rng& rng) {
  return {rng.uniform(-20, 20), rng.uniform(-20, 20), rng.uniform(0.5, 8), rng.uniform(0.5, 8),
          rng.uniform(-0.9, 0.9)};
}

void BM_SymKl(benchmark::State& state) {
  harness::Rng rng(1);
  const Gaussian2D p = random_gaussian(rng);
  const Gaussian2D q = random_gaussian(rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sym_kl(p, q));
  }
}
BENCHMARK(BM_SymKl);

void BM_FitGaussian(benchmark::State& state) {
  std::vector<PixelCoord> px;
  const int side = static_cast<int>(state.range(0));
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) px.push_back({x, y});
  }
  const PixelSet set(px);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_gaussian(set));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(px.size()));
}
BENCHMARK(BM_FitGaussian)->Arg(8)->Arg(32)->Arg(128);

void BM_DivergenceNms(benchmark::State& state) {
  harness::Rng rng(2);
  std::vector<Detection> dets;
  for (int i = 0; i < state.range(0); ++i) {
    dets.push_back({random_gaussian(rng), rng.uniform_int(1, 3), rng.uniform()});
  }
  NmsConfig cfg;
  cfg.default_tau = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(divergence_nms(dets, cfg));
  }
}
BENCHMARK(BM_DivergenceNms)->Arg(10)->Arg(100)->Arg(1000);

void BM_ClusterPixels(benchmark::State& state) {
  auto spec = harness::separated_suite();
  spec.num_scenes = 1;
  const Scene scene = harness::synth_scenes(spec)[0];
  harness::OracleOptions opts;
  opts.scale = static_cast<int>(state.range(0));
  opts.n = 2;
  const auto grid = harness::oracle_grid(scene, opts);
  NmsConfig cfg;
  cfg.default_tau = 1.0;
  const auto kept = divergence_nms(detections_from_grid(grid), cfg);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cluster_pixels(grid, kept, scene.width, scene.height));
  }
}
BENCHMARK(BM_ClusterPixels)->Arg(1)->Arg(4);

}  // namespace

BENCHMARK_MAIN();
