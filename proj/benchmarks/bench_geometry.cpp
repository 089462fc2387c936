// Copyright (C) 2026 The cubeprog Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "cubeprog/beliefmap.hpp"
#include "cubeprog/geometry.hpp"

using namespace cubeprog;

namespace {

GeneratedScene sceneOf(int n) {
  Rng rng(42);
  SceneGenConfig c;
  c.nMin = c.nMax = n;
  return randomizeScene(rng, c);
}

void BM_RandomizeScene(benchmark::State& state) {
  Rng rng(1);
  SceneGenConfig c;
  c.nMin = c.nMax = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(randomizeScene(rng, c));
}
BENCHMARK(BM_RandomizeScene)->Arg(2)->Arg(5);

void BM_ProjectScene(benchmark::State& state) {
  const GeneratedScene g = sceneOf(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(projectScene(g.scene, g.camera));
}
BENCHMARK(BM_ProjectScene)->Arg(2)->Arg(5);

void BM_GroundTruthRelations(benchmark::State& state) {
  const GeneratedScene g = sceneOf(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(groundTruthRelations(g.scene));
}
BENCHMARK(BM_GroundTruthRelations)->Arg(2)->Arg(5);

void BM_GroundTruthMaps(benchmark::State& state) {
  const std::vector<Vec2> v(7, Vec2(180.2, 211.7));
  for (auto _ : state) benchmark::DoNotOptimize(makeGroundTruthMaps(v));
}
BENCHMARK(BM_GroundTruthMaps);

void BM_SoftArgmax(benchmark::State& state) {
  const std::vector<Vec2> v = {Vec2(180.2, 211.7)};
  const auto gt = makeGroundTruthMaps(v);
  for (auto _ : state) benchmark::DoNotOptimize(softArgmax(gt.maps[0]));
}
BENCHMARK(BM_SoftArgmax);

}  // namespace
