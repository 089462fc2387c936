// Copyright (C) 2026 The cubeprog Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>

#include <benchmark/benchmark.h>

#include "cubeprog/executor.hpp"
#include "cubeprog/program.hpp"
#include "cubeprog/relationship.hpp"

using namespace cubeprog;

namespace {

void BM_BuildStateOracle(benchmark::State& state) {
  Rng rng(3);
  SceneGenConfig c;
  c.nMin = c.nMax = static_cast<int>(state.range(0));
  const GeneratedScene g = randomizeScene(rng, c);
  const auto proj = projectScene(g.scene, g.camera);
  const PairScorer scorer = oracleScorer(groundTruthRelations(g.scene));
  for (auto _ : state) benchmark::DoNotOptimize(thresholdState(buildState(proj, scorer)));
}
BENCHMARK(BM_BuildStateOracle)->Arg(2)->Arg(5);

void BM_BuildStateNet(benchmark::State& state) {
  Rng rng(3);
  SceneGenConfig c;
  c.nMin = c.nMax = 5;
  const GeneratedScene g = randomizeScene(rng, c);
  const auto proj = projectScene(g.scene, g.camera);
  const PairScorer scorer = netScorer(initParams(relNetSpec(), 1));
  for (auto _ : state) benchmark::DoNotOptimize(buildState(proj, scorer));
}
BENCHMARK(BM_BuildStateNet);

void BM_SynthesizeAllGoals(benchmark::State& state) {
  const auto goals = enumerateGoals(static_cast<int>(state.range(0)), true);
  for (auto _ : state)
    for (const auto& g : goals) benchmark::DoNotOptimize(synthesizeProgram(g.goal));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(goals.size()));
}
BENCHMARK(BM_SynthesizeAllGoals)->Arg(4)->Arg(5);

void BM_EnumerateGoals(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(enumerateGoals(static_cast<int>(state.range(0)), true));
}
BENCHMARK(BM_EnumerateGoals)->Arg(4)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_ClosedLoopOracle(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto goals = enumerateGoals(n, false);
  const Program& program =
      std::max_element(goals.begin(), goals.end(), [](const auto& a, const auto& b) {
        return a.program.steps.size() < b.program.steps.size();
      })->program;
  const WorldState world = flatWorld(static_cast<std::size_t>(n));
  FaultConfig faults;
  faults.actionFailureProb = 0.2;
  Rng rng(9);
  for (auto _ : state)
    benchmark::DoNotOptimize(runClosedLoop(program, world, oraclePolicy(), faults, rng, 2 * n * n));
}
BENCHMARK(BM_ClosedLoopOracle)->Arg(3)->Arg(5);

}  // namespace
