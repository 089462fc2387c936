// Copyright (C) 2026 The cubeprog Authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "cubeprog/executor.hpp"
#include "cubeprog/neural.hpp"
#include "cubeprog/program.hpp"

using namespace cubeprog;

namespace {

Mat<float> randomInputs(int rows, int cols) {
  Rng rng(5);
  Mat<float> m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<float>(standardNormal(rng));
  return m;
}

void BM_ForwardProgramNet(benchmark::State& state) {
  const NetSpec spec = programNetSpec(5, 4, static_cast<int>(state.range(0)));
  const Params p = initParams(spec, 1);
  const Mat<float> x = randomInputs(spec.inputDim, 32);
  for (auto _ : state) benchmark::DoNotOptimize(forward(p, x));
}
BENCHMARK(BM_ForwardProgramNet)->Arg(128)->Arg(1024)->Unit(benchmark::kMicrosecond);

void BM_GradientStepExecNet(benchmark::State& state) {
  const NetSpec spec = execNetSpec(6);
  const Params p = initParams(spec, 1);
  const int batch = static_cast<int>(state.range(0));
  const Mat<float> x = randomInputs(spec.inputDim, batch);
  std::vector<Mat<float>> t;
  for (const auto& h : spec.heads) t.push_back(Mat<float>::Zero(h.dim, batch));
  Params g;
  for (auto _ : state) benchmark::DoNotOptimize(lossAndGradient(p, x, t, g));
  state.SetItemsProcessed(state.iterations() * batch);
}
BENCHMARK(BM_GradientStepExecNet)->Arg(1)->Arg(64)->Unit(benchmark::kMicrosecond);

void BM_TrainEpochProgramNet(benchmark::State& state) {
  const Dataset data = makeProgramDataset(enumerateGoals(4, true), 4);
  const NetSpec spec = programNetSpec(4, 2, 128);
  TrainConfig c;
  c.epochs = 1;
  c.batchSize = 32;
  for (auto _ : state) benchmark::DoNotOptimize(train(spec, data, c));
}
BENCHMARK(BM_TrainEpochProgramNet)->Unit(benchmark::kMillisecond);

}  // namespace
