// Copyright (C) 2026 The cubeprog Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>

#include "cubeprog/error.hpp"
#include "cubeprog/executor.hpp"

namespace cubeprog {

namespace {

constexpr std::uint64_t kDisplaceStream = 0x6578656364617461ULL;

// A single clear cube moved to the table or onto another clear cube, chosen
// uniformly among the moves that change the relation tensor.
std::optional<WorldState> displaceOne(const WorldState& w, Rng& rng) {
  const std::size_t n = w.scene.n();
  std::vector<Action> moves;
  for (std::size_t c = 0; c < n; ++c) {
    bool clear = true;
    for (std::size_t y = 0; y < n; ++y)
      if (y != c && w.state.has(y, c, Rel::Above)) clear = false;
    if (!clear) continue;
    moves.push_back({static_cast<int>(c), std::nullopt, Rel::Above, false});
    for (std::size_t d = 0; d < n; ++d)
      if (d != c) moves.push_back({static_cast<int>(c), static_cast<int>(d), Rel::Above, false});
  }
  std::vector<WorldState> outcomes;
  Rng unused(0);
  for (const auto& m : moves) {
    try {
      WorldState next = applyAction(w, m, unused);
      if (!(next.state == w.state)) outcomes.push_back(std::move(next));
    } catch (const ActionRejected&) {
    }
  }
  if (outcomes.empty()) return std::nullopt;
  return outcomes[uniformIndex(rng, outcomes.size())];
}

}  // namespace

std::vector<ExecRecord> enumerateExecDataset(const ExecDatasetConfig& config) {
  if (config.nMin < 2 || config.nMax > 7 || config.nMin > config.nMax)
    throw ConfigError("exec dataset needs 2 <= nMin <= nMax <= 7");
  std::vector<ExecRecord> out;
  for (int n = config.nMin; n <= config.nMax; ++n) {
    const auto goals = enumerateGoals(n, false);
    for (std::size_t g = 0; g < goals.size(); ++g) {
      const Program& program = goals[g].program;
      WorldState w = flatWorld(static_cast<std::size_t>(n));
      Rng noFaults(0);
      std::vector<WorldState> path;
      for (;;) {
        const Action a = nextActionOracle(program, w.state);
        out.push_back({program, w.state, a});
        if (a.done) break;
        path.push_back(w);
        w = applyAction(w, a, noFaults);
      }
      if (!config.displaced) continue;
      for (std::size_t k = 0; k < path.size(); ++k) {
        Rng rng = makeRng(config.seed, kDisplaceStream + static_cast<std::uint64_t>(n),
                          (static_cast<std::uint64_t>(g) << 8) | k);
        if (auto d = displaceOne(path[k], rng))
          out.push_back({program, d->state, nextActionOracle(program, d->state)});
      }
    }
  }
  return out;
}

std::size_t execInputDim(std::size_t nMax) {
  return 2 * (nMax - 1) * (nMax + 1) + 2 * (nMax - 1) + nMax * nMax * kRelChannels;
}

std::size_t execOutputDim(std::size_t nMax) { return nMax + (nMax + 1) + 2 + 1; }

NetSpec execNetSpec(std::size_t nMax, int hiddenLayers, int width) {
  if (nMax < 2) throw ConfigError("exec net needs nMax >= 2");
  NetSpec spec;
  spec.inputDim = static_cast<int>(execInputDim(nMax));
  spec.hidden.assign(hiddenLayers, width);
  spec.heads = {{static_cast<int>(execOutputDim(nMax)), LossKind::MSE}};
  spec.pathing = Pathing::Shared;
  spec.validate();
  return spec;
}

std::vector<float> encodeExecInput(const Program& program, const StateTensor& state,
                                   std::size_t nMax) {
  if (state.n() > nMax) throw ShapeError("state has more objects than the exec net supports");
  std::vector<float> x = programToTensor(program, nMax).flatten();
  const auto s = state.flattenPadded(nMax);
  x.insert(x.end(), s.begin(), s.end());
  return x;
}

std::vector<float> encodeAction(const Action& a, std::size_t nMax) {
  std::vector<float> y(execOutputDim(nMax), 0.0f);
  if (a.done) {
    y.back() = 1.0f;
    return y;
  }
  if (a.source < 0 || static_cast<std::size_t>(a.source) >= nMax)
    throw ShapeError("action source outside the encoded range");
  y[a.source] = 1.0f;
  const std::size_t target = a.target ? static_cast<std::size_t>(*a.target) : nMax;
  if (target > nMax) throw ShapeError("action target outside the encoded range");
  y[nMax + target] = 1.0f;
  y[2 * nMax + 1 + (a.rel == Rel::Left ? 1 : 0)] = 1.0f;
  return y;
}

Action decodeAction(const float* out, std::size_t nMax) {
  if (out[execOutputDim(nMax) - 1] >= 0.5f) return Action::finished();
  const float* src = out;
  const float* tgt = out + nMax;
  const float* rel = out + 2 * nMax + 1;
  Action a;
  a.source = static_cast<int>(std::max_element(src, src + nMax) - src);
  const auto t = static_cast<std::size_t>(std::max_element(tgt, tgt + nMax + 1) - tgt);
  if (t < nMax) a.target = static_cast<int>(t);
  a.rel = rel[1] > rel[0] ? Rel::Left : Rel::Above;
  return a;
}

Dataset makeExecDataset(const std::vector<ExecRecord>& records, std::size_t nMax) {
  const auto inDim = static_cast<Eigen::Index>(execInputDim(nMax));
  const auto outDim = static_cast<Eigen::Index>(execOutputDim(nMax));
  const auto count = static_cast<Eigen::Index>(records.size());
  Dataset d;
  d.inputs.resize(inDim, count);
  d.targets = {Mat<float>(outDim, count)};
  for (Eigen::Index c = 0; c < count; ++c) {
    const auto& r = records[c];
    const auto x = encodeExecInput(r.program, r.state, nMax);
    const auto y = encodeAction(r.action, nMax);
    d.inputs.col(c) = Eigen::Map<const Vec<float>>(x.data(), inDim);
    d.targets[0].col(c) = Eigen::Map<const Vec<float>>(y.data(), outDim);
  }
  return d;
}

double evalExecNet(const Params& params, const Dataset& data, std::size_t nMax) {
  if (params.spec.inputDim != static_cast<int>(execInputDim(nMax)) || params.spec.heads.size() != 1 ||
      params.spec.heads[0].dim != static_cast<int>(execOutputDim(nMax)))
    throw ConfigError("network shape does not match an exec net for nMax = " +
                      std::to_string(nMax));
  if (data.size() == 0) throw EmptyInput("empty exec dataset");
  const auto out = predictBatched(params, data.inputs);
  std::size_t ok = 0;
  for (Eigen::Index c = 0; c < data.inputs.cols(); ++c) {
    const Vec<float> pred = out[0].col(c);
    const Vec<float> truth = data.targets[0].col(c);
    ok += decodeAction(pred.data(), nMax) == decodeAction(truth.data(), nMax);
  }
  return static_cast<double>(ok) / data.size();
}

Policy learnedPolicy(Params params, std::size_t nMax) {
  return [params = std::move(params), nMax](const Program& program, const StateTensor& state) {
    const auto x = encodeExecInput(program, state, nMax);
    const Mat<float> in = Eigen::Map<const Mat<float>>(x.data(), params.spec.inputDim, 1);
    const auto out = predict(params, in);
    return decodeAction(out[0].data(), nMax);
  };
}

}  // namespace cubeprog
