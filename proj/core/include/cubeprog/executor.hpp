// Copyright (C) 2026 The cubeprog Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cubeprog/geometry.hpp"
#include "cubeprog/neural.hpp"
#include "cubeprog/program.hpp"
#include "cubeprog/rng.hpp"
#include "cubeprog/state_tensor.hpp"

namespace cubeprog {

/// One closed-loop step. An empty target means "the table".
struct Action {
  int source = -1;
  std::optional<int> target;
  Rel rel = Rel::Above;
  bool done = false;

  static Action finished() { return {-1, std::nullopt, Rel::Above, true}; }
  friend bool operator==(const Action&, const Action&) = default;
};

std::string describe(const Action& a, const std::vector<std::string>& objectNames = {});

struct WorldState {
  Scene scene;
  StateTensor state;  // always groundTruthRelations(scene)
  int stepCount = 0;
};

/// Table slots run along +x at `slotPitch` edges apart, centered on the
/// origin; there are 2n + 2 slots so a free one always exists.
inline constexpr double kSlotPitch = 4.0;

/// n cubes (colorIds 0..n-1), each alone on the table, yaw 0. With a
/// permutation, cube i starts in slot slotOrder[i].
WorldState flatWorld(std::size_t n, const std::vector<std::size_t>& slotOrder = {},
                     double edge = kDefaultEdge);
WorldState makeWorld(Scene scene);

struct Perturbation {
  int atStep = 0;               // after the action with this step index
  int cube = 0;
  std::optional<int> onto;      // empty: a free table slot
};

struct FaultConfig {
  double actionFailureProb = 0.0;
  std::vector<int> failAtSteps;  // step indices that fail deterministically
  std::optional<Perturbation> perturbation;

  void validate() const;
};

/// Places the source on the target's top (centered over a Left pair when
/// the target has a clear Left partner), directly on the target's -x side,
/// or in the first free table slot. Faults: the action may silently do
/// nothing; a scripted perturbation fires after the matching step. Throws
/// ActionRejected for physically impossible actions; the world is left
/// untouched in that case.
WorldState applyAction(const WorldState& world, const Action& action, Rng& rng,
                       const FaultConfig& faults = {},
                       std::vector<std::string>* events = nullptr);

/// The goal a program builds from a flat table. Throws ActionRejected or
/// ReferenceError if it cannot be executed.
StateTensor programGoal(const Program& program);

/// Symbolic policy; see the README for the unblocking rules.
Action nextActionOracle(const Program& program, const StateTensor& state);

using Policy = std::function<Action(const Program&, const StateTensor&)>;

Policy oraclePolicy();

struct TraceEntry {
  int step = 0;
  Action action;
  std::uint64_t stateTensorHash = 0;  // after the step
  std::vector<std::string> faultEvents;
};

struct RunResult {
  std::vector<TraceEntry> trace;
  bool success = false;
  bool doneSignaled = false;
  WorldState finalWorld;
};

/// Rejected actions are recorded as fault events and leave the world as is.
RunResult runClosedLoop(const Program& program, const WorldState& world, const Policy& policy,
                        const FaultConfig& faults, Rng& rng, int maxSteps);

// Learned executor ---------------------------------------------------------

struct ExecRecord {
  Program program;
  StateTensor state;
  Action action;
};

struct ExecDatasetConfig {
  int nMin = 2;
  int nMax = 6;
  bool displaced = true;  // one single-cube displacement per on-path state
  std::uint64_t seed = 0;
};

/// Oracle-labeled (program, state) -> action records for every stack goal,
/// every on-path state of its execution, and (optionally) a displaced
/// variant of each non-final on-path state. Deterministic per config.
std::vector<ExecRecord> enumerateExecDataset(const ExecDatasetConfig& config);

/// Input = padded program tensor followed by the padded state tensor.
/// Output = source one-hot (nMax), target one-hot (nMax objects + table),
/// rel one-hot (Above, Left), done flag.
std::size_t execInputDim(std::size_t nMax);
std::size_t execOutputDim(std::size_t nMax);
NetSpec execNetSpec(std::size_t nMax, int hiddenLayers = 5, int width = 128);
std::vector<float> encodeExecInput(const Program& program, const StateTensor& state,
                                   std::size_t nMax);
std::vector<float> encodeAction(const Action& a, std::size_t nMax);
Action decodeAction(const float* out, std::size_t nMax);
Dataset makeExecDataset(const std::vector<ExecRecord>& records, std::size_t nMax);

/// Fraction of records whose decoded action equals the oracle's.
double evalExecNet(const Params& params, const Dataset& data, std::size_t nMax);

Policy learnedPolicy(Params params, std::size_t nMax);

}  // namespace cubeprog
