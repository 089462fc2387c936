// Copyright (C) 2026 The cubeprog Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "cubeprog/neural.hpp"
#include "cubeprog/state_tensor.hpp"

namespace cubeprog {

/// One pick-and-place step. Above: pick goes on top of place (or, when place
/// is a base of a Left pair, centered over the pair). Left: pick goes
/// directly on the -x side of place.
struct ProgramStep {
  std::optional<int> pick;
  std::optional<int> place;
  Rel rel = Rel::Above;

  bool used() const { return pick.has_value() && place.has_value(); }
  friend bool operator==(const ProgramStep&, const ProgramStep&) = default;
};

struct Program {
  std::size_t n = 0;
  std::vector<ProgramStep> steps;

  friend bool operator==(const Program&, const Program&) = default;
};

/// Step-major encoding: pick and place are (n-1) steps x (n+1) slots (n
/// objects, then "none"); rel is (n-1) steps x 2 (Above, Left). `n` here is
/// the slot count, which may exceed the program's object count (padding).
struct ProgramTensor {
  std::size_t n = 0;
  std::vector<float> pick;
  std::vector<float> place;
  std::vector<float> rel;

  std::size_t steps() const { return n > 0 ? n - 1 : 0; }
  std::size_t slots() const { return n + 1; }
  /// pick, then place, then rel.
  std::vector<float> flatten() const;
};

ProgramTensor programToTensor(const Program& p);
ProgramTensor programToTensor(const Program& p, std::size_t slots);
/// Argmax per step and row; a step whose pick or place decodes to "none"
/// (or to the same object) is dropped.
Program tensorToProgram(const ProgramTensor& t);

enum class ViolationKind {
  MutualAbove,
  AboveCycle,
  TooManySupports,
  MissingPyramidLeft,
  LeftCycle,
  Unsupported,
};

struct GoalViolation {
  ViolationKind kind;
  std::vector<int> objects;
  std::string message;
};

const char* violationName(ViolationKind k) noexcept;

/// Checks a binary goal against the structure grammar: stacks, Left pairs
/// of table cubes, and pyramids (a Left pair plus one cube above both,
/// optionally carrying a stack).
std::vector<GoalViolation> validateGoal(const StateTensor& goal);

/// Adds Left(lower index, higher index) under every pyramid top whose two
/// supports are not yet adjacent.
StateTensor completeAmbiguousGoal(const StateTensor& goal);

/// Completes the goal, then emits per structure (ordered by smallest object
/// index): the Left step of a base pair, then Above steps bottom-up.
/// Throws InvalidGoal if violations remain after completion.
Program synthesizeProgram(const StateTensor& goal);

/// "Place the red cube on the green cube, then place ..." / "Do nothing."
std::string renderText(const Program& p, const std::vector<std::string>& objectNames);

struct GoalProgram {
  StateTensor goal;
  Program program;
};

/// Every arrangement of n labeled cubes into stacks (and, optionally,
/// pyramids: two Left-adjacent bases, a top, and a stack on the top), each
/// with its synthesized program. Deterministic order. 2 <= n <= 7.
std::vector<GoalProgram> enumerateGoals(int n, bool includePyramids);

// Learned program generator ------------------------------------------------

NetSpec programNetSpec(std::size_t n, int hiddenLayers, int width);
/// Inputs: flattened binary goal (n*n*3). Targets: pick; place followed by rel.
Dataset makeProgramDataset(const std::vector<GoalProgram>& entries, std::size_t n);
Program decodeProgram(const Params& params, const StateTensor& goal);

struct ProgramAccuracy {
  double overall = 0.0;  // fraction of (step, head) slots that match
  double pick = 0.0;
  double place = 0.0;
  double exactPrograms = 0.0;
};

/// Place slots count as correct only if the relation also matches on used
/// steps.
ProgramAccuracy evalProgramNet(const Params& params, const Dataset& data, std::size_t n);

}  // namespace cubeprog
