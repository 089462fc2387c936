// Copyright (C) 2026 The cubeprog Authors
// SPDX-License-Identifier: Apache-2.0

#include <set>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "cubeprog/error.hpp"
#include "cubeprog/executor.hpp"
#include "cubeprog/program.hpp"

namespace cubeprog {
namespace {

enum : int { kRed = 0, kGreen = 1, kBlue = 2, kYellow = 3 };
const std::vector<std::string> kNames = {"red", "green", "blue", "yellow"};

ProgramStep above(int pick, int place) { return {pick, place, Rel::Above}; }
ProgramStep leftOf(int pick, int place) { return {pick, place, Rel::Left}; }

StateTensor goalOf(std::size_t n, std::initializer_list<std::tuple<int, int, Rel>> rels) {
  StateTensor t(n);
  for (auto [i, j, r] : rels) t.set(i, j, r);
  t.deriveNone();
  return t;
}

bool hasKind(const std::vector<GoalViolation>& v, ViolationKind k) {
  for (const auto& x : v)
    if (x.kind == k) return true;
  return false;
}

TEST(ValidateGoal, MutualAboveAndEmpty) {
  EXPECT_TRUE(hasKind(validateGoal(goalOf(3, {{0, 1, Rel::Above}, {1, 0, Rel::Above}})),
                      ViolationKind::MutualAbove));
  EXPECT_TRUE(validateGoal(StateTensor(4)).empty());
}

TEST(ValidateGoal, OtherViolations) {
  EXPECT_TRUE(hasKind(validateGoal(goalOf(3, {{0, 1, Rel::Above}, {1, 2, Rel::Above},
                                              {2, 0, Rel::Above}})),
                      ViolationKind::AboveCycle));
  EXPECT_TRUE(hasKind(validateGoal(goalOf(4, {{0, 1, Rel::Above}, {0, 2, Rel::Above},
                                              {0, 3, Rel::Above}})),
                      ViolationKind::TooManySupports));
  EXPECT_TRUE(hasKind(validateGoal(goalOf(3, {{0, 1, Rel::Above}, {0, 2, Rel::Above}})),
                      ViolationKind::MissingPyramidLeft));
  EXPECT_TRUE(hasKind(validateGoal(goalOf(2, {{0, 1, Rel::Left}, {1, 0, Rel::Left}})),
                      ViolationKind::LeftCycle));
}

TEST(ValidateGoal, GeometricPyramidIsValid) {
  SceneGenConfig cfg;
  cfg.nMin = cfg.nMax = 3;
  cfg.structure = StructureKind::Pyramid;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    EXPECT_TRUE(validateGoal(groundTruthRelations(randomizeScene(rng, cfg).scene)).empty());
  }
}

TEST(Synthesize, RedGreenBlueStack) {
  const StateTensor goal = goalOf(4, {{kBlue, kRed, Rel::Above}, {kRed, kGreen, Rel::Above}});
  const Program p = synthesizeProgram(goal);
  ASSERT_EQ(p.steps.size(), 2u);
  EXPECT_EQ(p.steps[0], above(kRed, kGreen));
  EXPECT_EQ(p.steps[1], above(kBlue, kRed));
  EXPECT_EQ(renderText(p, kNames),
            "Place the red cube on the green cube, then place the blue cube on the red cube.");
}

TEST(Synthesize, EmptyGoal) {
  const Program p = synthesizeProgram(StateTensor(3));
  EXPECT_TRUE(p.steps.empty());
  EXPECT_EQ(renderText(p, kNames), "Do nothing.");
}

TEST(Synthesize, MissingLeftIsCreatedFirst) {
  const StateTensor goal = goalOf(4, {{kGreen, kRed, Rel::Above}, {kGreen, kYellow, Rel::Above}});
  const Program p = synthesizeProgram(goal);
  ASSERT_EQ(p.steps.size(), 2u);
  EXPECT_EQ(p.steps[0], leftOf(kRed, kYellow));
  EXPECT_EQ(p.steps[1].pick, kGreen);
  EXPECT_EQ(renderText(p, kNames).rfind("Place the red cube left of the yellow cube", 0), 0u);
  EXPECT_EQ(programGoal(p), completeAmbiguousGoal(goal));
}

TEST(Synthesize, InvalidGoalThrows) {
  EXPECT_THROW(synthesizeProgram(goalOf(2, {{0, 1, Rel::Above}, {1, 0, Rel::Above}})),
               InvalidGoal);
}

TEST(Complete, AddsCanonicalLeftOnly) {
  const StateTensor partial =
      goalOf(4, {{kGreen, kRed, Rel::Above}, {kGreen, kYellow, Rel::Above}});
  const StateTensor done = completeAmbiguousGoal(partial);
  EXPECT_TRUE(done.has(kRed, kYellow, Rel::Left));
  EXPECT_EQ(done.relationCount(), 3u);
  EXPECT_EQ(completeAmbiguousGoal(done), done);
  const StateTensor stack = goalOf(3, {{0, 1, Rel::Above}});
  EXPECT_EQ(completeAmbiguousGoal(stack), stack);
}

TEST(Tensor, FourCubeExample) {
  Program p{4, {above(kRed, kGreen), above(kBlue, kRed)}};
  const ProgramTensor t = programToTensor(p);
  ASSERT_EQ(t.steps(), 3u);
  ASSERT_EQ(t.slots(), 5u);
  const std::vector<float> pick = {1, 0, 0, 0, 0,  //
                                   0, 0, 1, 0, 0,  //
                                   0, 0, 0, 0, 1};
  const std::vector<float> place = {0, 1, 0, 0, 0,  //
                                    1, 0, 0, 0, 0,  //
                                    0, 0, 0, 0, 1};
  EXPECT_EQ(t.pick, pick);
  EXPECT_EQ(t.place, place);
  EXPECT_EQ(tensorToProgram(t), p);
}

TEST(Tensor, EmptyProgramIsAllNone) {
  const ProgramTensor t = programToTensor(Program{3, {}});
  for (std::size_t s = 0; s < t.steps(); ++s) {
    EXPECT_EQ(t.pick[s * t.slots() + 3], 1.0f);
    EXPECT_EQ(t.place[s * t.slots() + 3], 1.0f);
  }
  EXPECT_TRUE(tensorToProgram(t).steps.empty());
}

TEST(Tensor, OutOfRangeReferenceThrows) {
  EXPECT_THROW(programToTensor(Program{3, {above(0, 5)}}), ReferenceError);
  EXPECT_THROW(programToTensor(Program{2, {above(0, 1), above(1, 0)}}), ShapeError);
}

TEST(Enumerate, StackCounts) {
  EXPECT_EQ(enumerateGoals(2, false).size(), 3u);
  EXPECT_EQ(enumerateGoals(3, false).size(), 13u);
  EXPECT_EQ(enumerateGoals(4, false).size(), 73u);
  EXPECT_EQ(enumerateGoals(5, false).size(), 501u);
}

TEST(Enumerate, PyramidCounts) {
  // Stacks plus every pyramid arrangement: for n = 3, 13 + 3! pyramids.
  EXPECT_EQ(enumerateGoals(3, true).size(), 19u);
  EXPECT_EQ(enumerateGoals(4, true).size(), 121u);
}

TEST(Enumerate, RangeChecked) {
  EXPECT_THROW(enumerateGoals(1, false), ConfigError);
  EXPECT_THROW(enumerateGoals(8, false), ConfigError);
}

TEST(Enumerate, DistinctDeterministicGoals) {
  const auto a = enumerateGoals(4, true), b = enumerateGoals(4, true);
  std::set<std::uint64_t> hashes;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].goal, b[i].goal);
    hashes.insert(a[i].goal.hash());
  }
  EXPECT_EQ(hashes.size(), a.size());
}

// Soundness, round trip, length bound, determinism and text injectivity over
// every enumerated goal with up to four cubes. The five-cube sweep runs in
// the acceptance gate.
TEST(Enumerate, PlannerPropertiesExhaustive) {
  for (int n = 2; n <= 4; ++n) {
    std::set<std::string> sentences;
    const auto goals = enumerateGoals(n, true);
    for (const auto& g : goals) {
      EXPECT_TRUE(validateGoal(g.goal).empty());
      EXPECT_EQ(programGoal(g.program), g.goal);
      EXPECT_LE(g.program.steps.size(), static_cast<std::size_t>(n - 1));
      EXPECT_EQ(synthesizeProgram(g.goal), g.program);
      EXPECT_EQ(tensorToProgram(programToTensor(g.program)), g.program);
      sentences.insert(renderText(g.program, kNames));
    }
    EXPECT_EQ(sentences.size(), goals.size()) << n;
  }
}

TEST(Enumerate, RoundTripUpToSix) {
  for (const auto& g : enumerateGoals(6, false))
    ASSERT_EQ(tensorToProgram(programToTensor(g.program)), g.program);
}

TEST(Render, SingleLeftStep) {
  EXPECT_EQ(renderText(Program{4, {leftOf(kRed, kYellow)}}, kNames),
            "Place the red cube left of the yellow cube.");
  EXPECT_THROW(renderText(Program{4, {leftOf(kRed, kYellow)}}, {"red"}), ReferenceError);
}

TEST(ProgramNet, ShapesAndLearnability) {
  const auto goals = enumerateGoals(3, true);
  const Dataset d = makeProgramDataset(goals, 3);
  EXPECT_EQ(d.inputs.rows(), 27);
  EXPECT_EQ(d.size(), goals.size());
  ASSERT_EQ(d.targets.size(), 2u);
  EXPECT_EQ(d.targets[0].rows(), 2 * 4);
  EXPECT_EQ(d.targets[1].rows(), 2 * 4 + 2 * 2);

  TrainConfig c;
  c.seed = 1;
  c.epochs = 400;
  c.batchSize = 8;
  const auto r = train(programNetSpec(3, 2, 64), d, c);
  const ProgramAccuracy acc = evalProgramNet(r.params, d, 3);
  EXPECT_GE(acc.overall, 0.95);
  EXPECT_GE(acc.pick, 0.95);
  EXPECT_GE(acc.place, 0.95);
  std::size_t exact = 0;
  for (const auto& g : goals) exact += decodeProgram(r.params, g.goal) == g.program;
  EXPECT_NEAR(acc.exactPrograms, double(exact) / goals.size(), 1e-12);
}

TEST(ProgramNet, UntrainedNetIsFarFromPerfect) {
  const auto goals = enumerateGoals(4, true);
  const Dataset d = makeProgramDataset(goals, 4);
  const ProgramAccuracy acc = evalProgramNet(initParams(programNetSpec(4, 2, 32), 3), d, 4);
  EXPECT_LT(acc.exactPrograms, 0.5);
}

}  // namespace
}  // namespace cubeprog
