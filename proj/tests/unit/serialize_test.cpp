// Copyright (C) 2026 The cubeprog Authors
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>

#include <gtest/gtest.h>

#include "cubeprog/error.hpp"
#include "cubeprog/serialize.hpp"

namespace cubeprog {
namespace {

std::filesystem::path tmp(const char* name) {
  return std::filesystem::temp_directory_path() / name;
}

TEST(SceneJson, RoundTrip) {
  Rng rng(3);
  const GeneratedScene g = randomizeScene(rng, {});
  const GeneratedScene back = sceneFromJson(sceneToJson(g.scene, g.camera));
  ASSERT_EQ(back.scene.n(), g.scene.n());
  for (std::size_t i = 0; i < g.scene.n(); ++i) {
    EXPECT_EQ(back.scene.cuboids[i].center, g.scene.cuboids[i].center);
    EXPECT_EQ(back.scene.cuboids[i].colorId, g.scene.cuboids[i].colorId);
  }
  EXPECT_EQ(back.camera.rotation, g.camera.rotation);
  EXPECT_EQ(groundTruthRelations(back.scene), groundTruthRelations(g.scene));
}

TEST(SceneJson, VersionAndFormatErrors) {
  Rng rng(3);
  const GeneratedScene g = randomizeScene(rng, {});
  json j = sceneToJson(g.scene, g.camera);
  j["version"] = 2;
  EXPECT_THROW(sceneFromJson(j), VersionMismatch);
  j = sceneToJson(g.scene, g.camera);
  j.erase("camera");
  EXPECT_THROW(sceneFromJson(j), FormatError);
  j = sceneToJson(g.scene, g.camera);
  j["leftAxis"] = "image+u";
  EXPECT_THROW(sceneFromJson(j), FormatError);
}

TEST(ProgramJson, RoundTrip) {
  const Program p{4, {{0, 1, Rel::Above}, {2, 0, Rel::Left}}};
  const json j = programToJson(p, {"red", "green", "blue", "yellow"});
  EXPECT_EQ(j["palette"][3], "yellow");
  EXPECT_EQ(programFromJson(j), p);
  json bad = j;
  bad["steps"][0]["place"] = 9;
  EXPECT_ANY_THROW(programFromJson(bad));
}

TEST(ActionJson, RoundTrip) {
  for (const Action& a : {Action{1, 2, Rel::Above, false}, Action{3, std::nullopt, Rel::Above, false},
                          Action{0, 1, Rel::Left, false}, Action::finished()})
    EXPECT_EQ(actionFromJson(actionToJson(a)), a);
  EXPECT_EQ(actionToJson(Action{3, std::nullopt, Rel::Above, false})["target"], "table");
}

TEST(StateJson, RoundTrip) {
  StateTensor t(3);
  t(0, 1, Rel::Above) = 0.75;
  t(2, 1, Rel::Left) = 0.25;
  EXPECT_EQ(stateFromJson(stateToJson(t)).raw(), t.raw());
}

TEST(Records, RoundTrip) {
  const auto goals = enumerateGoals(3, true);
  for (const auto& g : goals) {
    const GoalProgram back = goalProgramFromJson(goalProgramToJson(g));
    EXPECT_EQ(back.goal, g.goal);
    EXPECT_EQ(back.program, g.program);
  }
  ExecDatasetConfig c;
  c.nMax = 3;
  for (const auto& r : enumerateExecDataset(c)) {
    const ExecRecord back = execRecordFromJson(execRecordToJson(r));
    EXPECT_EQ(back.state, r.state);
    EXPECT_EQ(back.program, r.program);
    EXPECT_EQ(back.action, r.action);
  }
  RelDataConfig rc;
  rc.pairs = 20;
  for (const auto& s : generateRelData(rc)) {
    const RelSample back = relSampleFromJson(relSampleToJson(s));
    EXPECT_EQ(back.features, s.features);
    EXPECT_EQ(back.label, s.label);
  }
}

TEST(Dataset, HeaderChecked) {
  const auto path = tmp("cubeprog_dataset_test.jsonl");
  writeDataset(path, "goal-programs", {json{{"a", 1}}, json{{"a", 2}}});
  EXPECT_EQ(readDataset(path, "goal-programs").size(), 2u);
  EXPECT_THROW(readDataset(path, "exec-records"), FormatError);

  writeJsonLines(path, {json{{"format", "goal-programs"}, {"version", 9}, {"count", 0}}});
  EXPECT_THROW(readDataset(path, "goal-programs"), VersionMismatch);
  writeJsonLines(path, {json{{"format", "goal-programs"}, {"version", 1}, {"count", 3}}});
  EXPECT_THROW(readDataset(path, "goal-programs"), FormatError);
  std::filesystem::remove(path);
  EXPECT_THROW(readDataset(path, "goal-programs"), IoError);
}

TEST(Configs, UnknownKeysRejected) {
  EXPECT_THROW(sceneGenConfigFromJson(json{{"nMax", 3}, {"typo", 1}}), ConfigError);
  EXPECT_THROW(trainConfigFromJson(json{{"schedule", "linear"}}), ConfigError);
  EXPECT_THROW(faultConfigFromJson(json{{"actionFailureProb", "x"}}), ConfigError);
  EXPECT_EQ(sceneGenConfigFromJson(json{{"nMax", 3}}).nMax, 3);
}

TEST(Configs, TrainBaseIsKept) {
  TrainConfig base;
  base.schedule = Schedule::Cosine;
  base.epochs = 77;
  const TrainConfig c = trainConfigFromJson(json{{"learningRate", 0.01}}, base);
  EXPECT_EQ(c.schedule, Schedule::Cosine);
  EXPECT_EQ(c.epochs, 77);
  EXPECT_EQ(c.learningRate, 0.01);
}

TEST(Configs, RoundTrip) {
  FaultConfig f;
  f.actionFailureProb = 0.25;
  f.failAtSteps = {1, 3};
  f.perturbation = Perturbation{2, 1, std::nullopt};
  const FaultConfig back = faultConfigFromJson(toJson(f));
  EXPECT_EQ(back.actionFailureProb, 0.25);
  EXPECT_EQ(back.failAtSteps, f.failAtSteps);
  ASSERT_TRUE(back.perturbation);
  EXPECT_FALSE(back.perturbation->onto);

  AugConfig a;
  a.occlusionRelocationProb = 0.8;
  EXPECT_EQ(augConfigFromJson(toJson(a)).occlusionRelocationProb, 0.8);
  SceneGenConfig s;
  s.layout = {{1, 0, 2}};
  EXPECT_EQ(sceneGenConfigFromJson(toJson(s)).layout, s.layout);
}

}  // namespace
}  // namespace cubeprog
