// Copyright (C) 2026 The cubeprog Authors
// SPDX-License-Identifier: Apache-2.0

#include "run_config.hpp"

#include <algorithm>
#include <initializer_list>

namespace cubeprog::cli {

namespace {

const std::initializer_list<const char*> kPathKeys = {
    "scene",    "program",    "relData",     "progData",    "execData",
    "samples",  "relWeights", "progWeights", "execWeights"};

void oneOf(const std::string& value, std::initializer_list<const char*> allowed,
           const char* what) {
  if (std::none_of(allowed.begin(), allowed.end(),
                   [&](const char* a) { return value == a; })) {
    std::string list;
    for (const char* a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
    throw ConfigError(std::string(what) + " must be one of: " + list);
  }
}

void readNet(const json* j, const char* what, NetSection& net) {
  if (!j) return;
  ConfigReader r(*j, what);
  r.get("hiddenLayers", net.hiddenLayers);
  r.get("width", net.width);
  if (const json* t = r.sub("train")) net.train = trainConfigFromJson(*t, net.train);
  r.finish();
  if (net.hiddenLayers < 1 || net.width < 1)
    throw ConfigError(std::string(what) + ": hiddenLayers and width must be positive");
}

json netJson(const NetSection& n) {
  return {{"hiddenLayers", n.hiddenLayers}, {"width", n.width}, {"train", toJson(n.train)}};
}

}  // namespace

RunConfig::RunConfig() {
  relNet.train.epochs = 40;
  relNet.train.batchSize = 64;
  relNet.train.learningRate = 1e-3;
  relNet.train.trainFraction = 0.9;

  progNet.train.epochs = 100;
  progNet.train.batchSize = 32;
  progNet.train.learningRate = 1e-3;
  progNet.train.trainFraction = 0.8;

  execNet.train.epochs = 120;
  execNet.train.batchSize = 64;
  execNet.train.learningRate = 3e-3;
  execNet.train.weightDecay = 0.3;
  execNet.train.schedule = Schedule::Cosine;
  execNet.train.trainFraction = 0.95;
}

fs::path RunConfig::input(const std::string& key, const std::string& fallback) const {
  auto it = paths.find(key);
  if (it == paths.end()) return outDir / fallback;
  fs::path p = it->second;
  return p.is_absolute() ? p : baseDir / p;
}

RunConfig parseRunConfig(const json& j, const fs::path& baseDir) {
  RunConfig c;
  c.baseDir = baseDir;
  ConfigReader top(j, "config");
  top.get("seed", c.seed);

  if (const json* p = top.sub("paths")) {
    ConfigReader r(*p, "paths");
    for (const char* key : kPathKeys) {
      std::string value;
      r.get(key, value);
      if (!value.empty()) c.paths[key] = value;
    }
    r.finish();
  }

  if (const json* s = top.sub("scenes")) {
    ConfigReader r(*s, "scenes");
    r.get("count", c.sceneCount);
    if (const json* g = r.sub("generator")) c.scenes = sceneGenConfigFromJson(*g);
    r.finish();
    if (c.sceneCount < 1) throw ConfigError("scenes.count must be positive");
  }

  if (const json* d = top.sub("relData")) {
    ConfigReader r(*d, "relData");
    r.get("pairs", c.relData.pairs);
    r.get("occludedOnly", c.relData.occludedOnly);
    if (const json* g = r.sub("scene")) c.relData.scene = sceneGenConfigFromJson(*g);
    if (const json* a = r.sub("aug")) c.relData.aug = augConfigFromJson(*a);
    r.finish();
    if (c.relData.pairs == 0) throw ConfigError("relData.pairs must be positive");
  }
  readNet(top.sub("relNet"), "relNet", c.relNet);

  if (const json* p = top.sub("programs")) {
    ConfigReader r(*p, "programs");
    r.get("n", c.programN);
    r.get("pyramids", c.programPyramids);
    r.finish();
    if (c.programN < 2 || c.programN > 7) throw ConfigError("programs.n must be in [2, 7]");
  }
  readNet(top.sub("progNet"), "progNet", c.progNet);

  if (const json* e = top.sub("execData")) {
    ConfigReader r(*e, "execData");
    r.get("nMin", c.execData.nMin);
    r.get("nMax", c.execData.nMax);
    r.get("displaced", c.execData.displaced);
    r.finish();
    if (c.execData.nMin < 2 || c.execData.nMin > c.execData.nMax || c.execData.nMax > 7)
      throw ConfigError("execData needs 2 <= nMin <= nMax <= 7");
  }
  readNet(top.sub("execNet"), "execNet", c.execNet);

  if (const json* i = top.sub("infer")) {
    ConfigReader r(*i, "infer");
    r.get("threshold", c.threshold);
    r.get("relations", c.relations);
    r.get("programs", c.programs);
    r.finish();
    if (!(c.threshold > 0.0 && c.threshold <= 1.0))
      throw ConfigError("infer.threshold must be in (0, 1]");
    oneOf(c.relations, {"oracle", "net"}, "infer.relations");
    oneOf(c.programs, {"planner", "net"}, "infer.programs");
  }

  if (const json* e = top.sub("execute")) {
    ConfigReader r(*e, "execute");
    r.get("maxSteps", c.maxSteps);
    r.get("policy", c.policy);
    r.get("start", c.start);
    if (const json* f = r.sub("faults")) c.faults = faultConfigFromJson(*f);
    r.finish();
    if (c.maxSteps < 1) throw ConfigError("execute.maxSteps must be positive");
    oneOf(c.policy, {"oracle", "net"}, "execute.policy");
    oneOf(c.start, {"flat", "scene"}, "execute.start");
  }

  if (const json* e = top.sub("evaluate")) {
    ConfigReader r(*e, "evaluate");
    r.get("kind", c.evaluate);
    r.finish();
    oneOf(c.evaluate, {"metrics", "rel", "program", "exec"}, "evaluate.kind");
  }

  top.finish();
  return c;
}

json toJson(const RunConfig& c) {
  json paths = json::object();
  for (const auto& [k, v] : c.paths) paths[k] = v;
  json relData = {{"pairs", c.relData.pairs},
                  {"occludedOnly", c.relData.occludedOnly},
                  {"scene", toJson(c.relData.scene)},
                  {"aug", toJson(c.relData.aug)}};
  return {{"seed", c.seed},
          {"paths", paths},
          {"scenes", {{"count", c.sceneCount}, {"generator", toJson(c.scenes)}}},
          {"relData", relData},
          {"relNet", netJson(c.relNet)},
          {"programs", {{"n", c.programN}, {"pyramids", c.programPyramids}}},
          {"progNet", netJson(c.progNet)},
          {"execData",
           {{"nMin", c.execData.nMin},
            {"nMax", c.execData.nMax},
            {"displaced", c.execData.displaced}}},
          {"execNet", netJson(c.execNet)},
          {"infer",
           {{"threshold", c.threshold}, {"relations", c.relations}, {"programs", c.programs}}},
          {"execute",
           {{"maxSteps", c.maxSteps},
            {"policy", c.policy},
            {"start", c.start},
            {"faults", toJson(c.faults)}}},
          {"evaluate", {{"kind", c.evaluate}}}};
}

}  // namespace cubeprog::cli
