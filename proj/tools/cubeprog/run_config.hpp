// Copyright (C) 2026 The cubeprog Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>

#include "cubeprog/executor.hpp"
#include "cubeprog/relationship.hpp"
#include "cubeprog/serialize.hpp"

namespace cubeprog::cli {

namespace fs = std::filesystem;

struct NetSection {
  int hiddenLayers = 0;
  int width = 0;
  TrainConfig train;
};

struct RunConfig {
  std::uint64_t seed = 0;
  fs::path baseDir = ".";  // relative paths resolve against the config file
  fs::path outDir = ".";
  std::map<std::string, std::string> paths;

  int sceneCount = 8;
  SceneGenConfig scenes;

  RelDataConfig relData;
  NetSection relNet{3, 100, {}};

  int programN = 5;
  bool programPyramids = true;
  NetSection progNet{4, 1024, {}};

  ExecDatasetConfig execData;
  NetSection execNet{5, 128, {}};

  double threshold = 0.5;
  std::string relations = "oracle";  // oracle | net
  std::string programs = "planner";  // planner | net

  int maxSteps = 50;
  std::string policy = "oracle";     // oracle | net
  std::string start = "flat";        // flat | scene
  FaultConfig faults;

  std::string evaluate = "metrics";  // metrics | rel | program | exec

  RunConfig();

  /// Input file `key`: the configured path, else `fallback` inside outDir.
  fs::path input(const std::string& key, const std::string& fallback) const;
  fs::path output(const std::string& name) const { return outDir / name; }
};

/// Throws ConfigError for unknown keys, bad values or unknown enum names.
RunConfig parseRunConfig(const json& j, const fs::path& baseDir);

json toJson(const RunConfig& c);

}  // namespace cubeprog::cli
