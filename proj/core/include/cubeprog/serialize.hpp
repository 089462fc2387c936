// Copyright (C) 2026 The cubeprog Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cubeprog/error.hpp"
#include "cubeprog/executor.hpp"
#include "cubeprog/geometry.hpp"
#include "cubeprog/metrics.hpp"
#include "cubeprog/neural.hpp"
#include "cubeprog/program.hpp"
#include "cubeprog/relationship.hpp"

namespace cubeprog {

using nlohmann::json;

inline constexpr int kSceneFileVersion = 1;
inline constexpr int kDatasetVersion = 1;

// Every reader throws FormatError for missing or mistyped fields and
// VersionMismatch for a foreign version number.

json sceneToJson(const Scene& scene, const CameraModel& camera);
GeneratedScene sceneFromJson(const json& j);

json stateToJson(const StateTensor& t);
StateTensor stateFromJson(const json& j);

json programToJson(const Program& p, const std::vector<std::string>& objectNames);
Program programFromJson(const json& j);

json actionToJson(const Action& a);
Action actionFromJson(const json& j);

json traceEntryToJson(const TraceEntry& e);

json relSampleToJson(const RelSample& s);
RelSample relSampleFromJson(const json& j);

json goalProgramToJson(const GoalProgram& g);
GoalProgram goalProgramFromJson(const json& j);

json execRecordToJson(const ExecRecord& r);
ExecRecord execRecordFromJson(const json& j);

/// Reads optional keys of a config object; finish() rejects unknown ones.
class ConfigReader {
 public:
  ConfigReader(const json& j, const char* what) : j_(j), what_(what) {
    if (!j.is_object()) throw ConfigError(std::string(what) + " must be a JSON object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string(what_) + "." + key + ": " + e.what());
    }
  }

  const json* sub(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) throw ConfigError(std::string(what_) + ": unknown key '" + k + "'");
  }

 private:
  const json& j_;
  const char* what_;
  std::set<std::string> seen_;
};

// Config documents. Absent keys keep their defaults; unknown keys are errors
// so typos do not pass silently.
SceneGenConfig sceneGenConfigFromJson(const json& j);
json toJson(const SceneGenConfig& c);
AugConfig augConfigFromJson(const json& j);
json toJson(const AugConfig& c);
/// Keys absent from `j` keep the values of `base`.
TrainConfig trainConfigFromJson(const json& j, TrainConfig base = {});
json toJson(const TrainConfig& c);
FaultConfig faultConfigFromJson(const json& j);
json toJson(const FaultConfig& c);

/// Whole-file helpers. Throw IoError on open/write failures and FormatError
/// on malformed JSON.
json readJsonFile(const std::filesystem::path& path);
void writeJsonFile(const std::filesystem::path& path, const json& j);
std::vector<json> readJsonLines(const std::filesystem::path& path);
void writeJsonLines(const std::filesystem::path& path, const std::vector<json>& lines);

/// JSON Lines dataset with a header line {format, version, count}. The
/// reader checks all three against the file.
void writeDataset(const std::filesystem::path& path, const std::string& format,
                  const std::vector<json>& records);
std::vector<json> readDataset(const std::filesystem::path& path, const std::string& format);

/// Names for objects 0..n-1 of a scene (its palette colors).
std::vector<std::string> objectNames(const Scene& scene);

}  // namespace cubeprog
