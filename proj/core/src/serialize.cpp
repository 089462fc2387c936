// Copyright (C) 2026 The cubeprog Authors
// SPDX-License-Identifier: Apache-2.0

#include "cubeprog/serialize.hpp"

#include <fstream>
#include <set>

#include "cubeprog/error.hpp"

namespace cubeprog {

namespace {

// Wraps nlohmann's type/key errors so callers see one error category.
template <typename F>
auto parsing(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string(what) + ": " + e.what());
  }
}

void checkVersion(const json& j, int expected, const char* what) {
  const int v = j.at("version").get<int>();
  if (v != expected)
    throw VersionMismatch(std::string(what) + " version " + std::to_string(v) + ", expected " +
                          std::to_string(expected));
}

json vec(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec3(const json& j) {
  if (!j.is_array() || j.size() != 3) throw FormatError("expected a 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

std::vector<float> floats(const json& j) { return j.get<std::vector<float>>(); }

ProgramTensor tensorFromFlat(std::size_t n, const std::vector<float>& flat) {
  ProgramTensor t;
  t.n = n;
  const std::size_t cells = t.steps() * t.slots(), rel = t.steps() * 2;
  if (flat.size() != 2 * cells + rel)
    throw FormatError("program tensor has " + std::to_string(flat.size()) +
                      " values, expected " + std::to_string(2 * cells + rel));
  t.pick.assign(flat.begin(), flat.begin() + cells);
  t.place.assign(flat.begin() + cells, flat.begin() + 2 * cells);
  t.rel.assign(flat.begin() + 2 * cells, flat.end());
  return t;
}

StateTensor stateFromFlat(std::size_t n, const std::vector<float>& flat) {
  if (flat.size() != n * n * kRelChannels)
    throw FormatError("state tensor has " + std::to_string(flat.size()) + " values, expected " +
                      std::to_string(n * n * kRelChannels));
  StateTensor t(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j)
        for (std::size_t c = 0; c < kRelChannels; ++c)
          t(i, j, static_cast<Rel>(c)) = flat[(i * n + j) * kRelChannels + c];
  return t;
}

}  // namespace

json sceneToJson(const Scene& scene, const CameraModel& camera) {
  json cubes = json::array();
  double edge = kDefaultEdge;
  for (const auto& c : scene.cuboids) {
    cubes.push_back({{"colorId", c.colorId}, {"center", vec(c.center)}, {"yaw", c.yaw}});
    edge = c.edge;
  }
  std::vector<double> rot(9);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) rot[r * 3 + c] = camera.rotation(r, c);
  return {{"version", kSceneFileVersion},
          {"edgeMeters", edge},
          {"palette", scene.palette},
          {"cuboids", cubes},
          {"camera",
           {{"focal", {camera.fx, camera.fy}},
            {"principal", {camera.cx, camera.cy}},
            {"rotation", rot},
            {"translation", vec(camera.translation)},
            {"imageSize", {camera.width, camera.height}}}},
          {"leftAxis", "table+x"}};
}

GeneratedScene sceneFromJson(const json& j) {
  return parsing("scene", [&] {
    checkVersion(j, kSceneFileVersion, "scene");
    GeneratedScene g;
    const double edge = j.at("edgeMeters").get<double>();
    g.scene.palette = j.at("palette").get<std::vector<std::string>>();
    for (const auto& c : j.at("cuboids")) {
      CuboidPose p;
      p.colorId = c.at("colorId").get<int>();
      p.center = vec3(c.at("center"));
      p.yaw = c.at("yaw").get<double>();
      p.edge = edge;
      g.scene.cuboids.push_back(p);
    }
    const json& cam = j.at("camera");
    g.camera.fx = cam.at("focal").at(0).get<double>();
    g.camera.fy = cam.at("focal").at(1).get<double>();
    g.camera.cx = cam.at("principal").at(0).get<double>();
    g.camera.cy = cam.at("principal").at(1).get<double>();
    const auto rot = cam.at("rotation").get<std::vector<double>>();
    if (rot.size() != 9) throw FormatError("camera rotation needs 9 numbers");
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) g.camera.rotation(r, c) = rot[r * 3 + c];
    g.camera.translation = vec3(cam.at("translation"));
    g.camera.width = cam.at("imageSize").at(0).get<int>();
    g.camera.height = cam.at("imageSize").at(1).get<int>();
    if (j.contains("leftAxis") && j.at("leftAxis").get<std::string>() != "table+x")
      throw FormatError("only leftAxis \"table+x\" is supported");
    return g;
  });
}

json stateToJson(const StateTensor& t) {
  json rels = json::array();
  for (std::size_t i = 0; i < t.n(); ++i)
    for (std::size_t j = 0; j < t.n(); ++j)
      if (i != j)
        for (Rel r : {Rel::Above, Rel::Left})
          if (t.has(i, j, r)) rels.push_back({relName(r), i, j});
  return {{"n", t.n()}, {"scores", t.flatten()}, {"relations", rels}};
}

StateTensor stateFromJson(const json& j) {
  return parsing("state tensor", [&] {
    return stateFromFlat(j.at("n").get<std::size_t>(), floats(j.at("scores")));
  });
}

json programToJson(const Program& p, const std::vector<std::string>& names) {
  json steps = json::array();
  for (const auto& s : p.steps) {
    if (!s.used()) continue;
    steps.push_back({{"pick", *s.pick}, {"place", *s.place}, {"rel", relName(s.rel)}});
  }
  json palette = json::array();
  for (std::size_t i = 0; i < p.n; ++i)
    palette.push_back(i < names.size() ? names[i] : "object" + std::to_string(i));
  return {{"n", p.n}, {"palette", palette}, {"steps", steps}};
}

Program programFromJson(const json& j) {
  return parsing("program", [&] {
    Program p;
    p.n = j.at("n").get<std::size_t>();
    for (const auto& s : j.at("steps")) {
      ProgramStep st;
      st.pick = s.at("pick").get<int>();
      st.place = s.at("place").get<int>();
      try {
        st.rel = relFromName(s.at("rel").get<std::string>());
      } catch (const Error& e) {
        throw FormatError(e.what());
      }
      if (st.rel == Rel::None) throw FormatError("program steps need Above or Left");
      if (*st.pick < 0 || *st.place < 0 || std::size_t(*st.pick) >= p.n ||
          std::size_t(*st.place) >= p.n || *st.pick == *st.place)
        throw FormatError("program step references invalid objects");
      p.steps.push_back(st);
    }
    if (p.n >= 1 && p.steps.size() > p.n - 1) throw FormatError("program has more than n-1 steps");
    return p;
  });
}

json actionToJson(const Action& a) {
  if (a.done) return {{"done", true}};
  return {{"done", false},
          {"source", a.source},
          {"target", a.target ? json(*a.target) : json("table")},
          {"rel", relName(a.rel)}};
}

Action actionFromJson(const json& j) {
  return parsing("action", [&] {
    if (j.at("done").get<bool>()) return Action::finished();
    Action a;
    a.source = j.at("source").get<int>();
    const json& t = j.at("target");
    if (t.is_string()) {
      if (t.get<std::string>() != "table") throw FormatError("unknown action target");
    } else {
      a.target = t.get<int>();
    }
    a.rel = relFromName(j.at("rel").get<std::string>());
    return a;
  });
}

json traceEntryToJson(const TraceEntry& e) {
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(e.stateTensorHash));
  return {{"step", e.step},
          {"action", actionToJson(e.action)},
          {"stateTensorHash", hash},
          {"faultEvents", e.faultEvents}};
}

json relSampleToJson(const RelSample& s) {
  return {{"features", s.features},
          {"label", relName(s.label)},
          {"sceneId", s.sceneId},
          {"augTag", s.augTag}};
}

RelSample relSampleFromJson(const json& j) {
  return parsing("relationship sample", [&] {
    RelSample s;
    const auto f = j.at("features").get<std::vector<double>>();
    if (f.size() != kPairInputDim) throw FormatError("pair features need 28 values");
    std::copy(f.begin(), f.end(), s.features.begin());
    s.label = relFromName(j.at("label").get<std::string>());
    s.sceneId = j.at("sceneId").get<std::uint64_t>();
    s.augTag = j.at("augTag").get<std::string>();
    return s;
  });
}

json goalProgramToJson(const GoalProgram& g) {
  return {{"n", g.goal.n()},
          {"goalTensor", g.goal.flatten()},
          {"programTensor", programToTensor(g.program, g.goal.n()).flatten()}};
}

GoalProgram goalProgramFromJson(const json& j) {
  return parsing("program dataset record", [&] {
    const auto n = j.at("n").get<std::size_t>();
    GoalProgram g;
    g.goal = stateFromFlat(n, floats(j.at("goalTensor")));
    g.program = tensorToProgram(tensorFromFlat(n, floats(j.at("programTensor"))));
    return g;
  });
}

json execRecordToJson(const ExecRecord& r) {
  return {{"n", r.state.n()},
          {"programTensor", programToTensor(r.program, r.state.n()).flatten()},
          {"stateTensor", r.state.flatten()},
          {"action", actionToJson(r.action)}};
}

ExecRecord execRecordFromJson(const json& j) {
  return parsing("exec dataset record", [&] {
    const auto n = j.at("n").get<std::size_t>();
    ExecRecord r;
    r.program = tensorToProgram(tensorFromFlat(n, floats(j.at("programTensor"))));
    r.state = stateFromFlat(n, floats(j.at("stateTensor")));
    r.action = actionFromJson(j.at("action"));
    return r;
  });
}

SceneGenConfig sceneGenConfigFromJson(const json& j) {
  SceneGenConfig c;
  ConfigReader r(j, "scene");
  r.get("nMin", c.nMin);
  r.get("nMax", c.nMax);
  std::string structure;
  r.get("structure", structure);
  if (structure == "flat") c.structure = StructureKind::Flat;
  else if (structure == "stack") c.structure = StructureKind::SingleStack;
  else if (structure == "pyramid") c.structure = StructureKind::Pyramid;
  else if (structure == "mixed" || structure.empty()) c.structure = StructureKind::Mixed;
  else throw ConfigError("scene.structure must be flat, stack, pyramid or mixed");
  r.get("pyramidProb", c.pyramidProb);
  r.get("singletonBias", c.singletonBias);
  r.get("layout", c.layout);
  r.get("edge", c.edge);
  r.get("tableHalfExtent", c.tableHalfExtent);
  r.get("structureGap", c.structureGap);
  r.get("stackYawJitter", c.stackYawJitter);
  r.get("cameraDistanceMin", c.cameraDistanceMin);
  r.get("cameraDistanceMax", c.cameraDistanceMax);
  r.get("elevationMinDeg", c.elevationMinDeg);
  r.get("elevationMaxDeg", c.elevationMaxDeg);
  r.get("azimuthMinDeg", c.azimuthMinDeg);
  r.get("azimuthMaxDeg", c.azimuthMaxDeg);
  r.get("targetJitter", c.targetJitter);
  r.get("imageMargin", c.imageMargin);
  r.finish();
  return c;
}

json toJson(const SceneGenConfig& c) {
  static const char* names[] = {"flat", "stack", "pyramid", "mixed"};
  return {{"nMin", c.nMin},
          {"nMax", c.nMax},
          {"structure", names[static_cast<int>(c.structure)]},
          {"pyramidProb", c.pyramidProb},
          {"singletonBias", c.singletonBias},
          {"layout", c.layout},
          {"edge", c.edge},
          {"tableHalfExtent", c.tableHalfExtent},
          {"structureGap", c.structureGap},
          {"stackYawJitter", c.stackYawJitter},
          {"cameraDistanceMin", c.cameraDistanceMin},
          {"cameraDistanceMax", c.cameraDistanceMax},
          {"elevationMinDeg", c.elevationMinDeg},
          {"elevationMaxDeg", c.elevationMaxDeg},
          {"azimuthMinDeg", c.azimuthMinDeg},
          {"azimuthMaxDeg", c.azimuthMaxDeg},
          {"targetJitter", c.targetJitter},
          {"imageMargin", c.imageMargin}};
}

AugConfig augConfigFromJson(const json& j) {
  AugConfig c;
  ConfigReader r(j, "augment");
  r.get("independentGaussian", c.independentGaussian);
  r.get("independentGaussianSigma", c.independentGaussianSigma);
  r.get("structuredGaussian", c.structuredGaussian);
  r.get("structuredGaussianSigma", c.structuredGaussianSigma);
  r.get("vertexConfusion", c.vertexConfusion);
  r.get("vertexConfusionProb", c.vertexConfusionProb);
  r.get("occlusionRelocation", c.occlusionRelocation);
  r.get("occlusionRelocationProb", c.occlusionRelocationProb);
  r.finish();
  c.validate();
  return c;
}

json toJson(const AugConfig& c) {
  return {{"independentGaussian", c.independentGaussian},
          {"independentGaussianSigma", c.independentGaussianSigma},
          {"structuredGaussian", c.structuredGaussian},
          {"structuredGaussianSigma", c.structuredGaussianSigma},
          {"vertexConfusion", c.vertexConfusion},
          {"vertexConfusionProb", c.vertexConfusionProb},
          {"occlusionRelocation", c.occlusionRelocation},
          {"occlusionRelocationProb", c.occlusionRelocationProb}};
}

TrainConfig trainConfigFromJson(const json& j, TrainConfig c) {
  ConfigReader r(j, "train");
  r.get("seed", c.seed);
  r.get("batchSize", c.batchSize);
  r.get("epochs", c.epochs);
  r.get("learningRate", c.learningRate);
  std::string opt = c.optimizer == Optimizer::Sgd ? "sgd" : "adam";
  r.get("optimizer", opt);
  if (opt == "adam") c.optimizer = Optimizer::Adam;
  else if (opt == "sgd") c.optimizer = Optimizer::Sgd;
  else throw ConfigError("train.optimizer must be adam or sgd");
  std::string schedule = c.schedule == Schedule::Cosine ? "cosine" : "constant";
  r.get("schedule", schedule);
  if (schedule == "constant") c.schedule = Schedule::Constant;
  else if (schedule == "cosine") c.schedule = Schedule::Cosine;
  else throw ConfigError("train.schedule must be constant or cosine");
  r.get("beta1", c.beta1);
  r.get("beta2", c.beta2);
  r.get("eps", c.eps);
  r.get("weightDecay", c.weightDecay);
  r.get("trainFraction", c.trainFraction);
  r.finish();
  if (c.batchSize < 1 || c.epochs < 1 || !(c.learningRate > 0.0))
    throw ConfigError("train needs batchSize >= 1, epochs >= 1, learningRate > 0");
  return c;
}

json toJson(const TrainConfig& c) {
  return {{"seed", c.seed},
          {"batchSize", c.batchSize},
          {"epochs", c.epochs},
          {"learningRate", c.learningRate},
          {"optimizer", c.optimizer == Optimizer::Adam ? "adam" : "sgd"},
          {"schedule", c.schedule == Schedule::Cosine ? "cosine" : "constant"},
          {"beta1", c.beta1},
          {"beta2", c.beta2},
          {"eps", c.eps},
          {"weightDecay", c.weightDecay},
          {"trainFraction", c.trainFraction}};
}

FaultConfig faultConfigFromJson(const json& j) {
  FaultConfig c;
  ConfigReader r(j, "faults");
  r.get("actionFailureProb", c.actionFailureProb);
  r.get("failAtSteps", c.failAtSteps);
  if (const json* p = r.sub("perturbation"); p && !p->is_null()) {
    Perturbation pert;
    ConfigReader pr(*p, "faults.perturbation");
    pr.get("atStep", pert.atStep);
    pr.get("cube", pert.cube);
    int onto = -1;
    pr.get("onto", onto);
    if (onto >= 0) pert.onto = onto;
    pr.finish();
    c.perturbation = pert;
  }
  r.finish();
  c.validate();
  return c;
}

json toJson(const FaultConfig& c) {
  json j = {{"actionFailureProb", c.actionFailureProb}, {"failAtSteps", c.failAtSteps}};
  if (c.perturbation)
    j["perturbation"] = {{"atStep", c.perturbation->atStep},
                         {"cube", c.perturbation->cube},
                         {"onto", c.perturbation->onto ? *c.perturbation->onto : -1}};
  else
    j["perturbation"] = nullptr;
  return j;
}

json readJsonFile(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string());
  try {
    return json::parse(is);
  } catch (const json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void writeJsonFile(const std::filesystem::path& path, const json& j) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os << j.dump(2) << '\n';
  if (!os) throw IoError("write failed for " + path.string());
}

std::vector<json> readJsonLines(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string());
  std::vector<json> out;
  std::string line;
  for (std::size_t lineNo = 1; std::getline(is, line); ++lineNo) {
    if (line.empty()) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::parse_error& e) {
      throw FormatError(path.string() + ":" + std::to_string(lineNo) + ": " + e.what());
    }
  }
  return out;
}

void writeJsonLines(const std::filesystem::path& path, const std::vector<json>& lines) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  for (const auto& j : lines) os << j.dump() << '\n';
  if (!os) throw IoError("write failed for " + path.string());
}

void writeDataset(const std::filesystem::path& path, const std::string& format,
                  const std::vector<json>& records) {
  std::vector<json> lines;
  lines.reserve(records.size() + 1);
  lines.push_back({{"format", format}, {"version", kDatasetVersion}, {"count", records.size()}});
  lines.insert(lines.end(), records.begin(), records.end());
  writeJsonLines(path, lines);
}

std::vector<json> readDataset(const std::filesystem::path& path, const std::string& format) {
  auto lines = readJsonLines(path);
  if (lines.empty()) throw FormatError(path.string() + ": empty dataset file");
  parsing("dataset header", [&] {
    const json& h = lines.front();
    if (h.at("format").get<std::string>() != format)
      throw FormatError(path.string() + ": expected a " + format + " dataset");
    checkVersion(h, kDatasetVersion, "dataset");
    if (h.at("count").get<std::size_t>() != lines.size() - 1)
      throw FormatError(path.string() + ": record count does not match header");
    return 0;
  });
  lines.erase(lines.begin());
  return lines;
}

std::vector<std::string> objectNames(const Scene& scene) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < scene.n(); ++i) out.push_back(scene.colorName(i));
  return out;
}

}  // namespace cubeprog
