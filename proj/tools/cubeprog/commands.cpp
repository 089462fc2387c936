// Copyright (C) 2026 The cubeprog Authors
// SPDX-License-Identifier: Apache-2.0

#include "commands.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <memory>

#include "cubeprog/error.hpp"
#include "cubeprog/metrics.hpp"

namespace cubeprog::cli {

namespace {

// Seed streams; each subcommand draws from its own.
enum Stream : std::uint64_t {
  kScenes = 1,
  kRelData,
  kRelTrain,
  kProgTrain,
  kExecData,
  kExecTrain,
  kExecute,
};

json report(const char* command, const RunConfig& c) {
  return {{"command", command}, {"version", 1}, {"seed", c.seed}};
}

void finish(const RunConfig& c, const char* command, const json& r) {
  writeJsonFile(c.output(std::string(command) + ".json"), r);
}

TrainConfig seeded(TrainConfig t, const RunConfig& c, Stream s) {
  t.seed = deriveSeed(c.seed, s, t.seed);
  return t;
}

template <typename T, typename F>
std::vector<T> records(const fs::path& path, const char* format, F&& fromJson) {
  std::vector<T> out;
  for (const auto& j : readDataset(path, format)) out.push_back(fromJson(j));
  if (out.empty()) throw FormatError(path.string() + ": dataset has no records");
  return out;
}

json trainSummary(const TrainResult& r, const fs::path& weights) {
  return {{"epochs", r.history.size()},
          {"finalTrainLoss", r.history.empty() ? 0.0 : r.history.back().trainLoss},
          {"trainSize", r.split.train.size()},
          {"heldOutSize", r.split.heldOut.size()},
          {"parameterCount", r.params.parameterCount()},
          {"weights", weights.filename().string()}};
}

json relRatesJson(const RelRates& r) {
  return {{"fpr", r.fpr},
          {"fnr", r.fnr},
          {"positives", r.positives},
          {"negatives", r.negatives},
          {"agreement", r.agreement}};
}

json programAccuracyJson(const ProgramAccuracy& a) {
  return {{"overall", a.overall},
          {"pick", a.pick},
          {"place", a.place},
          {"exactPrograms", a.exactPrograms}};
}

std::vector<RelSample> subset(const std::vector<RelSample>& all,
                            const std::vector<std::size_t>& idx) {
  std::vector<RelSample> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(all[i]);
  return out;
}

// Shared by infer and pipeline.
struct Inference {
  GeneratedScene scene;
  StateTensor goal;
  Program program;
  std::vector<std::string> names;
  std::string sentence;
};

Inference infer(const RunConfig& c) {
  Inference out;
  out.scene = sceneFromJson(readJsonFile(c.input("scene", "scene_0000.json")));
  validateScene(out.scene.scene);
  const std::size_t n = out.scene.scene.n();
  out.names = objectNames(out.scene.scene);

  // Fewer than two objects admit no relations, so there is nothing to score.
  if (n < 2) {
    out.goal = StateTensor(n);
  } else {
    const auto projections = projectScene(out.scene.scene, out.scene.camera);
    PairScorer scorer = c.relations == "net"
                            ? netScorer(readParams(c.input("relWeights", "rel.dnet")))
                            : oracleScorer(groundTruthRelations(out.scene.scene));
    const StateTensor scores =
        buildState(projections, scorer, {}, out.scene.camera.width, out.scene.camera.height);
    out.goal = thresholdState(scores, c.threshold);
  }

  if (c.programs == "net") {
    const Params params = readParams(c.input("progWeights", "prog.dnet"));
    if (params.spec.inputDim != static_cast<int>(n * n * kRelChannels))
      throw ConfigError("program net was trained for a different object count");
    out.program = decodeProgram(params, out.goal);
  } else {
    out.program = synthesizeProgram(out.goal);
  }
  out.sentence = renderText(out.program, out.names);
  return out;
}

Policy policyFor(const RunConfig& c) {
  if (c.policy == "net")
    return learnedPolicy(readParams(c.input("execWeights", "exec.dnet")),
                         static_cast<std::size_t>(c.execData.nMax));
  return oraclePolicy();
}

json runJson(const RunResult& r) {
  json trace = json::array();
  for (const auto& e : r.trace) trace.push_back(traceEntryToJson(e));
  return {{"success", r.success},
          {"doneSignaled", r.doneSignaled},
          {"actions", r.trace.size()},
          {"finalState", stateToJson(r.finalWorld.state)},
          {"trace", trace}};
}

// One JSON object per line, in step order.
void writeTrace(const fs::path& path, const RunResult& r) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  for (const auto& e : r.trace) os << traceEntryToJson(e).dump() << '\n';
  if (!os) throw IoError("write failed: " + path.string());
}

void logRun(std::ostream& log, const RunResult& r, const std::vector<std::string>& names) {
  for (const auto& e : r.trace) {
    char hash[24];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(e.stateTensorHash));
    log << "  [" << std::setw(3) << e.step << "] " << describe(e.action, names) << "  state "
        << hash;
    for (const auto& f : e.faultEvents) log << "  !" << f;
    log << '\n';
  }
  log << (r.success ? "executed: success" : "executed: goal not reached") << " ("
      << r.trace.size() << " actions)\n";
}

int genScenes(const RunConfig& c, std::ostream& log) {
  json files = json::array(), counts = json::array();
  for (int k = 0; k < c.sceneCount; ++k) {
    Rng rng = makeRng(c.seed, kScenes, static_cast<std::uint64_t>(k));
    const GeneratedScene g = randomizeScene(rng, c.scenes);
    char name[32];
    std::snprintf(name, sizeof name, "scene_%04d.json", k);
    writeJsonFile(c.output(name), sceneToJson(g.scene, g.camera));
    files.push_back(name);
    counts.push_back(g.scene.n());
  }
  json r = report("gen-scenes", c);
  r["count"] = c.sceneCount;
  r["files"] = files;
  r["objects"] = counts;
  finish(c, "gen-scenes", r);
  log << "wrote " << c.sceneCount << " scenes to " << c.outDir.string() << '\n';
  return kExitOk;
}

int genRelData(const RunConfig& c, std::ostream& log) {
  RelDataConfig d = c.relData;
  d.seed = deriveSeed(c.seed, kRelData);
  const auto samples = generateRelData(d);
  std::vector<json> lines;
  std::size_t counts[kRelChannels] = {};
  for (const auto& s : samples) {
    lines.push_back(relSampleToJson(s));
    ++counts[static_cast<std::size_t>(s.label)];
  }
  writeDataset(c.output("rel_data.jsonl"), "rel-pairs", lines);
  json r = report("gen-rel-data", c);
  r["count"] = samples.size();
  r["labels"] = {{"Above", counts[0]}, {"Left", counts[1]}, {"None", counts[2]}};
  r["augTag"] = d.aug.tag();
  r["file"] = "rel_data.jsonl";
  finish(c, "gen-rel-data", r);
  log << "wrote " << samples.size() << " relationship pairs\n";
  return kExitOk;
}

int trainRel(const RunConfig& c, std::ostream& log) {
  const auto samples =
      records<RelSample>(c.input("relData", "rel_data.jsonl"), "rel-pairs", relSampleFromJson);
  const TrainResult t = train(relNetSpec(c.relNet.hiddenLayers, c.relNet.width),
                              makeRelDataset(samples), seeded(c.relNet.train, c, kRelTrain));
  const fs::path weights = c.output("rel.dnet");
  writeParams(weights, t.params);
  json r = report("train-rel", c);
  r["training"] = trainSummary(t, weights);
  r["heldOut"] = t.split.heldOut.empty()
                     ? json(nullptr)
                     : relRatesJson(evalRel(netScorer(t.params), subset(samples, t.split.heldOut)));
  finish(c, "train-rel", r);
  log << "trained relationship net on " << t.split.train.size() << " pairs\n";
  return kExitOk;
}

int enumPrograms(const RunConfig& c, std::ostream& log) {
  const auto goals = enumerateGoals(c.programN, c.programPyramids);
  std::vector<json> lines;
  std::size_t longest = 0;
  for (const auto& g : goals) {
    lines.push_back(goalProgramToJson(g));
    longest = std::max(longest, g.program.steps.size());
  }
  writeDataset(c.output("programs.jsonl"), "goal-programs", lines);
  json r = report("enum-programs", c);
  r["n"] = c.programN;
  r["pyramids"] = c.programPyramids;
  r["count"] = goals.size();
  r["longestProgram"] = longest;
  r["file"] = "programs.jsonl";
  finish(c, "enum-programs", r);
  log << "enumerated " << goals.size() << " goals with " << c.programN << " cubes\n";
  return kExitOk;
}

int trainProg(const RunConfig& c, std::ostream& log) {
  const auto goals = records<GoalProgram>(c.input("progData", "programs.jsonl"),
                                          "goal-programs", goalProgramFromJson);
  const std::size_t n = goals.front().goal.n();
  for (const auto& g : goals)
    if (g.goal.n() != n) throw FormatError("program dataset mixes object counts");
  const Dataset data = makeProgramDataset(goals, n);
  const TrainResult t = train(programNetSpec(n, c.progNet.hiddenLayers, c.progNet.width), data,
                              seeded(c.progNet.train, c, kProgTrain));
  const fs::path weights = c.output("prog.dnet");
  writeParams(weights, t.params);
  json r = report("train-prog", c);
  r["n"] = n;
  r["training"] = trainSummary(t, weights);
  r["accuracy"] = programAccuracyJson(evalProgramNet(t.params, data, n));
  r["heldOut"] = t.split.heldOut.empty()
                     ? json(nullptr)
                     : programAccuracyJson(
                           evalProgramNet(t.params, data.subset(t.split.heldOut), n));
  finish(c, "train-prog", r);
  log << "trained program net on " << t.split.train.size() << " of " << goals.size()
      << " goals\n";
  return kExitOk;
}

int genExecData(const RunConfig& c, std::ostream& log) {
  ExecDatasetConfig e = c.execData;
  e.seed = deriveSeed(c.seed, kExecData);
  const auto recs = enumerateExecDataset(e);
  std::vector<json> lines;
  std::size_t done = 0;
  for (const auto& rec : recs) {
    lines.push_back(execRecordToJson(rec));
    done += rec.action.done;
  }
  writeDataset(c.output("exec_data.jsonl"), "exec-records", lines);
  json r = report("gen-exec-data", c);
  r["count"] = recs.size();
  r["doneRecords"] = done;
  r["nMin"] = e.nMin;
  r["nMax"] = e.nMax;
  r["displaced"] = e.displaced;
  r["file"] = "exec_data.jsonl";
  finish(c, "gen-exec-data", r);
  log << "wrote " << recs.size() << " execution records\n";
  return kExitOk;
}

int trainExec(const RunConfig& c, std::ostream& log) {
  const auto recs = records<ExecRecord>(c.input("execData", "exec_data.jsonl"), "exec-records",
                                        execRecordFromJson);
  const auto nMax = static_cast<std::size_t>(c.execData.nMax);
  for (const auto& rec : recs)
    if (rec.state.n() > nMax) throw ConfigError("execData.nMax is smaller than the dataset's n");
  const Dataset data = makeExecDataset(recs, nMax);
  const TrainResult t = train(execNetSpec(nMax, c.execNet.hiddenLayers, c.execNet.width), data,
                              seeded(c.execNet.train, c, kExecTrain));
  const fs::path weights = c.output("exec.dnet");
  writeParams(weights, t.params);
  json r = report("train-exec", c);
  r["nMax"] = nMax;
  r["training"] = trainSummary(t, weights);
  r["accuracy"] = evalExecNet(t.params, data, nMax);
  r["heldOutAccuracy"] = t.split.heldOut.empty()
                             ? json(nullptr)
                             : json(evalExecNet(t.params, data.subset(t.split.heldOut), nMax));
  finish(c, "train-exec", r);
  log << "trained execution net on " << t.split.train.size() << " records\n";
  return kExitOk;
}

int inferCmd(const RunConfig& c, std::ostream& log) {
  const Inference inf = infer(c);
  const json program = programToJson(inf.program, inf.names);
  writeJsonFile(c.output("program.json"), program);
  json r = report("infer", c);
  r["n"] = inf.scene.scene.n();
  r["relations"] = c.relations;
  r["programs"] = c.programs;
  r["goal"] = stateToJson(inf.goal);
  r["program"] = program;
  r["sentence"] = inf.sentence;
  finish(c, "infer", r);
  log << inf.sentence << '\n';
  return kExitOk;
}

int execute(const RunConfig& c, std::ostream& log) {
  const json pj = readJsonFile(c.input("program", "program.json"));
  const Program program = programFromJson(pj);
  const auto names = pj.at("palette").get<std::vector<std::string>>();

  WorldState world;
  if (c.start == "scene") {
    world = makeWorld(sceneFromJson(readJsonFile(c.input("scene", "scene_0000.json"))).scene);
    if (world.scene.n() != program.n)
      throw ConfigError("start scene and program disagree on the object count");
  } else {
    world = flatWorld(program.n);
    world.scene.palette = names;
  }
  c.faults.validate();
  Rng rng = makeRng(c.seed, kExecute);
  const RunResult run = runClosedLoop(program, world, policyFor(c), c.faults, rng, c.maxSteps);

  json r = report("execute", c);
  r["policy"] = c.policy;
  r["sentence"] = renderText(program, names);
  r["maxSteps"] = c.maxSteps;
  r["faults"] = toJson(c.faults);
  r["run"] = runJson(run);
  r["traceFile"] = "trace.jsonl";
  writeTrace(c.output("trace.jsonl"), run);
  finish(c, "execute", r);
  logRun(log, run, names);
  return run.success ? kExitOk : kExitGoalNotReached;
}

int pipeline(const RunConfig& c, std::ostream& log) {
  const Inference inf = infer(c);
  const json program = programToJson(inf.program, inf.names);
  writeJsonFile(c.output("program.json"), program);

  // Rebuild the demonstrated cubes, each alone on the table.
  WorldState world = flatWorld(inf.scene.scene.n());
  world.scene.palette = inf.scene.scene.palette;
  for (std::size_t i = 0; i < world.scene.n(); ++i)
    world.scene.cuboids[i].colorId = inf.scene.scene.cuboids[i].colorId;
  world = makeWorld(world.scene);

  c.faults.validate();
  Rng rng = makeRng(c.seed, kExecute);
  const RunResult run =
      runClosedLoop(inf.program, world, policyFor(c), c.faults, rng, c.maxSteps);

  json r = report("pipeline", c);
  r["goal"] = stateToJson(inf.goal);
  r["program"] = program;
  r["sentence"] = inf.sentence;
  r["policy"] = c.policy;
  r["run"] = runJson(run);
  r["traceFile"] = "trace.jsonl";
  writeTrace(c.output("trace.jsonl"), run);
  finish(c, "pipeline", r);
  log << inf.sentence << '\n';
  logRun(log, run, inf.names);
  return run.success ? kExitOk : kExitGoalNotReached;
}

int evaluate(const RunConfig& c, std::ostream& log) {
  json result;
  if (c.evaluate == "metrics") {
    const json j = readJsonFile(c.input("samples", "samples.json"));
    std::vector<MetricSample> samples;
    MetricReport m;
    try {
      for (const auto& s : j.at("samples")) {
        MetricSample ms;
        ms.d = s.at("d").get<double>();
        ms.hullArea = s.at("hullArea").get<double>();
        ms.epsilon = s.value("epsilon", kDefaultPckEpsilon);
        samples.push_back(ms);
      }
      m = aggregate(samples);
      if (j.contains("detections")) {
        const auto det = j.at("detections").get<std::vector<bool>>();
        auto flags = std::make_unique<bool[]>(det.size());
        std::copy(det.begin(), det.end(), flags.get());
        m.fnr = fnr(std::span<const bool>(flags.get(), det.size()));
      }
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("metric samples: ") + e.what());
    }
    result = m;
  } else if (c.evaluate == "rel") {
    const auto samples =
        records<RelSample>(c.input("relData", "rel_data.jsonl"), "rel-pairs", relSampleFromJson);
    result = relRatesJson(evalRel(netScorer(readParams(c.input("relWeights", "rel.dnet"))),
                                  samples));
  } else if (c.evaluate == "program") {
    const auto goals = records<GoalProgram>(c.input("progData", "programs.jsonl"),
                                            "goal-programs", goalProgramFromJson);
    const std::size_t n = goals.front().goal.n();
    result = programAccuracyJson(evalProgramNet(readParams(c.input("progWeights", "prog.dnet")),
                                                makeProgramDataset(goals, n), n));
  } else {
    const auto recs = records<ExecRecord>(c.input("execData", "exec_data.jsonl"),
                                          "exec-records", execRecordFromJson);
    const auto nMax = static_cast<std::size_t>(c.execData.nMax);
    result = {{"accuracy",
               evalExecNet(readParams(c.input("execWeights", "exec.dnet")),
                           makeExecDataset(recs, nMax), nMax)},
              {"records", recs.size()}};
  }
  json r = report("evaluate", c);
  r["kind"] = c.evaluate;
  r["result"] = result;
  finish(c, "evaluate", r);
  log << c.evaluate << ": " << result.dump() << '\n';
  return kExitOk;
}

}  // namespace

const std::map<std::string, Command>& commands() {
  static const std::map<std::string, Command> table = {
      {"gen-scenes", genScenes},     {"gen-rel-data", genRelData},
      {"train-rel", trainRel},       {"enum-programs", enumPrograms},
      {"train-prog", trainProg},     {"gen-exec-data", genExecData},
      {"train-exec", trainExec},     {"infer", inferCmd},
      {"execute", execute},          {"evaluate", evaluate},
      {"pipeline", pipeline}};
  return table;
}

const std::map<std::string, std::string>& commandHelp() {
  static const std::map<std::string, std::string> help = {
      {"gen-scenes", "Generate randomized scene files"},
      {"gen-rel-data", "Generate labeled cube-pair features for the relationship net"},
      {"train-rel", "Train the pairwise relationship net"},
      {"enum-programs", "Enumerate every goal for n cubes with its program"},
      {"train-prog", "Train the goal-to-program net"},
      {"gen-exec-data", "Generate oracle-labeled execution records"},
      {"train-exec", "Train the execution net"},
      {"infer", "Scene file -> goal state -> program and sentence"},
      {"execute", "Run a program closed-loop, optionally with faults"},
      {"evaluate", "Score metrics samples or a trained net"},
      {"pipeline", "Infer a program from a demonstration and execute it"}};
  return help;
}

}  // namespace cubeprog::cli
