// Copyright (C) 2026 The cubeprog Authors
// SPDX-License-Identifier: Apache-2.0

#include "cubeprog/executor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cubeprog/error.hpp"

namespace cubeprog {

std::string describe(const Action& a, const std::vector<std::string>& names) {
  if (a.done) return "done";
  auto name = [&](int i) {
    return i >= 0 && static_cast<std::size_t>(i) < names.size() ? names[i]
                                                                 : "#" + std::to_string(i);
  };
  std::string out = "move " + name(a.source);
  if (!a.target) return out + " to table";
  return out + (a.rel == Rel::Left ? " left of " : " onto ") + name(*a.target);
}

namespace {

double slotX(std::size_t slot, std::size_t slotCount, double edge) {
  return (static_cast<double>(slot) - 0.5 * static_cast<double>(slotCount - 1)) * kSlotPitch *
         edge;
}

}  // namespace

WorldState flatWorld(std::size_t n, const std::vector<std::size_t>& slotOrder, double edge) {
  if (!slotOrder.empty() && slotOrder.size() != n)
    throw ConfigError("slot order must list one slot per cube");
  const std::size_t slots = 2 * n + 2;
  Scene scene;
  if (n > scene.palette.size())
    throw ConfigError("palette has " + std::to_string(scene.palette.size()) + " colors, " +
                      std::to_string(n) + " cubes requested");
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t slot = slotOrder.empty() ? i : slotOrder[i];
    if (slot >= slots) throw ConfigError("slot index out of range");
    CuboidPose c;
    c.center = Vec3(slotX(slot, slots, edge), 0.0, 0.5 * edge);
    c.edge = edge;
    c.colorId = static_cast<int>(i);
    scene.cuboids.push_back(c);
  }
  return makeWorld(std::move(scene));
}

WorldState makeWorld(Scene scene) {
  validateScene(scene);
  WorldState w;
  w.state = groundTruthRelations(scene);
  w.scene = std::move(scene);
  return w;
}

void FaultConfig::validate() const {
  if (!(actionFailureProb >= 0.0 && actionFailureProb <= 1.0))
    throw ConfigError("actionFailureProb must lie in [0, 1]");
}

namespace {

bool isClear(const StateTensor& s, std::size_t x) {
  for (std::size_t y = 0; y < s.n(); ++y)
    if (y != x && s.has(y, x, Rel::Above)) return false;
  return true;
}

bool restsOnTable(const StateTensor& s, std::size_t x) {
  for (std::size_t y = 0; y < s.n(); ++y)
    if (y != x && s.has(x, y, Rel::Above)) return false;
  return true;
}

std::optional<std::size_t> leftPartner(const StateTensor& s, std::size_t x) {
  for (std::size_t y = 0; y < s.n(); ++y)
    if (y != x && (s.has(x, y, Rel::Left) || s.has(y, x, Rel::Left))) return y;
  return std::nullopt;
}

// Topmost cube of the pile resting on x (x itself when clear).
int topOfPile(const StateTensor& s, int x) {
  for (std::size_t guard = 0; guard <= s.n(); ++guard) {
    int next = -1;
    for (std::size_t y = 0; y < s.n(); ++y)
      if (static_cast<int>(y) != x && s.has(y, x, Rel::Above)) {
        next = static_cast<int>(y);
        break;
      }
    if (next < 0) return x;
    x = next;
  }
  return x;
}

// Moves `source` to the first free table slot.
void placeOnTable(Scene& scene, std::size_t source) {
  const double e = scene.cuboids[source].edge;
  const std::size_t slots = 2 * scene.n() + 2;
  for (std::size_t k = 0; k < slots; ++k) {
    const Vec2 at(slotX(k, slots, e), 0.0);
    bool free = true;
    for (std::size_t j = 0; j < scene.n() && free; ++j)
      if (j != source && (scene.cuboids[j].center.head<2>() - at).norm() < 2.5 * e) free = false;
    if (!free) continue;
    scene.cuboids[source].center = Vec3(at.x(), at.y(), 0.5 * e);
    scene.cuboids[source].yaw = 0.0;
    return;
  }
  throw ActionRejected("no free table slot");
}

// Physical placement without faults. Throws ActionRejected.
Scene place(const WorldState& world, const Action& a) {
  const std::size_t n = world.scene.n();
  auto inRange = [&](int i) { return i >= 0 && static_cast<std::size_t>(i) < n; };
  if (!inRange(a.source)) throw ReferenceError("action source " + std::to_string(a.source));
  if (a.target && !inRange(*a.target))
    throw ReferenceError("action target " + std::to_string(*a.target));
  const auto src = static_cast<std::size_t>(a.source);
  const StateTensor& s = world.state;
  if (a.target && *a.target == a.source) throw ActionRejected("source equals target");
  if (!isClear(s, src)) throw ActionRejected("source is not clear");

  Scene scene = world.scene;
  CuboidPose& c = scene.cuboids[src];
  if (!a.target) {
    placeOnTable(scene, src);
  } else {
    const auto tgt = static_cast<std::size_t>(*a.target);
    const CuboidPose& t = world.scene.cuboids[tgt];
    if (a.rel == Rel::Above) {
      if (!isClear(s, tgt)) throw ActionRejected("target top is occupied");
      c.center = t.center + Vec3(0.0, 0.0, 0.5 * (t.edge + c.edge));
      c.yaw = t.yaw;
      if (const auto p = leftPartner(s, tgt); p && *p != src) {
        if (!isClear(s, *p)) throw ActionRejected("pyramid base is occupied");
        const CuboidPose& q = world.scene.cuboids[*p];
        c.center.head<2>() = 0.5 * (t.center.head<2>() + q.center.head<2>());
        c.yaw = 0.0;
      }
    } else if (a.rel == Rel::Left) {
      if (!restsOnTable(s, tgt)) throw ActionRejected("Left target is not on the table");
      const double reach = 0.5 * c.edge + 0.5 * t.edge * (std::abs(std::cos(t.yaw)) +
                                                          std::abs(std::sin(t.yaw)));
      c.center = Vec3(t.center.x() - reach, t.center.y(), 0.5 * c.edge);
      c.yaw = 0.0;
    } else {
      throw ActionRejected("action relation must be Above or Left");
    }
  }
  try {
    validateScene(scene);
  } catch (const InvalidScene& e) {
    throw ActionRejected(std::string("placement collides: ") + e.what());
  }
  return scene;
}

}  // namespace

WorldState applyAction(const WorldState& world, const Action& action, Rng& rng,
                       const FaultConfig& faults, std::vector<std::string>* events) {
  auto note = [&](std::string e) {
    if (events) events->push_back(std::move(e));
  };
  WorldState next = world;
  const int step = world.stepCount;
  next.stepCount = step + 1;
  if (action.done) return next;

  // Validate first so a rejected action is reported even when it would
  // have failed silently.
  Scene moved = place(world, action);
  const bool scripted = std::find(faults.failAtSteps.begin(), faults.failAtSteps.end(), step) !=
                        faults.failAtSteps.end();
  const bool failed = scripted || (faults.actionFailureProb > 0.0 &&
                                   uniform01(rng) < faults.actionFailureProb);
  if (failed) {
    note("action_failed");
  } else {
    next.scene = std::move(moved);
    next.state = groundTruthRelations(next.scene);
  }

  if (faults.perturbation && faults.perturbation->atStep == step) {
    const auto& p = *faults.perturbation;
    if (p.cube < 0 || static_cast<std::size_t>(p.cube) >= next.scene.n())
      throw ConfigError("perturbation cube out of range");
    Action shove{topOfPile(next.state, p.cube), p.onto, Rel::Above, false};
    if (shove.target && *shove.target == shove.source) shove.target.reset();
    Scene scene;
    try {
      scene = place(next, shove);
    } catch (const ActionRejected&) {
      shove.target.reset();
      scene = place(next, shove);
    }
    next.scene = std::move(scene);
    next.state = groundTruthRelations(next.scene);
    note("perturbation: " + describe(shove));
  }
  return next;
}

StateTensor programGoal(const Program& program) {
  WorldState w = flatWorld(program.n);
  Rng rng(0);
  for (const auto& st : program.steps) {
    if (!st.used()) continue;
    w = applyAction(w, {*st.pick, st.place, st.rel, false}, rng);
  }
  return w.state;
}

namespace {

using Relation = std::tuple<int, int, Rel>;

// Symbolic execution: moving a cube drops its old relations; an Above step
// onto a cube with a Left partner lands on both.
struct SymbolicRun {
  std::vector<std::vector<Relation>> added;  // per used step
  std::vector<ProgramStep> steps;
  StateTensor goal;
};

SymbolicRun symbolicRun(const Program& program, std::size_t n) {
  SymbolicRun run;
  run.goal = StateTensor(n);
  StateTensor& s = run.goal;
  for (const auto& st : program.steps) {
    if (!st.used()) continue;
    const int a = *st.pick, b = *st.place;
    if (a < 0 || b < 0 || static_cast<std::size_t>(a) >= n || static_cast<std::size_t>(b) >= n)
      throw ReferenceError("program references object outside the scene (n = " +
                           std::to_string(n) + ")");
    if (a == b) continue;
    for (std::size_t y = 0; y < n; ++y) {
      if (static_cast<int>(y) == a) continue;
      s.set(a, y, Rel::Above, false);
      s.set(a, y, Rel::Left, false);
      s.set(y, a, Rel::Left, false);
    }
    std::vector<Relation> rels;
    if (st.rel == Rel::Left) {
      rels.emplace_back(a, b, Rel::Left);
    } else {
      rels.emplace_back(a, b, Rel::Above);
      if (const auto p = leftPartner(s, b); p && static_cast<int>(*p) != a)
        rels.emplace_back(a, static_cast<int>(*p), Rel::Above);
    }
    for (const auto& [x, y, r] : rels) s.set(x, y, r);
    run.added.push_back(std::move(rels));
    run.steps.push_back(st);
  }
  s.deriveNone();
  return run;
}

std::vector<int> supportsOf(const StateTensor& s, int x) {
  std::vector<int> out;
  for (std::size_t y = 0; y < s.n(); ++y)
    if (static_cast<int>(y) != x && s.has(x, y, Rel::Above)) out.push_back(static_cast<int>(y));
  return out;
}

bool correctlyPlaced(const StateTensor& s, const StateTensor& goal, int x, std::size_t depth = 0) {
  if (depth > s.n()) return false;
  const auto sup = supportsOf(s, x);
  if (sup != supportsOf(goal, x)) return false;
  return std::all_of(sup.begin(), sup.end(),
                     [&](int y) { return correctlyPlaced(s, goal, y, depth + 1); });
}

Action toTable(const StateTensor& s, int x) { return {topOfPile(s, x), std::nullopt, Rel::Above, false}; }

}  // namespace

Action nextActionOracle(const Program& program, const StateTensor& state) {
  const SymbolicRun run = symbolicRun(program, state.n());
  const StateTensor& goal = run.goal;
  if (state == goal) return Action::finished();

  for (std::size_t k = 0; k < run.steps.size(); ++k) {
    const auto& rels = run.added[k];
    const bool satisfied = std::all_of(rels.begin(), rels.end(), [&](const Relation& r) {
      return state.has(std::get<0>(r), std::get<1>(r), std::get<2>(r));
    });
    if (satisfied) continue;
    const auto& st = run.steps[k];
    const int src = *st.pick, tgt = *st.place;
    std::vector<int> dests;
    for (const auto& r : rels) dests.push_back(std::get<1>(r));
    if (!std::all_of(dests.begin(), dests.end(),
                     [&](int d) { return correctlyPlaced(state, goal, d); }))
      continue;

    if (!isClear(state, src)) return toTable(state, src);
    if (st.rel == Rel::Above) {
      for (int d : dests)
        if (!isClear(state, d)) return toTable(state, d);
      // Stacking onto a cube with a stray Left neighbour would land across
      // both; split such pairs first. A lone table target simply moves to a
      // fresh slot, which cannot disturb anything already built.
      for (int d : dests)
        for (std::size_t x = 0; x < state.n(); ++x) {
          const int xi = static_cast<int>(x);
          if (xi == src || std::find(dests.begin(), dests.end(), xi) != dests.end()) continue;
          if (!state.has(x, d, Rel::Left) && !state.has(d, x, Rel::Left)) continue;
          if (dests.size() == 1 && restsOnTable(state, d) && supportsOf(goal, d).empty())
            return toTable(state, d);
          return toTable(state, xi);
        }
    } else {
      for (std::size_t x = 0; x < state.n(); ++x)
        if (static_cast<int>(x) != src && static_cast<int>(x) != tgt &&
            state.has(x, tgt, Rel::Left))
          return toTable(state, static_cast<int>(x));
    }
    return {src, tgt, st.rel, false};
  }

  // Nothing buildable: clear away relations the goal does not contain. Of a
  // stray Left pair, the cube holding fewer goal relations moves.
  auto settled = [&](std::size_t c) {
    std::size_t k = 0;
    for (std::size_t y = 0; y < state.n(); ++y)
      if (y != c)
        for (Rel r : {Rel::Above, Rel::Left})
          k += (goal.has(c, y, r) && state.has(c, y, r)) + (goal.has(y, c, r) && state.has(y, c, r));
    return k;
  };
  for (Rel r : {Rel::Above, Rel::Left})
    for (std::size_t x = 0; x < state.n(); ++x)
      for (std::size_t y = 0; y < state.n(); ++y)
        if (x != y && state.has(x, y, r) && !goal.has(x, y, r)) {
          const bool moveY = r == Rel::Left && settled(y) < settled(x);
          return toTable(state, static_cast<int>(moveY ? y : x));
        }
  return Action::finished();
}

Policy oraclePolicy() { return nextActionOracle; }

RunResult runClosedLoop(const Program& program, const WorldState& world, const Policy& policy,
                        const FaultConfig& faults, Rng& rng, int maxSteps) {
  if (maxSteps < 1) throw ConfigError("maxSteps must be at least 1");
  faults.validate();
  const StateTensor goal = symbolicRun(program, world.scene.n()).goal;
  RunResult result;
  result.finalWorld = world;
  WorldState& w = result.finalWorld;
  for (int step = 0; step < maxSteps; ++step) {
    const Action a = policy(program, w.state);
    if (a.done) {
      result.doneSignaled = true;
      break;
    }
    TraceEntry entry;
    entry.step = step;
    entry.action = a;
    try {
      w = applyAction(w, a, rng, faults, &entry.faultEvents);
    } catch (const ActionRejected& e) {
      entry.faultEvents.push_back(std::string("rejected: ") + e.what());
      ++w.stepCount;
    } catch (const ReferenceError& e) {
      entry.faultEvents.push_back(std::string("rejected: ") + e.what());
      ++w.stepCount;
    }
    entry.stateTensorHash = w.state.hash();
    result.trace.push_back(std::move(entry));
  }
  result.success = w.state == goal;
  return result;
}

}  // namespace cubeprog
