// Copyright (C) 2026 The cubeprog Authors
// SPDX-License-Identifier: Apache-2.0

#include "cubeprog/program.hpp"

#include <algorithm>
#include <sstream>

#include "cubeprog/error.hpp"

namespace cubeprog {

std::vector<float> ProgramTensor::flatten() const {
  std::vector<float> out;
  out.reserve(pick.size() + place.size() + rel.size());
  out.insert(out.end(), pick.begin(), pick.end());
  out.insert(out.end(), place.begin(), place.end());
  out.insert(out.end(), rel.begin(), rel.end());
  return out;
}

ProgramTensor programToTensor(const Program& p) { return programToTensor(p, p.n); }

ProgramTensor programToTensor(const Program& p, std::size_t slots) {
  if (slots < 2 || slots < p.n)
    throw ShapeError("program over " + std::to_string(p.n) + " objects does not fit " +
                     std::to_string(slots) + " slots");
  ProgramTensor t;
  t.n = slots;
  const std::size_t steps = t.steps(), width = t.slots();
  if (p.steps.size() > steps)
    throw ShapeError("program has " + std::to_string(p.steps.size()) + " steps, at most " +
                     std::to_string(steps) + " fit");
  t.pick.assign(steps * width, 0.0f);
  t.place.assign(steps * width, 0.0f);
  t.rel.assign(steps * 2, 0.0f);
  for (std::size_t s = 0; s < steps; ++s) {
    std::size_t pick = slots, place = slots;
    if (s < p.steps.size() && p.steps[s].used()) {
      const auto& st = p.steps[s];
      if (*st.pick < 0 || *st.place < 0 || static_cast<std::size_t>(*st.pick) >= p.n ||
          static_cast<std::size_t>(*st.place) >= p.n)
        throw ReferenceError("program step references an object outside 0.." +
                             std::to_string(p.n - 1));
      pick = static_cast<std::size_t>(*st.pick);
      place = static_cast<std::size_t>(*st.place);
      t.rel[s * 2 + (st.rel == Rel::Left ? 1 : 0)] = 1.0f;
    }
    t.pick[s * width + pick] = 1.0f;
    t.place[s * width + place] = 1.0f;
  }
  return t;
}

namespace {

std::size_t argmaxRange(const std::vector<float>& v, std::size_t begin, std::size_t count) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < count; ++k)
    if (v[begin + k] > v[begin + best]) best = k;
  return best;
}

}  // namespace

Program tensorToProgram(const ProgramTensor& t) {
  const std::size_t steps = t.steps(), width = t.slots();
  if (t.pick.size() != steps * width || t.place.size() != steps * width ||
      t.rel.size() != steps * 2)
    throw ShapeError("program tensor buffers do not match n = " + std::to_string(t.n));
  Program p;
  p.n = t.n;
  for (std::size_t s = 0; s < steps; ++s) {
    const std::size_t pick = argmaxRange(t.pick, s * width, width);
    const std::size_t place = argmaxRange(t.place, s * width, width);
    if (pick == t.n || place == t.n || pick == place) continue;
    ProgramStep st;
    st.pick = static_cast<int>(pick);
    st.place = static_cast<int>(place);
    st.rel = t.rel[s * 2 + 1] > t.rel[s * 2] ? Rel::Left : Rel::Above;
    p.steps.push_back(st);
  }
  return p;
}

const char* violationName(ViolationKind k) noexcept {
  switch (k) {
    case ViolationKind::MutualAbove: return "mutual-above";
    case ViolationKind::AboveCycle: return "above-cycle";
    case ViolationKind::TooManySupports: return "too-many-supports";
    case ViolationKind::MissingPyramidLeft: return "missing-pyramid-left";
    case ViolationKind::LeftCycle: return "left-cycle";
    case ViolationKind::Unsupported: return "unsupported";
  }
  return "?";
}

namespace {

// Adjacency views of a binary goal.
struct GoalGraph {
  std::size_t n = 0;
  std::vector<std::vector<int>> supports;  // i rests on each
  std::vector<std::vector<int>> carried;   // each rests on i
  std::vector<std::vector<int>> leftOf;    // i is left of each
  std::vector<std::vector<int>> rightOf;   // each is left of i

  explicit GoalGraph(const StateTensor& g) : n(g.n()) {
    supports.resize(n);
    carried.resize(n);
    leftOf.resize(n);
    rightOf.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        if (g.has(i, j, Rel::Above)) {
          supports[i].push_back(static_cast<int>(j));
          carried[j].push_back(static_cast<int>(i));
        }
        if (g.has(i, j, Rel::Left)) {
          leftOf[i].push_back(static_cast<int>(j));
          rightOf[j].push_back(static_cast<int>(i));
        }
      }
  }

  bool onTable(int i) const { return supports[i].empty(); }
  std::size_t leftDegree(int i) const { return leftOf[i].size() + rightOf[i].size(); }
};

// Strongly connected components of size >= minSize in a relation graph.
std::vector<std::vector<int>> cycles(const StateTensor& g, Rel r, std::size_t minSize) {
  const std::size_t n = g.n();
  std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && g.has(i, j, r)) reach[i][j] = 1;
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i)
      if (reach[i][k])
        for (std::size_t j = 0; j < n; ++j)
          if (reach[k][j]) reach[i][j] = 1;
  std::vector<char> seen(n, 0);
  std::vector<std::vector<int>> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (seen[i] || !reach[i][i]) continue;
    std::vector<int> comp;
    for (std::size_t j = 0; j < n; ++j)
      if (j == i || (reach[i][j] && reach[j][i])) {
        comp.push_back(static_cast<int>(j));
        seen[j] = 1;
      }
    if (comp.size() >= minSize) out.push_back(std::move(comp));
  }
  return out;
}

std::string listObjects(const std::vector<int>& objs) {
  std::ostringstream os;
  for (std::size_t k = 0; k < objs.size(); ++k) os << (k ? "," : "") << objs[k];
  return os.str();
}

}  // namespace

std::vector<GoalViolation> validateGoal(const StateTensor& goal) {
  std::vector<GoalViolation> out;
  auto flag = [&](ViolationKind kind, std::vector<int> objs, const std::string& what) {
    out.push_back({kind, objs, std::string(violationName(kind)) + " {" + listObjects(objs) +
                                   "}: " + what});
  };
  const std::size_t n = goal.n();
  const GoalGraph g(goal);

  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (goal.has(i, j, Rel::Above) && goal.has(j, i, Rel::Above))
        flag(ViolationKind::MutualAbove, {int(i), int(j)}, "each is above the other");
  for (auto& c : cycles(goal, Rel::Above, 3))
    flag(ViolationKind::AboveCycle, c, "Above relations form a cycle");
  for (auto& c : cycles(goal, Rel::Left, 2))
    flag(ViolationKind::LeftCycle, c, "Left relations form a cycle");

  for (std::size_t i = 0; i < n; ++i) {
    const int ii = static_cast<int>(i);
    const auto& sup = g.supports[i];
    if (sup.size() > 2) {
      std::vector<int> objs{ii};
      objs.insert(objs.end(), sup.begin(), sup.end());
      flag(ViolationKind::TooManySupports, objs, "rests on more than two cubes");
    }
    if (sup.size() == 2) {
      const int a = sup[0], b = sup[1];
      if (!goal.has(a, b, Rel::Left) && !goal.has(b, a, Rel::Left))
        flag(ViolationKind::MissingPyramidLeft, {ii, a, b}, "supports are not adjacent");
      if (!g.onTable(a) || !g.onTable(b))
        flag(ViolationKind::Unsupported, {ii, a, b}, "pyramid supports must stand on the table");
    }
    if (g.carried[i].size() > 1)
      flag(ViolationKind::Unsupported, {ii}, "more than one cube rests directly on it");
  }

  for (std::size_t i = 0; i < n; ++i)
    for (int j : g.leftOf[i]) {
      const int a = static_cast<int>(i), b = j;
      if (!g.onTable(a) || !g.onTable(b)) {
        flag(ViolationKind::Unsupported, {a, b}, "Left pairs must stand on the table");
        continue;
      }
      if (g.leftDegree(a) > 1 || g.leftDegree(b) > 1) {
        flag(ViolationKind::Unsupported, {a, b}, "rows longer than two cubes");
        continue;
      }
      // Only a pyramid top spanning both may rest on a paired cube.
      for (int base : {a, b})
        for (int top : g.carried[base]) {
          const auto& s = g.supports[top];
          const bool spans = s.size() == 2 && std::find(s.begin(), s.end(), a) != s.end() &&
                             std::find(s.begin(), s.end(), b) != s.end();
          if (!spans)
            flag(ViolationKind::Unsupported, {top, base}, "stacked on one cube of a Left pair");
        }
    }
  return out;
}

StateTensor completeAmbiguousGoal(const StateTensor& goal) {
  StateTensor out = goal;
  const GoalGraph g(goal);
  for (std::size_t i = 0; i < g.n; ++i) {
    if (g.supports[i].size() != 2) continue;
    const int a = std::min(g.supports[i][0], g.supports[i][1]);
    const int b = std::max(g.supports[i][0], g.supports[i][1]);
    if (!out.has(a, b, Rel::Left) && !out.has(b, a, Rel::Left)) out.set(a, b, Rel::Left);
  }
  out.deriveNone();
  return out;
}

Program synthesizeProgram(const StateTensor& goal) {
  const StateTensor g = completeAmbiguousGoal(goal);
  const auto violations = validateGoal(g);
  if (!violations.empty()) {
    std::string msg = "goal cannot be built:";
    for (const auto& v : violations) msg += " " + v.message + ";";
    throw InvalidGoal(msg);
  }
  const GoalGraph graph(g);
  const int n = static_cast<int>(g.n());

  struct Structure {
    int minIndex;
    std::vector<ProgramStep> steps;
  };
  std::vector<Structure> structures;
  std::vector<char> assigned(n, 0);

  auto above = [&](int x, Rel r, int y) {
    ProgramStep s;
    s.pick = x;
    s.place = y;
    s.rel = r;
    return s;
  };
  // Appends the chain of single-support cubes resting on `base`.
  auto climb = [&](Structure& st, int base) {
    for (int cur = base;;) {
      const auto& up = graph.carried[cur];
      if (up.empty()) break;
      const int next = up.front();
      st.steps.push_back(above(next, Rel::Above, cur));
      st.minIndex = std::min(st.minIndex, next);
      assigned[next] = 1;
      cur = next;
    }
  };

  for (int i = 0; i < n; ++i) {
    if (assigned[i] || !graph.onTable(i)) continue;
    Structure st{i, {}};
    assigned[i] = 1;
    if (graph.leftDegree(i) == 1) {
      const int l = graph.leftOf[i].empty() ? graph.rightOf[i].front() : i;
      const int r = graph.leftOf[i].empty() ? i : graph.leftOf[i].front();
      assigned[l] = assigned[r] = 1;
      st.minIndex = std::min(l, r);
      st.steps.push_back(above(l, Rel::Left, r));
      if (!graph.carried[l].empty()) {
        const int top = graph.carried[l].front();
        st.steps.push_back(above(top, Rel::Above, l));
        st.minIndex = std::min(st.minIndex, top);
        assigned[top] = 1;
        climb(st, top);
      }
    } else {
      climb(st, i);
    }
    structures.push_back(std::move(st));
  }
  std::stable_sort(structures.begin(), structures.end(),
                   [](const Structure& a, const Structure& b) { return a.minIndex < b.minIndex; });

  Program p;
  p.n = g.n();
  for (auto& st : structures) p.steps.insert(p.steps.end(), st.steps.begin(), st.steps.end());
  return p;
}

std::string renderText(const Program& p, const std::vector<std::string>& objectNames) {
  auto name = [&](int idx) -> const std::string& {
    if (idx < 0 || static_cast<std::size_t>(idx) >= objectNames.size())
      throw ReferenceError("no name for object " + std::to_string(idx));
    return objectNames[idx];
  };
  std::string out;
  for (const auto& st : p.steps) {
    if (!st.used()) continue;
    out += out.empty() ? "Place the " : ", then place the ";
    out += name(*st.pick);
    out += st.rel == Rel::Left ? " cube left of the " : " cube on the ";
    out += name(*st.place);
    out += " cube";
  }
  return out.empty() ? "Do nothing." : out + ".";
}

// Learned generator --------------------------------------------------------

NetSpec programNetSpec(std::size_t n, int hiddenLayers, int width) {
  if (n < 2) throw ConfigError("program net needs n >= 2");
  if (hiddenLayers < 1 || width < 1) throw ConfigError("program net needs h >= 1 and w >= 1");
  const int steps = static_cast<int>(n) - 1, slots = static_cast<int>(n) + 1;
  NetSpec spec;
  spec.inputDim = static_cast<int>(n * n * kRelChannels);
  spec.hidden.assign(hiddenLayers, width);
  spec.heads = {{steps * slots, LossKind::MSE}, {steps * slots + steps * 2, LossKind::MSE}};
  spec.pathing = Pathing::Independent;
  return spec;
}

namespace {

StateTensor binarized(const StateTensor& t) {
  StateTensor b(t.n());
  for (std::size_t i = 0; i < t.n(); ++i)
    for (std::size_t j = 0; j < t.n(); ++j)
      if (i != j)
        for (Rel r : {Rel::Above, Rel::Left}) b.set(i, j, r, t.has(i, j, r));
  b.deriveNone();
  return b;
}

void checkProgramSpec(const NetSpec& spec, std::size_t n) {
  const NetSpec expect = programNetSpec(n, 1, 1);
  if (spec.inputDim != expect.inputDim || spec.heads.size() != 2 ||
      spec.heads[0].dim != expect.heads[0].dim || spec.heads[1].dim != expect.heads[1].dim)
    throw ConfigError("network shape does not match a program net for n = " +
                      std::to_string(n));
}

}  // namespace

Dataset makeProgramDataset(const std::vector<GoalProgram>& entries, std::size_t n) {
  const NetSpec spec = programNetSpec(n, 1, 1);
  const auto count = static_cast<Eigen::Index>(entries.size());
  Dataset d;
  d.inputs.resize(spec.inputDim, count);
  d.targets = {Mat<float>(spec.heads[0].dim, count), Mat<float>(spec.heads[1].dim, count)};
  for (Eigen::Index c = 0; c < count; ++c) {
    const auto& e = entries[c];
    if (e.goal.n() != n || e.program.n != n)
      throw ShapeError("dataset entry is not over " + std::to_string(n) + " objects");
    const auto in = binarized(e.goal).flatten();
    d.inputs.col(c) = Eigen::Map<const Vec<float>>(in.data(), spec.inputDim);
    const ProgramTensor t = programToTensor(e.program, n);
    d.targets[0].col(c) = Eigen::Map<const Vec<float>>(t.pick.data(), spec.heads[0].dim);
    Vec<float> place(spec.heads[1].dim);
    std::copy(t.place.begin(), t.place.end(), place.data());
    std::copy(t.rel.begin(), t.rel.end(), place.data() + t.place.size());
    d.targets[1].col(c) = place;
  }
  return d;
}

namespace {

ProgramTensor tensorFromOutputs(const Mat<float>& pick, const Mat<float>& place, Eigen::Index c,
                                std::size_t n) {
  ProgramTensor t;
  t.n = n;
  const std::size_t cells = t.steps() * t.slots();
  t.pick.assign(pick.col(c).data(), pick.col(c).data() + cells);
  t.place.assign(place.col(c).data(), place.col(c).data() + cells);
  t.rel.assign(place.col(c).data() + cells, place.col(c).data() + cells + t.steps() * 2);
  return t;
}

}  // namespace

Program decodeProgram(const Params& params, const StateTensor& goal) {
  const std::size_t n = goal.n();
  checkProgramSpec(params.spec, n);
  const auto in = binarized(goal).flatten();
  const Mat<float> x = Eigen::Map<const Mat<float>>(in.data(), params.spec.inputDim, 1);
  const auto out = forward(params, x);
  return tensorToProgram(tensorFromOutputs(out[0], out[1], 0, n));
}

ProgramAccuracy evalProgramNet(const Params& params, const Dataset& data, std::size_t n) {
  checkProgramSpec(params.spec, n);
  if (data.size() == 0) throw EmptyInput("empty program dataset");
  const auto out = predictBatched(params, data.inputs);
  const int steps = static_cast<int>(n) - 1, slots = static_cast<int>(n) + 1;
  const int relRow = steps * slots;
  std::size_t pickOk = 0, placeOk = 0, exact = 0;
  for (Eigen::Index c = 0; c < data.inputs.cols(); ++c) {
    bool all = true;
    for (int s = 0; s < steps; ++s) {
      Eigen::Index pp, tp, pl, tl;
      out[0].col(c).segment(s * slots, slots).maxCoeff(&pp);
      data.targets[0].col(c).segment(s * slots, slots).maxCoeff(&tp);
      out[1].col(c).segment(s * slots, slots).maxCoeff(&pl);
      data.targets[1].col(c).segment(s * slots, slots).maxCoeff(&tl);
      const bool pickMatch = pp == tp;
      bool placeMatch = pl == tl;
      if (placeMatch && tl != slots - 1) {
        Eigen::Index pr, tr;
        out[1].col(c).segment(relRow + 2 * s, 2).maxCoeff(&pr);
        data.targets[1].col(c).segment(relRow + 2 * s, 2).maxCoeff(&tr);
        placeMatch = pr == tr;
      }
      pickOk += pickMatch;
      placeOk += placeMatch;
      all = all && pickMatch && placeMatch;
    }
    exact += all;
  }
  const double slotsPerHead = static_cast<double>(data.size()) * steps;
  ProgramAccuracy acc;
  acc.pick = pickOk / slotsPerHead;
  acc.place = placeOk / slotsPerHead;
  acc.overall = (pickOk + placeOk) / (2.0 * slotsPerHead);
  acc.exactPrograms = static_cast<double>(exact) / data.size();
  return acc;
}

}  // namespace cubeprog
