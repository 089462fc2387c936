// Copyright (C) 2026 The cubeprog Authors
// SPDX-License-Identifier: Apache-2.0

// Exhaustive goal enumeration. A goal is a set partition of the cubes where
// every block is arranged either as a stack (any order, bottom first) or,
// for blocks of three or more, as a pyramid: the first two members form the
// Left pair, the third rests on both, the rest stack on the third.

#include <algorithm>

#include "cubeprog/error.hpp"
#include "cubeprog/program.hpp"

namespace cubeprog {

namespace {

// Restricted growth strings, in lexicographic order.
std::vector<std::vector<std::vector<int>>> setPartitions(int n) {
  std::vector<std::vector<std::vector<int>>> out;
  std::vector<int> rgs(n, 0);
  for (;;) {
    const int blocks = *std::max_element(rgs.begin(), rgs.end()) + 1;
    std::vector<std::vector<int>> part(blocks);
    for (int i = 0; i < n; ++i) part[rgs[i]].push_back(i);
    out.push_back(std::move(part));

    int k = n - 1;
    for (; k > 0; --k) {
      const int prefixMax = *std::max_element(rgs.begin(), rgs.begin() + k);
      if (rgs[k] <= prefixMax) break;
    }
    if (k == 0) break;
    ++rgs[k];
    std::fill(rgs.begin() + k + 1, rgs.end(), 0);
  }
  return out;
}

struct Arrangement {
  std::vector<int> order;  // block members in arrangement order
  bool pyramid = false;
};

std::vector<Arrangement> arrangements(const std::vector<int>& block, bool pyramids) {
  std::vector<Arrangement> out;
  std::vector<int> perm = block;
  std::sort(perm.begin(), perm.end());
  do out.push_back({perm, false});
  while (std::next_permutation(perm.begin(), perm.end()));
  if (pyramids && block.size() >= 3) {
    std::sort(perm.begin(), perm.end());
    do out.push_back({perm, true});
    while (std::next_permutation(perm.begin(), perm.end()));
  }
  return out;
}

void addArrangement(StateTensor& goal, const Arrangement& a) {
  const auto& o = a.order;
  std::size_t chainFrom = 0;
  if (a.pyramid) {
    goal.set(o[0], o[1], Rel::Left);
    goal.set(o[2], o[0], Rel::Above);
    goal.set(o[2], o[1], Rel::Above);
    chainFrom = 2;
  }
  for (std::size_t k = chainFrom + 1; k < o.size(); ++k) goal.set(o[k], o[k - 1], Rel::Above);
}

}  // namespace

std::vector<GoalProgram> enumerateGoals(int n, bool includePyramids) {
  if (n < 2 || n > 7)
    throw ConfigError("enumerateGoals supports 2 <= n <= 7, got " + std::to_string(n));
  std::vector<GoalProgram> out;
  for (const auto& part : setPartitions(n)) {
    std::vector<std::vector<Arrangement>> choices;
    for (const auto& block : part) choices.push_back(arrangements(block, includePyramids));
    // Mixed-radix counter over the per-block choices.
    std::vector<std::size_t> pick(choices.size(), 0);
    for (;;) {
      StateTensor goal(static_cast<std::size_t>(n));
      for (std::size_t b = 0; b < choices.size(); ++b) addArrangement(goal, choices[b][pick[b]]);
      goal.deriveNone();
      Program program = synthesizeProgram(goal);
      out.push_back({std::move(goal), std::move(program)});

      std::size_t b = choices.size();
      bool carry = true;
      while (carry && b > 0) {
        --b;
        carry = ++pick[b] == choices[b].size();
        if (carry) pick[b] = 0;
      }
      if (carry) break;
    }
  }
  return out;
}

}  // namespace cubeprog
