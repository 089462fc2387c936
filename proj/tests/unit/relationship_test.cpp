// Copyright (C) 2026 The cubeprog Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "cubeprog/error.hpp"
#include "cubeprog/relationship.hpp"

namespace cubeprog {
namespace {

ProjectedCuboid flatCuboid(const Vec2& at) {
  ProjectedCuboid p;
  p.vertices.fill(at);
  p.hiddenIndex = 0;
  p.hullArea = 1.0;
  return p;
}

GeneratedScene generated(std::uint64_t seed, StructureKind kind = StructureKind::Mixed) {
  SceneGenConfig cfg;
  cfg.structure = kind;
  cfg.nMin = 3;
  cfg.nMax = 5;
  Rng rng(seed);
  return randomizeScene(rng, cfg);
}

Scene sceneOf(std::vector<Vec3> centers) {
  Scene s;
  for (std::size_t i = 0; i < centers.size(); ++i)
    s.cuboids.push_back({centers[i], 0.0, kDefaultEdge, static_cast<int>(i)});
  return s;
}

TEST(PairFeatures, NormalizesByImageSize) {
  const PairInput f = pairFeatures(flatCuboid({200, 200}), flatCuboid({100, 300}));
  for (int k = 0; k < 14; ++k) EXPECT_DOUBLE_EQ(f[k], 0.5);
  for (int k = 14; k < 28; k += 2) {
    EXPECT_DOUBLE_EQ(f[k], 0.25);
    EXPECT_DOUBLE_EQ(f[k + 1], 0.75);
  }
}

TEST(PairFeatures, SwappingCubesSwapsHalves) {
  const auto g = generated(4);
  const auto proj = projectScene(g.scene, g.camera);
  const PairInput ab = pairFeatures(proj[0], proj[1]), ba = pairFeatures(proj[1], proj[0]);
  for (int k = 0; k < 14; ++k) {
    EXPECT_EQ(ab[k], ba[k + 14]);
    EXPECT_EQ(ab[k + 14], ba[k]);
  }
}

TEST(PairFeatures, GeneratedFeaturesInUnitRange) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto g = generated(seed);
    const auto proj = projectScene(g.scene, g.camera);
    for (std::size_t i = 0; i < proj.size(); ++i)
      for (std::size_t j = 0; j < proj.size(); ++j)
        if (i != j)
          for (double v : pairFeatures(proj[i], proj[j])) {
            EXPECT_GE(v, 0.0);
            EXPECT_LE(v, 1.0);
          }
  }
}

TEST(PairFeatures, UnresolvedHiddenVertexThrows) {
  ProjectedCuboid bad = flatCuboid({200, 200});
  bad.hiddenIndex = -1;
  EXPECT_THROW(pairFeatures(bad, flatCuboid({1, 1})), IncompleteDetection);
}

TEST(Augment, DisabledIsIdentity) {
  const auto g = generated(6);
  const auto proj = projectScene(g.scene, g.camera);
  const AugInput in = makeAugInput(proj, 0, 1);
  Rng rng(1);
  EXPECT_EQ(augment(in, rng, AugConfig::disabled()), in.features);

  AugConfig zero;
  zero.independentGaussianSigma = zero.structuredGaussianSigma = 0.0;
  zero.vertexConfusionProb = zero.occlusionRelocationProb = 0.0;
  EXPECT_EQ(augment(in, rng, zero), in.features);
}

TEST(Augment, OcclusionRelocationStaysInsideOccluderHull) {
  AugConfig cfg = AugConfig::disabled();
  cfg.occlusionRelocation = true;
  cfg.occlusionRelocationProb = 1.0;
  int relocated = 0;
  for (std::uint64_t seed = 0; seed < 200 && relocated < 200; ++seed) {
    const auto g = generated(seed);
    const auto proj = projectScene(g.scene, g.camera);
    for (std::size_t i = 0; i < proj.size(); ++i)
      for (std::size_t j = 0; j < proj.size(); ++j) {
        if (i == j) continue;
        const AugInput in = makeAugInput(proj, i, j);
        Rng rng(seed * 31 + i * 7 + j);
        const PairInput out = augment(in, rng, cfg);
        for (int k = 0; k < 14; ++k) {
          if (in.occluder[k] < 0) {
            EXPECT_EQ(out[2 * k], in.features[2 * k]);
            continue;
          }
          ++relocated;
          const Vec2 p(out[2 * k], out[2 * k + 1]);
          EXPECT_TRUE(insideConvex(in.hulls[in.occluder[k]], p, 1e-12));
        }
      }
  }
  EXPECT_GT(relocated, 0);
}

TEST(Augment, IndependentGaussianDisplacement) {
  AugConfig cfg = AugConfig::disabled();
  cfg.independentGaussian = true;
  cfg.independentGaussianSigma = 1e-3;
  AugInput in;
  in.features.fill(0.5);
  in.occluder.fill(-1);
  Rng rng(12);
  double total = 0.0;
  const int draws = 10000;
  for (int d = 0; d < draws; ++d) {
    const PairInput out = augment(in, rng, cfg);
    total += std::hypot(out[0] - 0.5, out[1] - 0.5);
  }
  const double expected = 1e-3 * std::sqrt(std::numbers::pi / 2);
  EXPECT_NEAR(total / draws, expected, 0.1 * expected);
}

TEST(Augment, StructuredShiftMovesWholeCube) {
  AugConfig cfg = AugConfig::disabled();
  cfg.structuredGaussian = true;
  cfg.structuredGaussianSigma = 1e-2;
  AugInput in;
  for (int k = 0; k < 28; ++k) in.features[k] = 0.3 + 0.01 * k;
  in.occluder.fill(-1);
  Rng rng(3);
  const PairInput out = augment(in, rng, cfg);
  for (int k = 2; k < 14; k += 2) {
    EXPECT_NEAR(out[k] - in.features[k], out[0] - in.features[0], 1e-15);
    EXPECT_NEAR(out[14 + k] - in.features[14 + k], out[14] - in.features[14], 1e-15);
  }
  EXPECT_NE(out[0], in.features[0]);
}

TEST(Augment, ConfusionCopiesSameCubeVertex) {
  AugConfig cfg = AugConfig::disabled();
  cfg.vertexConfusion = true;
  cfg.vertexConfusionProb = 1.0;
  AugInput in;
  for (int k = 0; k < 28; ++k) in.features[k] = 0.01 * (k + 1);
  in.occluder.fill(-1);
  Rng rng(5);
  const PairInput out = augment(in, rng, cfg);
  for (int v = 0; v < 14; ++v) {
    const int cube = v / 7;
    bool found = false;
    for (int w = cube * 7; w < cube * 7 + 7; ++w)
      found = found || (out[2 * v] == in.features[2 * w] && out[2 * v + 1] == in.features[2 * w + 1]);
    EXPECT_TRUE(found) << v;
  }
}

TEST(AugConfig, RejectsBadProbabilities) {
  AugConfig c;
  c.vertexConfusionProb = 1.5;
  EXPECT_THROW(c.validate(), ConfigError);
  c = {};
  c.independentGaussianSigma = -1;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_EQ(AugConfig{}.tag(), "ig+sg+vc+oc");
  EXPECT_EQ(AugConfig::disabled().tag(), "clean");
}

TEST(Labels, StackSideAndPyramid) {
  const Scene stack = sceneOf({{0, 0, 0.075}, {0, 0, 0.025}});
  EXPECT_EQ(geometricLabel(stack, 0, 1), Rel::Above);
  EXPECT_EQ(geometricLabel(stack, 1, 0), Rel::None);
  const Scene side = sceneOf({{-0.05, 0, 0.025}, {0, 0, 0.025}});
  EXPECT_EQ(geometricLabel(side, 0, 1), Rel::Left);
  const Scene pyramid = sceneOf({{-0.025, 0, 0.025}, {0.025, 0, 0.025}, {0, 0, 0.075}});
  EXPECT_EQ(geometricLabel(pyramid, 2, 0), Rel::Above);
  EXPECT_EQ(geometricLabel(pyramid, 2, 1), Rel::Above);
  EXPECT_THROW(geometricLabel(stack, 1, 1), DiagonalError);
}

TEST(BuildState, CallsScorerOncePerOrderedPair) {
  const auto g = generated(1);
  const auto proj = projectScene(g.scene, g.camera);
  for (std::size_t n : {2u, 3u}) {
    int calls = 0;
    const PairScorer counting = [&](const PairInput&, std::size_t, std::size_t) {
      ++calls;
      return PairScore{};
    };
    std::vector<ProjectedCuboid> sub(proj.begin(), proj.begin() + n);
    buildState(sub, counting);
    EXPECT_EQ(calls, static_cast<int>(n * (n - 1)));
  }
  EXPECT_THROW(buildState(std::span(proj.data(), 1), oracleScorer(StateTensor(1))), TooFewObjects);
}

TEST(BuildState, OracleOnRedOnGreen) {
  SceneGenConfig cfg;
  cfg.layout = {{1, 0}};  // green at the bottom, red on top
  Rng rng(2);
  const auto g = randomizeScene(rng, cfg);
  const auto proj = projectScene(g.scene, g.camera);
  const StateTensor t = buildState(proj, oracleScorer(groundTruthRelations(g.scene)));
  const std::size_t red = *g.scene.findColor(0), green = *g.scene.findColor(1);
  EXPECT_EQ(t(red, green, Rel::Above), 1.0);
  EXPECT_EQ(t(green, red, Rel::Above), 0.0);
  EXPECT_EQ(t(red, green, Rel::Left), 0.0);
  EXPECT_EQ(t(green, red, Rel::Left), 0.0);
  EXPECT_EQ(t(red, green, Rel::None), 0.0);
  EXPECT_EQ(t(green, red, Rel::None), 1.0);
}

TEST(BuildState, NoneChannelIsClampedComplement) {
  const auto g = generated(8);
  const auto proj = projectScene(g.scene, g.camera);
  const PairScorer fixed = [](const PairInput&, std::size_t i, std::size_t j) {
    return PairScore{0.1 * double(i), 0.3 + 0.1 * double(j)};
  };
  const StateTensor t = buildState(proj, fixed);
  for (std::size_t i = 0; i < t.n(); ++i)
    for (std::size_t j = 0; j < t.n(); ++j)
      if (i != j) {
        const double m = std::max(t(i, j, Rel::Above), t(i, j, Rel::Left));
        EXPECT_DOUBLE_EQ(t(i, j, Rel::None), std::clamp(1.0 - m, 0.0, 1.0));
      }
}

TEST(BuildState, PyramidScorerReplacesCandidateAboveScores) {
  const Scene pyramid = sceneOf({{-0.025, 0, 0.025}, {0.025, 0, 0.025}, {0, 0, 0.075}});
  const CameraModel cam = CameraModel::lookAt(Vec3(0.1, -0.5, 0.35), Vec3(0, 0, 0.04));
  const auto proj = projectScene(pyramid, cam);
  const PairScorer weak = [](const PairInput&, std::size_t i, std::size_t) {
    return PairScore{i == 2 ? 0.3 : 0.0, 0.0};
  };
  const PairScorer strong = [](const PairInput&, std::size_t, std::size_t) {
    return PairScore{0.9, 0.0};
  };
  const StateTensor t = buildState(proj, weak, strong);
  EXPECT_DOUBLE_EQ(t(2, 0, Rel::Above), 0.9);
  EXPECT_DOUBLE_EQ(t(2, 1, Rel::Above), 0.9);
  EXPECT_DOUBLE_EQ(t(0, 1, Rel::Above), 0.0);
}

TEST(Threshold, BoundaryAndIdempotence) {
  StateTensor s(3);
  s(0, 1, Rel::Above) = 0.5;
  s(1, 2, Rel::Left) = 0.49;
  s(2, 0, Rel::Above) = 0.51;
  s(2, 1, Rel::Left) = 0.7;
  const StateTensor t = thresholdState(s);
  StateTensor hand(3);
  hand.set(0, 1, Rel::Above);
  hand.set(2, 0, Rel::Above);
  hand.set(2, 1, Rel::Left);
  hand.deriveNone();
  EXPECT_EQ(t, hand);
  EXPECT_EQ(thresholdState(t), t);

  StateTensor low(3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      if (i != j) low(i, j, Rel::Above) = low(i, j, Rel::Left) = 0.49;
  EXPECT_EQ(thresholdState(low).relationCount(), 0u);
}

TEST(Oracle, NoiselessBuildStateMatchesGroundTruthExactly) {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto g = generated(seed);
    const StateTensor truth = groundTruthRelations(g.scene);
    const auto proj = projectScene(g.scene, g.camera);
    EXPECT_EQ(thresholdState(buildState(proj, oracleScorer(truth))), truth);
  }
}

TEST(EvalRel, PerfectAndDegenerateClassifiers) {
  std::vector<RelSample> set;
  for (int i = 0; i < 420; ++i) {
    RelSample s;
    s.label = i < 48 ? Rel::Above : i < 72 ? Rel::Left : Rel::None;
    s.features.fill(double(i));  // lets the perfect scorer look the label up
    set.push_back(s);
  }
  const PairScorer perfect = [&](const PairInput& f, std::size_t, std::size_t) {
    const Rel r = set[static_cast<std::size_t>(f[0])].label;
    return PairScore{r == Rel::Above ? 1.0 : 0.0, r == Rel::Left ? 1.0 : 0.0};
  };
  const RelRates p = evalRel(perfect, set);
  EXPECT_EQ(p.fpr, 0.0);
  EXPECT_EQ(p.fnr, 0.0);
  EXPECT_EQ(p.agreement, 1.0);

  const PairScorer none = [](const PairInput&, std::size_t, std::size_t) { return PairScore{}; };
  const RelRates n = evalRel(none, set);
  EXPECT_EQ(n.positives, 72u);
  EXPECT_EQ(n.negatives, 348u);
  EXPECT_EQ(n.fnr, 1.0);
  EXPECT_EQ(n.fpr, 0.0);
}

TEST(RelData, DeterministicAndPrefixStable) {
  RelDataConfig c;
  c.pairs = 300;
  c.seed = 5;
  const auto a = generateRelData(c), b = generateRelData(c);
  ASSERT_EQ(a.size(), 300u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].features, b[i].features);
    EXPECT_EQ(a[i].label, b[i].label);
  }
  c.pairs = 600;
  const auto longer = generateRelData(c);
  for (std::size_t i = 0; i < 200; ++i) EXPECT_EQ(longer[i].features, a[i].features);
}

TEST(RelData, OccludedOnlyKeepsOccludedPairs) {
  RelDataConfig c;
  c.pairs = 200;
  c.seed = 6;
  c.occludedOnly = true;
  c.aug = AugConfig::disabled();
  EXPECT_EQ(generateRelData(c).size(), 200u);
}

}  // namespace
}  // namespace cubeprog
