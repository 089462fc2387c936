// Copyright (C) 2026 The cubeprog Authors
// SPDX-License-Identifier: Apache-2.0

#include "cubeprog/relationship.hpp"

#include <algorithm>
#include <cmath>

#include "cubeprog/error.hpp"

namespace cubeprog {

namespace {

// Feature vertex k (0..6) of a cube maps to this corner index.
std::array<int, 7> visibleCorners(const ProjectedCuboid& c) {
  std::array<int, 7> out{};
  std::size_t k = 0;
  for (int i = 0; i < 8; ++i)
    if (i != c.hiddenIndex) out[k++] = i;
  return out;
}

void checkResolved(const ProjectedCuboid& c) {
  if (c.hiddenIndex < 0 || c.hiddenIndex > 7)
    throw IncompleteDetection("cuboid has no resolved hidden vertex");
  for (const auto& v : c.vertices)
    if (!v.allFinite()) throw IncompleteDetection("cuboid has an unresolved vertex");
}

}  // namespace

PairInput pairFeatures(const ProjectedCuboid& a, const ProjectedCuboid& b, int width,
                       int height) {
  if (width <= 0 || height <= 0) throw ConfigError("image size must be positive");
  checkResolved(a);
  checkResolved(b);
  PairInput out{};
  std::size_t k = 0;
  for (const ProjectedCuboid* c : {&a, &b})
    for (int corner : visibleCorners(*c)) {
      out[k++] = c->vertices[corner].x() / width;
      out[k++] = c->vertices[corner].y() / height;
    }
  return out;
}

void AugConfig::validate() const {
  auto prob = [](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError(std::string(name) + " must lie in [0, 1]");
  };
  prob(vertexConfusionProb, "vertexConfusionProb");
  prob(occlusionRelocationProb, "occlusionRelocationProb");
  if (!(independentGaussianSigma >= 0.0) || !(structuredGaussianSigma >= 0.0))
    throw ConfigError("augmentation sigmas must be non-negative");
}

AugConfig AugConfig::disabled() {
  AugConfig c;
  c.independentGaussian = c.structuredGaussian = false;
  c.vertexConfusion = c.occlusionRelocation = false;
  return c;
}

std::string AugConfig::tag() const {
  std::string t;
  auto add = [&](bool on, const char* s) {
    if (!on) return;
    if (!t.empty()) t += '+';
    t += s;
  };
  add(independentGaussian, "ig");
  add(structuredGaussian, "sg");
  add(vertexConfusion, "vc");
  add(occlusionRelocation, "oc");
  return t.empty() ? "clean" : t;
}

AugInput makeAugInput(std::span<const ProjectedCuboid> projections, std::size_t i,
                      std::size_t j, int width, int height) {
  if (i >= projections.size() || j >= projections.size())
    throw ShapeError("pair index outside the projection list");
  AugInput in;
  in.features = pairFeatures(projections[i], projections[j], width, height);
  in.occluder.fill(-1);
  std::vector<int> hullOf(projections.size(), -1);
  std::size_t k = 0;
  for (std::size_t cube : {i, j}) {
    const ProjectedCuboid& c = projections[cube];
    for (int corner : visibleCorners(c)) {
      const int occ = c.occluder[corner];
      if (occ >= 0 && static_cast<std::size_t>(occ) < projections.size()) {
        if (hullOf[occ] < 0) {
          Polygon scaled;
          for (const auto& v : projections[occ].vertices)
            scaled.emplace_back(v.x() / width, v.y() / height);
          hullOf[occ] = static_cast<int>(in.hulls.size());
          in.hulls.push_back(convexHull(scaled));
        }
        in.occluder[k] = hullOf[occ];
      }
      ++k;
    }
  }
  return in;
}

PairInput augment(const AugInput& in, Rng& rng, const AugConfig& config) {
  config.validate();
  PairInput out = in.features;
  auto vertex = [&](std::size_t k) { return Vec2(out[2 * k], out[2 * k + 1]); };
  auto setVertex = [&](std::size_t k, const Vec2& v) {
    out[2 * k] = v.x();
    out[2 * k + 1] = v.y();
  };

  if (config.occlusionRelocation && config.occlusionRelocationProb > 0.0) {
    for (std::size_t k = 0; k < 14; ++k) {
      const int h = in.occluder[k];
      if (h < 0 || static_cast<std::size_t>(h) >= in.hulls.size()) continue;
      if (uniform01(rng) >= config.occlusionRelocationProb) continue;
      const Polygon& hull = in.hulls[h];
      if (hull.size() < 3) continue;
      Vec2 lo = hull.front(), hi = hull.front();
      for (const auto& p : hull) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
      }
      // A convex hull fills at least half its bounding box, so this
      // terminates quickly; the cap only guards degenerate hulls.
      for (int attempt = 0; attempt < 1000; ++attempt) {
        const Vec2 p(uniform(rng, lo.x(), hi.x()), uniform(rng, lo.y(), hi.y()));
        if (insideConvex(hull, p)) {
          setVertex(k, p);
          break;
        }
      }
    }
  }

  if (config.vertexConfusion && config.vertexConfusionProb > 0.0) {
    const PairInput before = out;
    for (std::size_t cube = 0; cube < 2; ++cube)
      for (std::size_t v = 0; v < 7; ++v) {
        if (uniform01(rng) >= config.vertexConfusionProb) continue;
        std::size_t other = uniformIndex(rng, 6);
        if (other >= v) ++other;
        const std::size_t src = cube * 7 + other, dst = cube * 7 + v;
        out[2 * dst] = before[2 * src];
        out[2 * dst + 1] = before[2 * src + 1];
      }
  }

  if (config.structuredGaussian && config.structuredGaussianSigma > 0.0) {
    for (std::size_t cube = 0; cube < 2; ++cube) {
      const Vec2 shift(config.structuredGaussianSigma * standardNormal(rng),
                       config.structuredGaussianSigma * standardNormal(rng));
      for (std::size_t v = 0; v < 7; ++v) setVertex(cube * 7 + v, vertex(cube * 7 + v) + shift);
    }
  }

  if (config.independentGaussian && config.independentGaussianSigma > 0.0)
    for (double& x : out) x += config.independentGaussianSigma * standardNormal(rng);
  return out;
}

Rel labelFromState(const StateTensor& truth, std::size_t i, std::size_t j) {
  if (i == j) throw DiagonalError("relationship of a cube with itself");
  if (i >= truth.n() || j >= truth.n()) throw ShapeError("pair index outside the state");
  if (truth.has(i, j, Rel::Above)) return Rel::Above;
  if (truth.has(i, j, Rel::Left)) return Rel::Left;
  return Rel::None;
}

Rel geometricLabel(const Scene& scene, std::size_t i, std::size_t j) {
  if (i == j) throw DiagonalError("relationship of a cube with itself");
  return labelFromState(groundTruthRelations(scene), i, j);
}

NetSpec relNetSpec(int hiddenLayers, int width) {
  NetSpec spec;
  spec.inputDim = static_cast<int>(kPairInputDim);
  spec.hidden.assign(hiddenLayers, width);
  spec.heads = {{static_cast<int>(kRelChannels), LossKind::SoftmaxCrossEntropy}};
  spec.pathing = Pathing::Shared;
  spec.validate();
  return spec;
}

PairScorer netScorer(Params params) {
  if (params.spec.inputDim != static_cast<int>(kPairInputDim) || params.spec.heads.size() != 1 ||
      params.spec.heads[0].dim != static_cast<int>(kRelChannels))
    throw ConfigError("network is not a pairwise relationship classifier");
  return [params = std::move(params)](const PairInput& x, std::size_t, std::size_t) {
    Mat<float> in(kPairInputDim, 1);
    for (std::size_t k = 0; k < kPairInputDim; ++k) in(k, 0) = static_cast<float>(x[k]);
    const auto p = predict(params, in);
    return PairScore{p[0](0, 0), p[0](1, 0)};
  };
}

PairScorer oracleScorer(StateTensor truth) {
  return [truth = std::move(truth)](const PairInput&, std::size_t i, std::size_t j) {
    return PairScore{truth.has(i, j, Rel::Above) ? 1.0 : 0.0,
                     truth.has(i, j, Rel::Left) ? 1.0 : 0.0};
  };
}

StateTensor buildState(std::span<const ProjectedCuboid> projections, const PairScorer& scorer,
                       const PairScorer& pyramidScorer, int width, int height) {
  const std::size_t n = projections.size();
  if (n < 2) throw TooFewObjects("relationship inference needs at least two cubes");
  StateTensor s(n);
  std::vector<PairInput> inputs(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      inputs[i * n + j] = pairFeatures(projections[i], projections[j], width, height);
      const PairScore sc = scorer(inputs[i * n + j], i, j);
      s(i, j, Rel::Above) = sc.above;
      s(i, j, Rel::Left) = sc.left;
    }
  if (pyramidScorer) {
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<std::size_t> candidates;
      for (std::size_t j = 0; j < n; ++j)
        if (j != i && s(i, j, Rel::Above) >= 0.25) candidates.push_back(j);
      if (candidates.size() < 2) continue;
      for (std::size_t j : candidates) s(i, j, Rel::Above) = pyramidScorer(inputs[i * n + j], i, j).above;
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j)
        s(i, j, Rel::None) =
            std::clamp(1.0 - std::max(s(i, j, Rel::Above), s(i, j, Rel::Left)), 0.0, 1.0);
  return s;
}

StateTensor thresholdState(const StateTensor& scores, double tau) {
  StateTensor out(scores.n());
  for (std::size_t i = 0; i < scores.n(); ++i)
    for (std::size_t j = 0; j < scores.n(); ++j) {
      if (i == j) continue;
      out.set(i, j, Rel::Above, scores(i, j, Rel::Above) >= tau);
      out.set(i, j, Rel::Left, scores(i, j, Rel::Left) >= tau);
    }
  out.deriveNone();
  return out;
}

namespace {

constexpr std::uint64_t kRelSceneStream = 0x72656c7363656e65ULL;
constexpr std::uint64_t kRelAugStream = 0x72656c6175676d6eULL;

}  // namespace

std::vector<RelSample> generateRelData(const RelDataConfig& config) {
  config.aug.validate();
  if (config.pairs == 0) throw ConfigError("pair count must be positive");
  std::vector<RelSample> out;
  out.reserve(config.pairs);
  const std::string tag = config.aug.tag();
  std::size_t barren = 0;
  for (std::uint64_t sceneId = 0; out.size() < config.pairs; ++sceneId) {
    Rng sceneRng = makeRng(config.seed, kRelSceneStream, sceneId);
    const GeneratedScene g = randomizeScene(sceneRng, config.scene);
    const auto proj = projectScene(g.scene, g.camera);
    const StateTensor truth = groundTruthRelations(g.scene);
    Rng augRng = makeRng(config.seed, kRelAugStream, sceneId);
    const std::size_t before = out.size();
    for (std::size_t i = 0; i < g.scene.n() && out.size() < config.pairs; ++i)
      for (std::size_t j = 0; j < g.scene.n() && out.size() < config.pairs; ++j) {
        if (i == j) continue;
        const AugInput in = makeAugInput(proj, i, j, g.camera.width, g.camera.height);
        if (config.occludedOnly &&
            std::none_of(in.occluder.begin(), in.occluder.end(), [](int h) { return h >= 0; }))
          continue;
        out.push_back({augment(in, augRng, config.aug), labelFromState(truth, i, j), sceneId, tag});
      }
    barren = out.size() == before ? barren + 1 : 0;
    if (barren > 10000) throw ConfigError("scene configuration yields no usable pairs");
  }
  return out;
}

Dataset makeRelDataset(std::span<const RelSample> samples) {
  const auto count = static_cast<Eigen::Index>(samples.size());
  Dataset d;
  d.inputs.resize(kPairInputDim, count);
  d.targets = {Mat<float>::Zero(kRelChannels, count)};
  for (Eigen::Index c = 0; c < count; ++c) {
    for (std::size_t k = 0; k < kPairInputDim; ++k)
      d.inputs(k, c) = static_cast<float>(samples[c].features[k]);
    d.targets[0](static_cast<Eigen::Index>(samples[c].label), c) = 1.0f;
  }
  return d;
}

RelRates evalRel(const PairScorer& scorer, std::span<const RelSample> samples) {
  if (samples.empty()) throw EmptyInput("empty relationship test set");
  RelRates r;
  std::size_t falsePos = 0, falseNeg = 0, agree = 0;
  for (const auto& s : samples) {
    const PairScore sc = scorer(s.features, 0, 1);
    const bool above = sc.above >= 0.5, left = sc.left >= 0.5;
    Rel predicted = Rel::None;
    if (above && (!left || sc.above >= sc.left)) predicted = Rel::Above;
    else if (left) predicted = Rel::Left;
    agree += predicted == s.label;
    if (s.label == Rel::None) {
      ++r.negatives;
      falsePos += above || left;
    } else {
      ++r.positives;
      falseNeg += (s.label == Rel::Above ? sc.above : sc.left) < 0.5;
    }
  }
  r.fpr = r.negatives ? static_cast<double>(falsePos) / r.negatives : 0.0;
  r.fnr = r.positives ? static_cast<double>(falseNeg) / r.positives : 0.0;
  r.agreement = static_cast<double>(agree) / samples.size();
  return r;
}

}  // namespace cubeprog
