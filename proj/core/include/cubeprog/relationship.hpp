// Copyright (C) 2026 The cubeprog Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "cubeprog/geometry.hpp"
#include "cubeprog/neural.hpp"
#include "cubeprog/rng.hpp"
#include "cubeprog/state_tensor.hpp"

namespace cubeprog {

inline constexpr std::size_t kPairInputDim = 28;

/// Cube a's seven visible vertices, then cube b's, each as (u/width,
/// v/height), in canonical corner order with the hidden corner dropped.
using PairInput = std::array<double, kPairInputDim>;

/// Throws IncompleteDetection when either cube has no resolved hidden
/// vertex or a non-finite vertex.
PairInput pairFeatures(const ProjectedCuboid& a, const ProjectedCuboid& b,
                       int width = kImageSize, int height = kImageSize);

struct AugConfig {
  bool independentGaussian = true;
  double independentGaussianSigma = 1e-3;  // normalized coordinates
  bool structuredGaussian = true;
  double structuredGaussianSigma = 5e-4;   // one offset per cube
  bool vertexConfusion = true;
  double vertexConfusionProb = 0.01;
  bool occlusionRelocation = true;
  double occlusionRelocationProb = 0.5;

  /// Throws ConfigError for probabilities outside [0, 1] or negative sigmas.
  void validate() const;
  static AugConfig disabled();
  /// Short tag such as "ig+sg+vc+oc", or "clean".
  std::string tag() const;
};

/// A pair plus what the occlusion augmentation needs: for each of the 14
/// feature vertices the index of its occluder hull (or -1), and the hulls in
/// normalized coordinates.
struct AugInput {
  PairInput features{};
  std::array<int, 14> occluder{};
  std::vector<Polygon> hulls;
};

AugInput makeAugInput(std::span<const ProjectedCuboid> projections, std::size_t i,
                      std::size_t j, int width = kImageSize, int height = kImageSize);

/// Applies, in order: occlusion relocation (rejection sampling inside the
/// occluder hull's bounding box), vertex confusion within each cube,
/// structured per-cube offset, independent per-coordinate noise.
PairInput augment(const AugInput& in, Rng& rng, const AugConfig& config);

/// Ground-truth symbol for the ordered pair. Throws DiagonalError for i == j.
Rel geometricLabel(const Scene& scene, std::size_t i, std::size_t j);
Rel labelFromState(const StateTensor& truth, std::size_t i, std::size_t j);

struct PairScore {
  double above = 0.0;
  double left = 0.0;
};

/// Scores one ordered pair (i, j); the indices let oracle scorers look up
/// ground truth.
using PairScorer = std::function<PairScore(const PairInput&, std::size_t i, std::size_t j)>;

NetSpec relNetSpec(int hiddenLayers = 3, int width = 100);
PairScorer netScorer(Params params);
PairScorer oracleScorer(StateTensor truth);

/// Runs `scorer` on all n(n-1) ordered pairs; None = 1 - max(Above, Left).
/// When `pyramidScorer` is set, any cube with two or more Above scores of
/// at least 0.25 has those Above entries replaced by the pyramid scorer's.
/// Throws TooFewObjects for n < 2.
StateTensor buildState(std::span<const ProjectedCuboid> projections, const PairScorer& scorer,
                       const PairScorer& pyramidScorer = {}, int width = kImageSize,
                       int height = kImageSize);

/// Above/Left entries >= tau become 1, the rest 0; None derived.
StateTensor thresholdState(const StateTensor& scores, double tau = 0.5);

struct RelSample {
  PairInput features{};
  Rel label = Rel::None;
  std::uint64_t sceneId = 0;
  std::string augTag;
};

struct RelDataConfig {
  std::size_t pairs = 12000;
  SceneGenConfig scene;
  AugConfig aug;
  /// Keep only pairs where at least one vertex is occluded by another cube.
  bool occludedOnly = false;
  std::uint64_t seed = 0;
};

/// Pairs from consecutive seeded scenes until `pairs` are collected. Scene k
/// uses its own derived seed, so the first m scenes never depend on later ones.
std::vector<RelSample> generateRelData(const RelDataConfig& config);

Dataset makeRelDataset(std::span<const RelSample> samples);

struct RelRates {
  double fpr = 0.0;  // truly-None pairs with any relation scored >= 0.5
  double fnr = 0.0;  // related pairs whose true relation scores < 0.5
  std::size_t negatives = 0;
  std::size_t positives = 0;
  double agreement = 0.0;  // thresholded prediction equals the label
};

RelRates evalRel(const PairScorer& scorer, std::span<const RelSample> samples);

}  // namespace cubeprog
