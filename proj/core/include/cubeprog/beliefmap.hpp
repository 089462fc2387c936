// Copyright (C) 2026 The cubeprog Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "cubeprog/geometry.hpp"

namespace cubeprog {

inline constexpr int kMapSize = 50;
inline constexpr int kMapStride = 8;
inline constexpr int kVerticesPerCuboid = 7;
inline constexpr double kDefaultSigmaImage = 3.4;
inline constexpr double kDefaultSoftArgmaxBeta = 100.0;
inline constexpr double kDefaultDetectionThreshold = 0.2;

/// Image-space center of map cell `cell` along one axis.
constexpr double cellToImage(double cell) { return kMapStride * cell + 3.5; }
constexpr double imageToCell(double image) { return (image - 3.5) / kMapStride; }

/// 50x50 grid of non-negative beliefs. Cell (a, b) is column a (image u)
/// and row b (image v).
class BeliefMap {
 public:
  BeliefMap() : grid_(Eigen::ArrayXXd::Zero(kMapSize, kMapSize)) {}
  explicit BeliefMap(Eigen::ArrayXXd grid);

  double at(int a, int b) const { return grid_(b, a); }
  double& at(int a, int b) { return grid_(b, a); }

  const Eigen::ArrayXXd& grid() const noexcept { return grid_; }
  Eigen::ArrayXXd& grid() noexcept { return grid_; }

  double maxValue() const { return grid_.maxCoeff(); }

 private:
  Eigen::ArrayXXd grid_;  // rows = v, cols = u
};

/// t stages of p per-vertex maps.
struct BeliefStack {
  std::vector<std::vector<BeliefMap>> stages;

  std::size_t t() const noexcept { return stages.size(); }
  std::size_t p() const noexcept { return stages.empty() ? 0 : stages.front().size(); }
  const std::vector<BeliefMap>& finalStage() const { return stages.back(); }
};

struct GroundTruthMaps {
  std::vector<BeliefMap> maps;
  double sigmaImage = kDefaultSigmaImage;
};

/// Unnormalized Gaussian (peak 1 at the vertex) per vertex. Throws
/// OutOfFrame for vertices outside [0, 400).
GroundTruthMaps makeGroundTruthMaps(std::span<const Vec2> vertices,
                                    double sigmaImage = kDefaultSigmaImage);

/// Per-stage loss: sum over vertices and cells of |predicted - truth|.
/// Throws ShapeError on mismatched p.
double stageLoss(std::span<const BeliefMap> predicted, const GroundTruthMaps& truth);
/// Sum of stageLoss over every stage of the stack.
double totalLoss(const BeliefStack& stack, const GroundTruthMaps& truth);

/// Decodes a map to image coordinates.
///
/// The coarse estimate is the soft-argmax over max-normalized beliefs,
/// w = softmax(beta * g / max g), taking the expected cell center. When the
/// cell nearest that estimate carries positive belief and its row/column
/// neighbours are log-concave, the estimate is refined with one Newton step
/// on log g, which is exact for Gaussian belief maps. Throws NoDetection for
/// an all-zero map.
Vec2 softArgmax(const BeliefMap& map, double beta = kDefaultSoftArgmaxBeta);

/// Only the coarse expectation, without sub-cell refinement.
Vec2 softArgmaxCoarse(const BeliefMap& map, double beta = kDefaultSoftArgmaxBeta);

/// Mean over maps of the per-map maximum.
double detectionConfidence(std::span<const BeliefMap> maps);
inline bool isDetected(double confidence, double threshold = kDefaultDetectionThreshold) {
  return confidence >= threshold;
}

// "BMAP" files: little-endian header {magic, version u32, t, p, h, w as u32}
// followed by float32 cells, stage-major, vertex-major, row-major.
inline constexpr std::uint32_t kBeliefFileVersion = 1;
void writeBeliefStack(const std::filesystem::path& path, const BeliefStack& stack);
BeliefStack readBeliefStack(const std::filesystem::path& path);

}  // namespace cubeprog
