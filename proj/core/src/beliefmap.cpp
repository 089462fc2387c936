// Copyright (C) 2026 The cubeprog Authors
// SPDX-License-Identifier: Apache-2.0

#include "cubeprog/beliefmap.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "binary_io.hpp"
#include "cubeprog/error.hpp"

namespace cubeprog {

namespace {

// Vertex of the parabola through log-beliefs at cells s, s+1, s+2, or
// nullopt when the samples are not strictly positive and log-concave.
std::optional<double> logQuadraticPeak(double g0, double g1, double g2, int s) {
  if (!(g0 > 0 && g1 > 0 && g2 > 0)) return std::nullopt;
  const double l0 = std::log(g0), l1 = std::log(g1), l2 = std::log(g2);
  const double curvature = l0 - 2 * l1 + l2;
  if (!(curvature < 0)) return std::nullopt;
  const double offset = (l0 - l2) / (2 * curvature);
  if (std::abs(offset) > 2.0) return std::nullopt;
  return s + 1 + offset;
}

}  // namespace

BeliefMap::BeliefMap(Eigen::ArrayXXd grid) : grid_(std::move(grid)) {
  if (grid_.rows() != kMapSize || grid_.cols() != kMapSize)
    throw ShapeError("belief maps are 50x50");
}

GroundTruthMaps makeGroundTruthMaps(std::span<const Vec2> vertices, double sigmaImage) {
  GroundTruthMaps out;
  out.sigmaImage = sigmaImage;
  const double sigmaMap = sigmaImage / kMapStride;
  const double inv2s2 = 1.0 / (2 * sigmaMap * sigmaMap);
  for (const Vec2& v : vertices) {
    if (!(v.x() >= 0 && v.x() < kImageSize && v.y() >= 0 && v.y() < kImageSize))
      throw OutOfFrame("vertex (" + std::to_string(v.x()) + ", " + std::to_string(v.y()) +
                       ") outside the 400x400 frame");
    const double cu = imageToCell(v.x()), cv = imageToCell(v.y());
    BeliefMap map;
    Eigen::ArrayXd gu(kMapSize), gv(kMapSize);
    for (int k = 0; k < kMapSize; ++k) {
      gu[k] = std::exp(-(k - cu) * (k - cu) * inv2s2);
      gv[k] = std::exp(-(k - cv) * (k - cv) * inv2s2);
    }
    map.grid() = (gv.matrix() * gu.matrix().transpose()).array();
    out.maps.push_back(std::move(map));
  }
  return out;
}

double stageLoss(std::span<const BeliefMap> predicted, const GroundTruthMaps& truth) {
  if (predicted.size() != truth.maps.size())
    throw ShapeError("stage has " + std::to_string(predicted.size()) + " maps, truth has " +
                     std::to_string(truth.maps.size()));
  double loss = 0.0;
  for (std::size_t j = 0; j < predicted.size(); ++j)
    loss += (predicted[j].grid() - truth.maps[j].grid()).abs().sum();
  return loss;
}

double totalLoss(const BeliefStack& stack, const GroundTruthMaps& truth) {
  double loss = 0.0;
  for (const auto& stage : stack.stages) loss += stageLoss(stage, truth);
  return loss;
}

Vec2 softArgmaxCoarse(const BeliefMap& map, double beta) {
  const double peak = map.maxValue();
  if (!(peak > 0)) throw NoDetection("belief map is identically zero");
  // subtracting beta keeps the exponent <= 0
  const Eigen::ArrayXXd w = (beta * (map.grid() / peak - 1.0)).exp();
  const double total = w.sum();
  const Eigen::ArrayXd colMass = w.colwise().sum().transpose();  // per u
  const Eigen::ArrayXd rowMass = w.rowwise().sum();              // per v
  double u = 0, v = 0;
  for (int k = 0; k < kMapSize; ++k) {
    u += colMass[k] * cellToImage(k);
    v += rowMass[k] * cellToImage(k);
  }
  return {u / total, v / total};
}

Vec2 softArgmax(const BeliefMap& map, double beta) {
  const Vec2 coarse = softArgmaxCoarse(map, beta);
  const int a = std::clamp(static_cast<int>(std::lround(imageToCell(coarse.x()))), 0, kMapSize - 1);
  const int b = std::clamp(static_cast<int>(std::lround(imageToCell(coarse.y()))), 0, kMapSize - 1);
  if (!(map.at(a, b) > 0)) return coarse;

  const int su = std::clamp(a - 1, 0, kMapSize - 3);
  const int sv = std::clamp(b - 1, 0, kMapSize - 3);
  const auto pu = logQuadraticPeak(map.at(su, b), map.at(su + 1, b), map.at(su + 2, b), su);
  const auto pv = logQuadraticPeak(map.at(a, sv), map.at(a, sv + 1), map.at(a, sv + 2), sv);
  return {pu ? cellToImage(*pu) : coarse.x(), pv ? cellToImage(*pv) : coarse.y()};
}

double detectionConfidence(std::span<const BeliefMap> maps) {
  if (maps.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& m : maps) sum += m.maxValue();
  return sum / double(maps.size());
}

void writeBeliefStack(const std::filesystem::path& path, const BeliefStack& stack) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  detail::putMagic(os, "BMAP");
  detail::putU32(os, kBeliefFileVersion);
  detail::putU32(os, static_cast<std::uint32_t>(stack.t()));
  detail::putU32(os, static_cast<std::uint32_t>(stack.p()));
  detail::putU32(os, kMapSize);
  detail::putU32(os, kMapSize);
  for (const auto& stage : stack.stages) {
    if (stage.size() != stack.p()) throw ShapeError("stages disagree on p");
    for (const auto& map : stage)
      for (int r = 0; r < kMapSize; ++r)
        for (int c = 0; c < kMapSize; ++c)
          detail::putF32(os, static_cast<float>(map.grid()(r, c)));
  }
  if (!os) throw IoError("write failed for " + path.string());
}

BeliefStack readBeliefStack(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path.string());
  detail::expectMagic(is, "BMAP");
  const std::uint32_t version = detail::getU32(is);
  if (version != kBeliefFileVersion)
    throw VersionMismatch("BMAP version " + std::to_string(version) + ", expected " +
                          std::to_string(kBeliefFileVersion));
  const std::uint32_t t = detail::getU32(is), p = detail::getU32(is);
  const std::uint32_t h = detail::getU32(is), w = detail::getU32(is);
  if (h != kMapSize || w != kMapSize) throw FormatError("unsupported map size");
  if (t > 1024 || p > 1024) throw FormatError("implausible belief stack header");
  BeliefStack stack;
  stack.stages.assign(t, std::vector<BeliefMap>(p));
  for (auto& stage : stack.stages)
    for (auto& map : stage)
      for (int r = 0; r < kMapSize; ++r)
        for (int c = 0; c < kMapSize; ++c) map.grid()(r, c) = detail::getF32(is);
  return stack;
}

}  // namespace cubeprog
