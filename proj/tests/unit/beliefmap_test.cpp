// Copyright (C) 2026 The cubeprog Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <fstream>
#include <filesystem>
#include <vector>

#include <gtest/gtest.h>

#include "cubeprog/beliefmap.hpp"
#include "cubeprog/error.hpp"

namespace cubeprog {
namespace {

std::vector<Vec2> sevenAt(const Vec2& v) { return std::vector<Vec2>(7, v); }

BeliefMap gaussianAt(const Vec2& v) {
  const std::vector<Vec2> one = {v};
  return makeGroundTruthMaps(one).maps[0];
}

TEST(GroundTruth, PeakAtCellCenter) {
  const BeliefMap m = gaussianAt({99.5, 275.5});
  Eigen::Index row, col;
  m.grid().maxCoeff(&row, &col);
  EXPECT_EQ(col, 12);
  EXPECT_EQ(row, 34);
  EXPECT_DOUBLE_EQ(m.at(12, 34), 1.0);
}

TEST(GroundTruth, HalfCellOffsetSplitsEvenly) {
  const BeliefMap m = gaussianAt({103.5, 275.5});
  EXPECT_NEAR(m.at(12, 34), m.at(13, 34), 1e-12);
  // Hand evaluation: 4 px from either center, sigma 3.4 px.
  EXPECT_NEAR(m.at(12, 34), std::exp(-16.0 / (2 * 3.4 * 3.4)), 1e-12);
  EXPECT_EQ(m.grid().maxCoeff(), m.at(12, 34));
}

TEST(GroundTruth, OutOfFrameThrows) {
  const std::vector<Vec2> v = {{99.5 + 400, 275.5}};
  EXPECT_THROW(makeGroundTruthMaps(v), OutOfFrame);
  const std::vector<Vec2> neg = {{-1.0, 10.0}};
  EXPECT_THROW(makeGroundTruthMaps(neg), OutOfFrame);
}

TEST(GroundTruth, CellFormula) {
  const Vec2 v(140.2, 61.7);
  const BeliefMap m = gaussianAt(v);
  const double sigmaCells = 3.4 / 8.0;
  for (int a = 10; a < 25; ++a)
    for (int b = 0; b < 15; ++b) {
      const double du = imageToCell(v.x()) - a, dv = imageToCell(v.y()) - b;
      EXPECT_NEAR(m.at(a, b), std::exp(-(du * du + dv * dv) / (2 * sigmaCells * sigmaCells)),
                  1e-12);
    }
}

TEST(StageLoss, ZeroOnIdenticalInput) {
  const auto gt = makeGroundTruthMaps(sevenAt({cellToImage(14), cellToImage(27)}));
  EXPECT_EQ(stageLoss(gt.maps, gt), 0.0);
}

TEST(StageLoss, ConstantOffsetOnOneMap) {
  const auto gt = makeGroundTruthMaps(sevenAt({cellToImage(14), cellToImage(27)}));
  auto pred = gt.maps;
  pred[3].grid() += 0.1;
  // Per-pixel magnitudes summed over the 50 x 50 grid.
  EXPECT_NEAR(stageLoss(pred, gt), 0.1 * 2500, 1e-9);
}

TEST(StageLoss, Homogeneous) {
  const auto gt = makeGroundTruthMaps(sevenAt({cellToImage(14), cellToImage(27)}));
  Rng rng(9);
  auto once = gt.maps, twice = gt.maps;
  for (std::size_t k = 0; k < once.size(); ++k)
    for (int a = 0; a < kMapSize; ++a)
      for (int b = 0; b < kMapSize; ++b) {
        const double e = uniform(rng, 0.0, 0.2);
        once[k].at(a, b) += e;
        twice[k].at(a, b) += 2 * e;
      }
  EXPECT_NEAR(stageLoss(twice, gt), 2 * stageLoss(once, gt), 1e-9);
}

TEST(StageLoss, ShapeMismatchThrows) {
  const auto gt = makeGroundTruthMaps(sevenAt({cellToImage(14), cellToImage(27)}));
  std::vector<BeliefMap> six(gt.maps.begin(), gt.maps.begin() + 6);
  EXPECT_THROW(stageLoss(six, gt), ShapeError);
}

TEST(StageLoss, TotalOverIdenticalStagesIsAdditive) {
  const auto gt = makeGroundTruthMaps(sevenAt({cellToImage(14), cellToImage(27)}));
  auto stage = gt.maps;
  stage[0].grid() += 0.05;
  BeliefStack stack;
  stack.stages.assign(6, stage);
  EXPECT_NEAR(totalLoss(stack, gt), 6 * stageLoss(stage, gt), 1e-9);
}

TEST(StageLoss, NonNegativeAndPositiveWhenDifferent) {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto gt = makeGroundTruthMaps(sevenAt({uniform(rng, 20, 380), uniform(rng, 20, 380)}));
    auto pred = makeGroundTruthMaps(sevenAt({uniform(rng, 20, 380), uniform(rng, 20, 380)})).maps;
    EXPECT_GT(stageLoss(pred, gt), 0.0);
  }
}

TEST(SoftArgmax, OneHotDecodesToCellCenter) {
  for (double beta : {50.0, 100.0, 1000.0}) {
    BeliefMap m;
    m.at(12, 34) = 1.0;
    const Vec2 p = softArgmax(m, beta);
    EXPECT_NEAR(p.x(), 99.5, 1e-9) << beta;
    EXPECT_NEAR(p.y(), 275.5, 1e-9) << beta;
  }
}

TEST(SoftArgmax, TwoEqualPeaksGiveMidpoint) {
  BeliefMap m;
  m.at(10, 10) = 1.0;
  m.at(10, 20) = 1.0;
  const Vec2 p = softArgmaxCoarse(m);
  EXPECT_NEAR(p.x(), 83.5, 1e-9);
  EXPECT_NEAR(p.y(), 123.5, 1e-9);
}

TEST(SoftArgmax, HalfCellGaussian) {
  const Vec2 p = softArgmax(gaussianAt({103.5, 275.5}));
  EXPECT_LT((p - Vec2(103.5, 275.5)).norm(), 0.25);
}

TEST(SoftArgmax, AllZeroIsNoDetection) { EXPECT_THROW(softArgmax(BeliefMap{}), NoDetection); }

TEST(SoftArgmax, InvariantToPositiveScale) {
  Rng rng(2);
  for (int trial = 0; trial < 50; ++trial) {
    BeliefMap m = gaussianAt({uniform(rng, 10, 390), uniform(rng, 10, 390)});
    m.grid() += 0.01 * Eigen::ArrayXXd::Random(kMapSize, kMapSize).abs();
    BeliefMap scaled = m;
    scaled.grid() *= uniform(rng, 0.01, 50.0);
    EXPECT_LT((softArgmax(m) - softArgmax(scaled)).norm(), 1e-9);
  }
}

TEST(SoftArgmax, RoundTripProperty) {
  Rng rng(17);
  const double margin = 2 * kDefaultSigmaImage;
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const Vec2 v(uniform(rng, margin, 400 - margin), uniform(rng, margin, 400 - margin));
    worst = std::max(worst, (softArgmax(gaussianAt(v)) - v).norm());
  }
  EXPECT_LT(worst, 0.25);
}

TEST(Detection, ConfidenceAndThreshold) {
  const auto gt = makeGroundTruthMaps(sevenAt({cellToImage(14), cellToImage(27)}));
  EXPECT_DOUBLE_EQ(detectionConfidence(gt.maps), 1.0);
  EXPECT_TRUE(isDetected(detectionConfidence(gt.maps)));

  std::vector<BeliefMap> zeros(7);
  EXPECT_DOUBLE_EQ(detectionConfidence(zeros), 0.0);
  EXPECT_FALSE(isDetected(0.0));

  auto faint = gt.maps;
  for (auto& m : faint) m.grid() *= 0.15;
  EXPECT_NEAR(detectionConfidence(faint), 0.15, 1e-12);
  EXPECT_FALSE(isDetected(detectionConfidence(faint)));
}

TEST(BeliefFile, RoundTripAndVersionCheck) {
  BeliefStack s;
  s.stages.assign(2, makeGroundTruthMaps(sevenAt({120.25, 220.75})).maps);
  const auto path = std::filesystem::temp_directory_path() / "cubeprog_bmap_test.bmap";
  writeBeliefStack(path, s);
  const BeliefStack back = readBeliefStack(path);
  ASSERT_EQ(back.t(), 2u);
  ASSERT_EQ(back.p(), 7u);
  EXPECT_TRUE(back.stages[1][4].grid().isApprox(s.stages[1][4].grid(), 1e-7));

  std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
  f.seekp(4);
  const char bad[4] = {9, 0, 0, 0};
  f.write(bad, 4);
  f.close();
  EXPECT_THROW(readBeliefStack(path), VersionMismatch);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace cubeprog
