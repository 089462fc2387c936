// Copyright (C) 2026 The cubeprog Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "cubeprog/error.hpp"
#include "cubeprog/metrics.hpp"
#include "cubeprog/rng.hpp"

namespace cubeprog {
namespace {

std::vector<MetricSample> samples(std::initializer_list<double> ds, double area = 100.0,
                                  double eps = 0.5) {
  std::vector<MetricSample> out;
  for (double d : ds) out.push_back({d, area, eps});
  return out;
}

TEST(Aggregate, AllWithinThreshold) {
  const auto r = aggregate(samples({0, 0, 3, 4}));
  EXPECT_DOUBLE_EQ(r.mae, 1.75);
  EXPECT_DOUBLE_EQ(r.pckh, 1.0);
  ASSERT_TRUE(r.maec);
  EXPECT_DOUBLE_EQ(*r.maec, 1.75);
  EXPECT_EQ(r.n, 4u);
}

TEST(Aggregate, OneOutlier) {
  const auto r = aggregate(samples({0, 12}));
  EXPECT_DOUBLE_EQ(r.mae, 6.0);
  EXPECT_DOUBLE_EQ(r.pckh, 0.5);
  ASSERT_TRUE(r.maec);
  EXPECT_DOUBLE_EQ(*r.maec, 0.0);
}

TEST(Aggregate, PerfectDetection) {
  const auto r = aggregate(samples({0, 0, 0}));
  EXPECT_EQ(r.mae, 0.0);
  EXPECT_EQ(r.pckh, 1.0);
  EXPECT_EQ(*r.maec, 0.0);
}

TEST(Aggregate, NoCorrectSampleLeavesMaecAbsent) {
  const auto r = aggregate(samples({20, 30}));
  EXPECT_EQ(r.pckh, 0.0);
  EXPECT_FALSE(r.maec);
}

TEST(Aggregate, ThresholdIsInclusive) {
  EXPECT_TRUE((MetricSample{5.0, 100.0, 0.5}.correct()));
  EXPECT_FALSE((MetricSample{5.0 + 1e-9, 100.0, 0.5}.correct()));
}

TEST(Aggregate, EmptyThrows) {
  std::vector<MetricSample> none;
  EXPECT_THROW(aggregate(none), EmptyInput);
}

TEST(Fnr, Counts) {
  const bool a[] = {true, true, false};
  EXPECT_EQ(fnr(a).missed, 1u);
  EXPECT_EQ(fnr(a).total, 3u);
  const bool all[] = {true, true, true, true};
  EXPECT_EQ(fnr(all).missed, 0u);
  std::vector<char> big(219, 1);
  big[5] = big[77] = big[200] = 0;
  auto flags = std::make_unique<bool[]>(big.size());
  std::copy(big.begin(), big.end(), flags.get());
  const FnrCount c = fnr(std::span<const bool>(flags.get(), big.size()));
  EXPECT_EQ(c.missed, 3u);
  EXPECT_EQ(c.total, 219u);
}

TEST(Report, JsonShape) {
  MetricReport r = aggregate(samples({0, 12}));
  r.fnr = {3, 219};
  const nlohmann::json j = r;
  for (const char* k : {"mae", "pckh", "maec", "fnrMissed", "fnrTotal", "epsilon", "n"})
    EXPECT_TRUE(j.contains(k)) << k;
  const MetricReport back = j.get<MetricReport>();
  EXPECT_EQ(back.fnr.missed, 3u);
  EXPECT_EQ(back.maec, r.maec);
}

std::vector<MetricSample> randomSamples(Rng& rng, std::size_t count, double eps) {
  std::vector<MetricSample> out;
  for (std::size_t i = 0; i < count; ++i)
    out.push_back({uniform(rng, 0, 30), uniform(rng, 50, 5000), eps});
  return out;
}

TEST(Properties, ScaleConsistency) {
  Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    const auto base = randomSamples(rng, 1 + uniformIndex(rng, 40), 0.5);
    const double k = uniform(rng, 0.1, 10.0);
    auto scaled = base;
    for (auto& s : scaled) {
      s.d *= k;
      s.hullArea *= k * k;
    }
    const auto a = aggregate(base), b = aggregate(scaled);
    EXPECT_DOUBLE_EQ(a.pckh, b.pckh);
    EXPECT_NEAR(b.mae, k * a.mae, 1e-9 * (1 + b.mae));
    ASSERT_EQ(a.maec.has_value(), b.maec.has_value());
    if (a.maec) EXPECT_NEAR(*b.maec, k * *a.maec, 1e-9 * (1 + *b.maec));
  }
}

TEST(Properties, PckhMonotoneInEpsilon) {
  Rng rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    auto s = randomSamples(rng, 1 + uniformIndex(rng, 40), 0.0);
    double previous = 1.0;
    for (double eps = 1.0; eps >= 0.0; eps -= 0.05) {
      for (auto& x : s) x.epsilon = eps;
      const double p = aggregate(s).pckh;
      EXPECT_LE(p, previous + 1e-15);
      previous = p;
    }
  }
}

TEST(Properties, MaecBoundedAndBelowMae) {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const double area = uniform(rng, 50, 5000);
    std::vector<MetricSample> s;
    for (int i = 0; i < 20; ++i) s.push_back({uniform(rng, 0, 30), area, 0.5});
    const auto r = aggregate(s);
    if (!r.maec) continue;
    EXPECT_LE(*r.maec, 0.5 * std::sqrt(area) + 1e-12);
    EXPECT_LE(*r.maec, r.mae + 1e-12);
  }
}

}  // namespace
}  // namespace cubeprog
