// Copyright (C) 2026 The cubeprog Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include <nlohmann/json_fwd.hpp>

namespace cubeprog {

inline constexpr double kDefaultPckEpsilon = 0.5;

/// One vertex error, normalized by the size of its own cube in the image.
struct MetricSample {
  double d = 0.0;         // pixels
  double hullArea = 1.0;  // pixels^2 of that cube's projected hull
  double epsilon = kDefaultPckEpsilon;

  /// c_i: the error is within epsilon * sqrt(A).
  bool correct() const;
};

struct FnrCount {
  std::size_t missed = 0;
  std::size_t total = 0;
};

struct MetricReport {
  double mae = 0.0;
  double pckh = 0.0;
  std::optional<double> maec;  // absent when no sample is correct
  FnrCount fnr;
  double epsilon = kDefaultPckEpsilon;
  std::size_t n = 0;
};

/// Evaluates sum(phi * delta) / sum(psi) for MAE, PCKh and MAEc over the
/// samples of detected cubes. Throws EmptyInput for an empty list.
MetricReport aggregate(std::span<const MetricSample> samples);

FnrCount fnr(std::span<const bool> detections);

void to_json(nlohmann::json& j, const MetricReport& r);
void from_json(const nlohmann::json& j, MetricReport& r);

}  // namespace cubeprog
