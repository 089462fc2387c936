// Copyright (C) 2026 The cubeprog Authors
// SPDX-License-Identifier: Apache-2.0

#include "cubeprog/metrics.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "cubeprog/error.hpp"

namespace cubeprog {

bool MetricSample::correct() const { return d / std::sqrt(hullArea) <= epsilon; }

MetricReport aggregate(std::span<const MetricSample> samples) {
  if (samples.empty()) throw EmptyInput("no metric samples");
  double sumD = 0, sumC = 0, sumCD = 0;
  for (const auto& s : samples) {
    if (!(s.d >= 0) || !(s.hullArea > 0)) throw EmptyInput("invalid metric sample");
    const double c = s.correct() ? 1.0 : 0.0;
    sumD += s.d;
    sumC += c;
    sumCD += c * s.d;
  }
  const double n = double(samples.size());
  MetricReport r;
  r.mae = sumD / n;
  r.pckh = sumC / n;
  if (sumC > 0) r.maec = sumCD / sumC;
  r.epsilon = samples.front().epsilon;
  r.n = samples.size();
  return r;
}

FnrCount fnr(std::span<const bool> detections) {
  FnrCount out;
  out.total = detections.size();
  for (bool d : detections) out.missed += d ? 0 : 1;
  return out;
}

void to_json(nlohmann::json& j, const MetricReport& r) {
  j = nlohmann::json{{"mae", r.mae},
                     {"pckh", r.pckh},
                     {"maec", r.maec ? nlohmann::json(*r.maec) : nlohmann::json(nullptr)},
                     {"fnrMissed", r.fnr.missed},
                     {"fnrTotal", r.fnr.total},
                     {"epsilon", r.epsilon},
                     {"n", r.n}};
}

void from_json(const nlohmann::json& j, MetricReport& r) {
  r.mae = j.at("mae").get<double>();
  r.pckh = j.at("pckh").get<double>();
  r.maec = j.at("maec").is_null() ? std::nullopt : std::optional<double>(j.at("maec").get<double>());
  r.fnr.missed = j.at("fnrMissed").get<std::size_t>();
  r.fnr.total = j.at("fnrTotal").get<std::size_t>();
  r.epsilon = j.at("epsilon").get<double>();
  r.n = j.at("n").get<std::size_t>();
}

}  // namespace cubeprog
