// Copyright (C) 2026 The cubeprog Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "cubeprog/error.hpp"
#include "cubeprog/geometry.hpp"

namespace cubeprog {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

struct Structure {
  bool pyramid = false;
  // stack: bottom to top. pyramid: left base, right base, top, tower...
  std::vector<int> ids;

  double radius(double edge) const { return (pyramid ? 1.15 : 0.75) * edge; }
};

std::vector<Structure> chooseStructures(Rng& rng, const SceneGenConfig& cfg,
                                        const std::vector<int>& colors) {
  std::vector<Structure> out;
  const std::size_t n = colors.size();
  switch (cfg.structure) {
    case StructureKind::Flat:
      for (int c : colors) out.push_back({false, {c}});
      break;
    case StructureKind::SingleStack:
      out.push_back({false, colors});
      break;
    case StructureKind::Pyramid:
      if (n < 3) throw ConfigError("pyramid scenes need at least 3 cubes");
      out.push_back({true, {colors[0], colors[1], colors[2]}});
      for (std::size_t i = 3; i < n; ++i) out.push_back({false, {colors[i]}});
      break;
    case StructureKind::Mixed: {
      std::size_t next = 0;
      if (n >= 3 && uniform01(rng) < cfg.pyramidProb) {
        out.push_back({true, {colors[0], colors[1], colors[2]}});
        next = 3;
      }
      for (; next < n; ++next) {
        if (out.empty() || uniform01(rng) < cfg.singletonBias) {
          out.push_back({false, {colors[next]}});
        } else {
          out[uniformIndex(rng, out.size())].ids.push_back(colors[next]);
        }
      }
      break;
    }
  }
  return out;
}

void placeStructure(const Structure& s, const Vec2& at, double yaw, Rng& rng,
                    const SceneGenConfig& cfg, Scene& scene) {
  const double e = cfg.edge;
  auto push = [&](int color, Vec3 center, double cubeYaw) {
    scene.cuboids.push_back({center, cubeYaw, e, color});
  };
  auto jitter = [&] { return uniform(rng, -cfg.stackYawJitter, cfg.stackYawJitter); };

  if (!s.pyramid) {
    for (std::size_t k = 0; k < s.ids.size(); ++k)
      push(s.ids[k], {at.x(), at.y(), e / 2 + e * double(k)}, yaw + jitter());
    return;
  }
  // bases stay axis aligned so the Left contact is exact in the table frame
  push(s.ids[0], {at.x() - e / 2, at.y(), e / 2}, 0.0);
  push(s.ids[1], {at.x() + e / 2, at.y(), e / 2}, 0.0);
  push(s.ids[2], {at.x(), at.y(), 1.5 * e}, 0.0);
  for (std::size_t k = 3; k < s.ids.size(); ++k)
    push(s.ids[k], {at.x(), at.y(), 1.5 * e + e * double(k - 2)}, jitter());
}

bool faceOnView(const Scene& scene, const Vec3& eye) {
  constexpr double kMinOffset = 2.0 * kDeg;
  for (const auto& c : scene.cuboids) {
    const Vec3 d = eye - c.center;
    double rel = std::atan2(d.y(), d.x()) - c.yaw;
    rel = std::fmod(rel, std::numbers::pi / 2);
    if (rel < 0) rel += std::numbers::pi / 2;
    if (rel < kMinOffset || rel > std::numbers::pi / 2 - kMinOffset) return true;
  }
  return false;
}

bool framed(const Scene& scene, const CameraModel& cam, double margin) {
  for (const auto& c : scene.cuboids)
    for (const auto& w : cornersWorld(c)) {
      if (cam.toCamera(w).z() <= 1e-3) return false;
      if (!cam.inImage(cam.project(w), margin)) return false;
    }
  return true;
}

}  // namespace

GeneratedScene randomizeScene(Rng& rng, const SceneGenConfig& cfg) {
  const auto& palette = defaultPalette();
  std::vector<int> colors;

  if (!cfg.layout.empty()) {
    for (const auto& stack : cfg.layout)
      for (int c : stack) {
        if (c < 0 || static_cast<std::size_t>(c) >= palette.size())
          throw ConfigError("layout colorId out of palette range");
        if (std::find(colors.begin(), colors.end(), c) != colors.end())
          throw ConfigError("layout repeats a colorId");
        colors.push_back(c);
      }
  } else {
    if (cfg.nMin < 1 || cfg.nMin > cfg.nMax) throw ConfigError("invalid n range");
    if (static_cast<std::size_t>(cfg.nMax) > palette.size())
      throw ConfigError("n exceeds palette size (" + std::to_string(palette.size()) + ")");
    if (!(cfg.edge > 0)) throw ConfigError("edge must be positive");
    const int n = cfg.nMin + static_cast<int>(uniformIndex(rng, cfg.nMax - cfg.nMin + 1));
    colors.resize(palette.size());
    std::iota(colors.begin(), colors.end(), 0);
    for (std::size_t i = colors.size() - 1; i > 0; --i)
      std::swap(colors[i], colors[uniformIndex(rng, i + 1)]);
    colors.resize(n);
  }

  std::vector<Structure> structures;
  if (!cfg.layout.empty()) {
    for (const auto& stack : cfg.layout)
      if (!stack.empty()) structures.push_back({false, stack});
  } else {
    structures = chooseStructures(rng, cfg, colors);
  }

  GeneratedScene out;
  // Early structures can box out later ones; start the table over when that
  // happens.
  bool placedAll = false;
  for (int restart = 0; restart < 200 && !placedAll; ++restart) {
    out.scene.cuboids.clear();
    std::vector<Vec2> placed;
    std::vector<double> radii;
    placedAll = true;
    for (const auto& s : structures) {
      const double r = s.radius(cfg.edge);
      bool ok = false;
      Vec2 at;
      for (int attempt = 0; attempt < 2000 && !ok; ++attempt) {
        at = {uniform(rng, -cfg.tableHalfExtent, cfg.tableHalfExtent),
              uniform(rng, -cfg.tableHalfExtent, cfg.tableHalfExtent)};
        ok = true;
        for (std::size_t k = 0; k < placed.size() && ok; ++k)
          ok = (at - placed[k]).norm() >= r + radii[k] + cfg.structureGap;
      }
      if (!ok) {
        placedAll = false;
        break;
      }
      placed.push_back(at);
      radii.push_back(r);
      placeStructure(s, at, uniform(rng, 0.0, std::numbers::pi / 2), rng, cfg, out.scene);
    }
  }
  if (!placedAll) throw ConfigError("table too small for the requested structures");
  validateScene(out.scene);

  Vec3 centroid = Vec3::Zero();
  for (const auto& c : out.scene.cuboids) centroid += c.center;
  centroid /= double(out.scene.n());

  for (int attempt = 0; attempt < 500; ++attempt) {
    const double az = uniform(rng, cfg.azimuthMinDeg, cfg.azimuthMaxDeg) * kDeg;
    const double el = uniform(rng, cfg.elevationMinDeg, cfg.elevationMaxDeg) * kDeg;
    const double dist = uniform(rng, cfg.cameraDistanceMin, cfg.cameraDistanceMax);
    const Vec3 target = centroid + Vec3(uniform(rng, -cfg.targetJitter, cfg.targetJitter),
                                        uniform(rng, -cfg.targetJitter, cfg.targetJitter), 0.0);
    const Vec3 eye = target + dist * Vec3(std::cos(el) * std::cos(az),
                                          std::cos(el) * std::sin(az), std::sin(el));
    if (faceOnView(out.scene, eye)) continue;
    CameraModel cam = CameraModel::lookAt(eye, target);
    if (!framed(out.scene, cam, cfg.imageMargin)) continue;
    out.camera = cam;
    return out;
  }
  throw ConfigError("could not frame the scene; widen camera distance range");
}

}  // namespace cubeprog
