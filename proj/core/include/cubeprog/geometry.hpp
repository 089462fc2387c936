// Copyright (C) 2026 The cubeprog Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "cubeprog/rng.hpp"
#include "cubeprog/state_tensor.hpp"

namespace cubeprog {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Polygon = std::vector<Vec2>;

inline constexpr double kDefaultEdge = 0.05;
inline constexpr int kImageSize = 400;

/// Named colors in colorId order.
const std::vector<std::string>& defaultPalette();

struct CuboidPose {
  Vec3 center = Vec3::Zero();
  double yaw = 0.0;
  double edge = kDefaultEdge;
  int colorId = 0;
};

struct Scene {
  std::vector<CuboidPose> cuboids;
  std::vector<std::string> palette = defaultPalette();

  std::size_t n() const noexcept { return cuboids.size(); }
  /// Index of the cuboid carrying colorId, if present.
  std::optional<std::size_t> findColor(int colorId) const;
  std::string colorName(std::size_t index) const;
};

/// Throws InvalidScene on: edge <= 0, table penetration, repeated colorIds,
/// or two cuboids interpenetrating by more than `tolerance` meters.
void validateScene(const Scene& scene, double tolerance = 1e-6);

/// Pinhole camera; p_cam = rotation * p_world + translation, with camera
/// axes x right, y down, z forward.
struct CameraModel {
  double fx = 400.0, fy = 400.0;
  double cx = 200.0, cy = 200.0;
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();
  int width = kImageSize, height = kImageSize;

  Vec3 toCamera(const Vec3& world) const { return rotation * world + translation; }
  Vec3 position() const { return -rotation.transpose() * translation; }
  /// Throws BehindCamera when the point has non-positive depth.
  Vec2 project(const Vec3& world) const;
  bool inImage(const Vec2& p, double margin = 0.0) const;

  /// Camera at `eye` looking at `target`, with world +z projecting upward.
  static CameraModel lookAt(const Vec3& eye, const Vec3& target);
};

/// Corner `index` in canonical binary order: bit 2 selects +x, bit 1 +y,
/// bit 0 +z in the cuboid's own (yawed) frame.
Vec3 cornerOffset(int index, double edge);
Vec3 cornerWorld(const CuboidPose& c, int index);
std::array<Vec3, 8> cornersWorld(const CuboidPose& c);

struct ProjectedCuboid {
  std::array<Vec2, 8> vertices;
  std::array<double, 8> depth{};  // camera-frame z per vertex
  int hiddenIndex = -1;
  std::array<bool, 8> occludedByOther{};
  /// Cuboid index that occludes each vertex, or -1.
  std::array<int, 8> occluder{};
  double hullArea = 0.0;

  /// The seven non-hidden vertices in canonical order.
  std::array<Vec2, 7> visible() const;
};

ProjectedCuboid projectCuboid(const Scene& scene, const CameraModel& camera,
                              std::size_t index);
std::vector<ProjectedCuboid> projectScene(const Scene& scene, const CameraModel& camera);

/// Counter-clockwise hull (Andrew's monotone chain), collinear points dropped.
Polygon convexHull(std::span<const Vec2> points);
/// Throws DegenerateHull for fewer than 3 points or a zero-area hull.
double convexHullArea(std::span<const Vec2> points);
double polygonArea(std::span<const Vec2> polygon);
bool insideConvex(std::span<const Vec2> ccwPolygon, const Vec2& p, double eps = 1e-12);
/// Intersection of two convex CCW polygons (Sutherland-Hodgman).
Polygon clipConvex(std::span<const Vec2> subject, std::span<const Vec2> clip);

/// Contact tolerances, as fractions of the cube edge.
struct ContactTolerance {
  double verticalGap = 0.1;
  double minFaceOverlap = 0.25;
  double maxLateralGap = 0.5;
  double sameHeight = 0.1;
};

/// Binary relations of a scene: Above(i,j) when i rests on j, Left(i,j)
/// when i sits beside j on the -x side (table frame) at the same height.
StateTensor groundTruthRelations(const Scene& scene, const ContactTolerance& tol = {});

enum class StructureKind { Flat, SingleStack, Pyramid, Mixed };

/// Scene-generation parameters. `layout`, when non-empty, overrides the
/// random structure choice: each inner list is one stack given bottom to
/// top by colorId.
struct SceneGenConfig {
  int nMin = 2;
  int nMax = 5;
  StructureKind structure = StructureKind::Mixed;
  double pyramidProb = 0.3;   // Mixed: chance of one pyramid when n >= 3
  double singletonBias = 0.4; // Mixed: chance a cube starts its own stack
  std::vector<std::vector<int>> layout;
  double edge = kDefaultEdge;
  double tableHalfExtent = 0.14;
  double structureGap = 0.04;  // clearance between structure bounding circles
  double stackYawJitter = 0.35;     // radians, per cube in stacks
  double cameraDistanceMin = 0.55, cameraDistanceMax = 0.8;
  double elevationMinDeg = 20.0, elevationMaxDeg = 60.0;
  // Camera on the -y side so table +x reads left-to-right in the image.
  double azimuthMinDeg = -150.0, azimuthMaxDeg = -30.0;
  double targetJitter = 0.03;
  double imageMargin = 8.0;  // pixels; every vertex lands inside this margin
};

struct GeneratedScene {
  Scene scene;
  CameraModel camera;
};

/// Deterministic for a given rng state. Structures are exact (zero contact
/// gaps). Throws ConfigError for infeasible configs.
GeneratedScene randomizeScene(Rng& rng, const SceneGenConfig& config);

/// Ray/oriented-box intersection; returns entry distance along `dir`.
std::optional<double> rayCuboidEntry(const Vec3& origin, const Vec3& dir,
                                     const CuboidPose& c);

}  // namespace cubeprog
