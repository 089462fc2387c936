// Copyright (C) 2026 The cubeprog Authors
// SPDX-License-Identifier: Apache-2.0

#include "cubeprog/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <Eigen/Geometry>

#include "cubeprog/error.hpp"

namespace cubeprog {

namespace {

double cross2(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

Mat3 yawMatrix(double yaw) {
  return Eigen::AngleAxisd(yaw, Vec3::UnitZ()).toRotationMatrix();
}

Polygon footprint(const CuboidPose& c) {
  // corners with z bit clear, reordered counter-clockwise
  const int order[4] = {0b000, 0b100, 0b110, 0b010};
  Polygon poly;
  poly.reserve(4);
  for (int idx : order) {
    Vec3 w = cornerWorld(c, idx);
    poly.emplace_back(w.x(), w.y());
  }
  return poly;
}

struct Extent {
  double lo, hi;
};

Extent axisExtent(const Polygon& poly, int axis) {
  Extent e{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (const auto& p : poly) {
    e.lo = std::min(e.lo, p[axis]);
    e.hi = std::max(e.hi, p[axis]);
  }
  return e;
}

}  // namespace

const std::vector<std::string>& defaultPalette() {
  static const std::vector<std::string> palette = {
      "red", "green", "blue", "yellow", "orange", "purple", "cyan", "magenta"};
  return palette;
}

std::optional<std::size_t> Scene::findColor(int colorId) const {
  for (std::size_t i = 0; i < cuboids.size(); ++i)
    if (cuboids[i].colorId == colorId) return i;
  return std::nullopt;
}

std::string Scene::colorName(std::size_t index) const {
  const int id = cuboids.at(index).colorId;
  if (id >= 0 && static_cast<std::size_t>(id) < palette.size()) return palette[id];
  return "object" + std::to_string(id);
}

void validateScene(const Scene& scene, double tolerance) {
  std::set<int> colors;
  for (const auto& c : scene.cuboids) {
    if (!(c.edge > 0.0)) throw InvalidScene("cuboid edge must be positive");
    if (c.center.z() < c.edge / 2 - tolerance)
      throw InvalidScene("cuboid penetrates the table plane");
    if (!colors.insert(c.colorId).second)
      throw InvalidScene("colorId " + std::to_string(c.colorId) + " repeated");
  }
  for (std::size_t i = 0; i < scene.n(); ++i) {
    for (std::size_t j = i + 1; j < scene.n(); ++j) {
      const auto& a = scene.cuboids[i];
      const auto& b = scene.cuboids[j];
      const double zOverlap = std::min(a.center.z() + a.edge / 2, b.center.z() + b.edge / 2) -
                              std::max(a.center.z() - a.edge / 2, b.center.z() - b.edge / 2);
      if (zOverlap <= tolerance) continue;
      const Polygon fa = footprint(a), fb = footprint(b);
      const Polygon inter = clipConvex(fa, fb);
      if (inter.size() >= 3 && polygonArea(inter) > tolerance * std::max(a.edge, b.edge))
        throw InvalidScene("cuboids " + std::to_string(i) + " and " + std::to_string(j) +
                           " interpenetrate");
    }
  }
}

Vec2 CameraModel::project(const Vec3& world) const {
  const Vec3 p = toCamera(world);
  if (p.z() <= 1e-9) throw BehindCamera("point has non-positive depth");
  return {fx * p.x() / p.z() + cx, fy * p.y() / p.z() + cy};
}

bool CameraModel::inImage(const Vec2& p, double margin) const {
  return p.x() >= margin && p.y() >= margin && p.x() <= width - margin &&
         p.y() <= height - margin;
}

CameraModel CameraModel::lookAt(const Vec3& eye, const Vec3& target) {
  const Vec3 forward = (target - eye).normalized();
  Vec3 right = forward.cross(Vec3::UnitZ());
  if (right.norm() < 1e-9) right = Vec3::UnitX();  // looking straight down
  right.normalize();
  const Vec3 down = forward.cross(right);
  CameraModel cam;
  cam.rotation.row(0) = right.transpose();
  cam.rotation.row(1) = down.transpose();
  cam.rotation.row(2) = forward.transpose();
  cam.translation = -cam.rotation * eye;
  return cam;
}

Vec3 cornerOffset(int index, double edge) {
  const double h = edge / 2;
  return {(index & 0b100) ? h : -h, (index & 0b010) ? h : -h, (index & 0b001) ? h : -h};
}

Vec3 cornerWorld(const CuboidPose& c, int index) {
  return c.center + yawMatrix(c.yaw) * cornerOffset(index, c.edge);
}

std::array<Vec3, 8> cornersWorld(const CuboidPose& c) {
  std::array<Vec3, 8> out;
  for (int i = 0; i < 8; ++i) out[i] = cornerWorld(c, i);
  return out;
}

std::array<Vec2, 7> ProjectedCuboid::visible() const {
  std::array<Vec2, 7> out;
  std::size_t k = 0;
  for (int i = 0; i < 8; ++i)
    if (i != hiddenIndex) out[k++] = vertices[i];
  return out;
}

std::optional<double> rayCuboidEntry(const Vec3& origin, const Vec3& dir,
                                     const CuboidPose& c) {
  const Mat3 rt = yawMatrix(c.yaw).transpose();
  const Vec3 o = rt * (origin - c.center);
  const Vec3 d = rt * dir;
  const double h = c.edge / 2;
  double tmin = -std::numeric_limits<double>::infinity();
  double tmax = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    if (std::abs(d[a]) < 1e-15) {
      if (o[a] < -h || o[a] > h) return std::nullopt;
      continue;
    }
    double t1 = (-h - o[a]) / d[a];
    double t2 = (h - o[a]) / d[a];
    if (t1 > t2) std::swap(t1, t2);
    tmin = std::max(tmin, t1);
    tmax = std::min(tmax, t2);
  }
  // grazing contact (tmin == tmax) is not an occlusion
  if (tmax <= tmin + 1e-12 || tmax < 0) return std::nullopt;
  return std::max(tmin, 0.0);
}

ProjectedCuboid projectCuboid(const Scene& scene, const CameraModel& camera,
                              std::size_t index) {
  if (index >= scene.n()) throw std::out_of_range("cuboid index out of range");
  const CuboidPose& c = scene.cuboids[index];
  const auto corners = cornersWorld(c);

  ProjectedCuboid out;
  for (int i = 0; i < 8; ++i) {
    const Vec3 pc = camera.toCamera(corners[i]);
    if (pc.z() <= 1e-9)
      throw BehindCamera("cuboid " + std::to_string(index) + " is behind the camera");
    out.depth[i] = pc.z();
    out.vertices[i] = {camera.fx * pc.x() / pc.z() + camera.cx,
                       camera.fy * pc.y() / pc.z() + camera.cy};
  }

  // back[axis][side]: face with outward normal (side ? + : -) axis
  const Vec3 eye = camera.position();
  const Mat3 rot = yawMatrix(c.yaw);
  bool back[3][2];
  for (int a = 0; a < 3; ++a) {
    for (int s = 0; s < 2; ++s) {
      const Vec3 normal = rot.col(a) * (s ? 1.0 : -1.0);
      const Vec3 faceCenter = c.center + normal * (c.edge / 2);
      back[a][s] = normal.dot(eye - faceCenter) <= 0.0;
    }
  }
  int bestCount = -1;
  for (int i = 0; i < 8; ++i) {
    const int count = int(back[0][(i >> 2) & 1]) + int(back[1][(i >> 1) & 1]) +
                      int(back[2][i & 1]);
    if (count > bestCount || (count == bestCount && out.depth[i] > out.depth[out.hiddenIndex])) {
      bestCount = count;
      out.hiddenIndex = i;
    }
  }

  out.occluder.fill(-1);
  for (int i = 0; i < 8; ++i) {
    const Vec3 ray = corners[i] - eye;
    const double dist = ray.norm();
    const Vec3 dir = ray / dist;
    double nearest = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < scene.n(); ++k) {
      if (k == index) continue;
      const auto t = rayCuboidEntry(eye, dir, scene.cuboids[k]);
      if (t && *t < dist - 1e-7 && *t < nearest) {
        nearest = *t;
        out.occluder[i] = static_cast<int>(k);
      }
    }
    out.occludedByOther[i] = out.occluder[i] >= 0;
  }

  out.hullArea = convexHullArea(out.vertices);
  return out;
}

std::vector<ProjectedCuboid> projectScene(const Scene& scene, const CameraModel& camera) {
  std::vector<ProjectedCuboid> out;
  out.reserve(scene.n());
  for (std::size_t i = 0; i < scene.n(); ++i) out.push_back(projectCuboid(scene, camera, i));
  return out;
}

Polygon convexHull(std::span<const Vec2> points) {
  std::vector<Vec2> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;

  Polygon hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross2(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross2(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

double polygonArea(std::span<const Vec2> polygon) {
  double twice = 0.0;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const Vec2& a = polygon[i];
    const Vec2& b = polygon[(i + 1) % polygon.size()];
    twice += a.x() * b.y() - b.x() * a.y();
  }
  return std::abs(twice) / 2;
}

double convexHullArea(std::span<const Vec2> points) {
  if (points.size() < 3) throw DegenerateHull("need at least 3 points");
  const Polygon hull = convexHull(points);
  const double area = hull.size() >= 3 ? polygonArea(hull) : 0.0;
  if (area <= 1e-12) throw DegenerateHull("points are collinear");
  return area;
}

bool insideConvex(std::span<const Vec2> poly, const Vec2& p, double eps) {
  if (poly.size() < 3) return false;
  for (std::size_t i = 0; i < poly.size(); ++i)
    if (cross2(poly[i], poly[(i + 1) % poly.size()], p) < -eps) return false;
  return true;
}

Polygon clipConvex(std::span<const Vec2> subject, std::span<const Vec2> clip) {
  Polygon output(subject.begin(), subject.end());
  for (std::size_t e = 0; e < clip.size() && !output.empty(); ++e) {
    const Vec2& a = clip[e];
    const Vec2& b = clip[(e + 1) % clip.size()];
    Polygon input;
    input.swap(output);
    for (std::size_t i = 0; i < input.size(); ++i) {
      const Vec2& p = input[i];
      const Vec2& q = input[(i + 1) % input.size()];
      const double sp = cross2(a, b, p), sq = cross2(a, b, q);
      if (sp >= 0) output.push_back(p);
      if ((sp >= 0) != (sq >= 0)) {
        const double t = sp / (sp - sq);
        output.push_back(p + t * (q - p));
      }
    }
  }
  return output;
}

StateTensor groundTruthRelations(const Scene& scene, const ContactTolerance& tol) {
  const std::size_t n = scene.n();
  StateTensor out(n);
  std::vector<Polygon> feet;
  feet.reserve(n);
  for (const auto& c : scene.cuboids) feet.push_back(footprint(c));

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const auto& a = scene.cuboids[i];
      const auto& b = scene.cuboids[j];
      const double edge = std::min(a.edge, b.edge);

      const double gap = (a.center.z() - a.edge / 2) - (b.center.z() + b.edge / 2);
      if (std::abs(gap) <= tol.verticalGap * edge) {
        const Polygon inter = clipConvex(feet[i], feet[j]);
        const double area = inter.size() >= 3 ? polygonArea(inter) : 0.0;
        if (area >= tol.minFaceOverlap * edge * edge) out.set(i, j, Rel::Above);
      }

      if (std::abs(a.center.z() - b.center.z()) <= tol.sameHeight * edge &&
          a.center.x() < b.center.x()) {
        const Extent ax = axisExtent(feet[i], 0), bx = axisExtent(feet[j], 0);
        const Extent ay = axisExtent(feet[i], 1), by = axisExtent(feet[j], 1);
        const double lateral = bx.lo - ax.hi;
        const double yOverlap = std::min(ay.hi, by.hi) - std::max(ay.lo, by.lo);
        if (lateral <= tol.maxLateralGap * edge && yOverlap >= tol.minFaceOverlap * edge)
          out.set(i, j, Rel::Left);
      }
    }
  }
  out.deriveNone();
  return out;
}

}  // namespace cubeprog
