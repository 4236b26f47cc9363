#include "stixelforge/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "stixelforge/hull.hpp"

namespace stixelforge::geometry {

PointCloud transform_to_camera(const PointCloud& cloud, const Extrinsics& ext) {
  std::vector<Point3> out;
  out.reserve(cloud.size());
  for (const auto& p : cloud.points()) out.push_back(ext.apply(p));
  return PointCloud(std::move(out), Frame::Camera);
}

std::optional<PixelCoord> try_project(const CameraIntrinsics& intr, const Point3& p) noexcept {
  if (!(p.z() > kMinDepth)) return std::nullopt;
  return PixelCoord{intr.fx() * p.x() / p.z() + intr.cx(), intr.fy() * p.y() / p.z() + intr.cy()};
}

PixelCoord project_point(const CameraIntrinsics& intr, const Point3& p) {
  auto px = try_project(intr, p);
  if (!px) raise(Errc::BehindCamera, "point has depth " + std::to_string(p.z()));
  return *px;
}

std::optional<double> horizon_row(const CameraIntrinsics& intr, const Plane& plane, double u) {
  // n . (x, y, 1) = 0 with x = (u - cx) / fx, y = (v - cy) / fy.
  const Vec3& n = plane.normal();
  if (std::abs(n.y()) < 1e-9) return std::nullopt;
  const double x = (u - intr.cx()) / intr.fx();
  const double y = -(n.x() * x + n.z()) / n.y();
  return y * intr.fy() + intr.cy();
}

std::vector<std::size_t> remove_hidden_points(const PointCloud& cloud, double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) raise(Errc::InvalidArgument, "gamma must be positive");
  const std::size_t n = cloud.size();
  if (n == 0) raise(Errc::InvalidArgument, "hidden point removal needs a non-empty cloud");

  double max_norm = 0.0;
  for (const auto& p : cloud.points()) {
    const double r = p.norm();
    if (!(r > 0.0)) raise(Errc::InvalidArgument, "points must not coincide with the viewpoint");
    max_norm = std::max(max_norm, r);
  }

  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), 0);
  if (n < 3) return all;

  const double radius = gamma * max_norm;
  std::vector<Vec3> flipped;
  flipped.reserve(n + 1);
  for (const auto& p : cloud.points()) {
    const double r = p.norm();
    flipped.push_back(p + 2.0 * (radius - r) * p / r);
  }
  flipped.push_back(Vec3::Zero());

  const auto hull = hull::convex_hull(flipped);
  std::vector<std::size_t> visible;
  visible.reserve(hull.vertices.size());
  for (auto v : hull.vertices) {
    if (v < n) visible.push_back(v);
  }
  return visible;
}

}  // namespace stixelforge::geometry
