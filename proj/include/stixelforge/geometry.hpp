#pragma once

#include <optional>
#include <vector>

#include "stixelforge/core.hpp"

namespace stixelforge::geometry {

/// Camera frame: +z forward, +x right, +y down. Pixel u grows right, v grows down.
struct PixelCoord {
  double u;
  double v;
};

inline constexpr double kMinDepth = 1e-9;

PointCloud transform_to_camera(const PointCloud& cloud, const Extrinsics& ext);

/// Pinhole projection. Throws Errc::BehindCamera when p.z <= 1e-9.
PixelCoord project_point(const CameraIntrinsics& intr, const Point3& p);

/// Non-throwing variant for bulk use.
std::optional<PixelCoord> try_project(const CameraIntrinsics& intr, const Point3& p) noexcept;

/// Image row where rays run parallel to `plane`, evaluated at pixel column `u`.
/// Empty when the plane is (nearly) parallel to the image rows' viewing plane.
std::optional<double> horizon_row(const CameraIntrinsics& intr, const Plane& plane, double u);

/// Hidden point removal by spherical flipping around the camera origin.
///
/// Each point is flipped to p + 2 (R - |p|) p / |p| with R = gamma * max |p|;
/// a point is visible when its flipped image is a vertex of the convex hull of
/// all flipped points plus the origin. Clouds with fewer than three points are
/// returned whole. Throws Errc::DegenerateHull when the flipped set and the
/// origin do not span three dimensions.
std::vector<std::size_t> remove_hidden_points(const PointCloud& cloud, double gamma = 1.0);

}  // namespace stixelforge::geometry
