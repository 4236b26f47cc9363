#pragma once

#include <array>
#include <span>
#include <vector>

#include "stixelforge/core.hpp"

namespace stixelforge::hull {

struct Hull {
  /// Outward-oriented triangles indexing the input points.
  std::vector<std::array<std::size_t, 3>> faces;
  /// Sorted indices of input points that are hull vertices.
  std::vector<std::size_t> vertices;
};

/// 3D convex hull (quickhull). Points within `eps` of a face plane count as
/// inside, so coplanar non-extreme points are never reported as vertices.
/// Throws Errc::DegenerateHull when the input spans fewer than three dimensions.
Hull convex_hull(std::span<const Vec3> points, double eps = 1e-10);

}  // namespace stixelforge::hull
