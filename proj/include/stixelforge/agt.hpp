#pragma once

#include <optional>
#include <vector>

#include "stixelforge/cluster.hpp"
#include "stixelforge/core.hpp"
#include "stixelforge/ground.hpp"

namespace stixelforge::agt {

struct AgtConfig {
  ground::RansacConfig ransac;
  cluster::DbscanConfig dbscan;
  double hpr_gamma = 1e5;
  double ground_attach_delta = 0.3;  // meters
  int min_stixel_height = 4;         // pixels
  int stride = 8;                    // pixels per grid cell

  void validate() const;
};

/// GroundObject when the lowest cluster point is at most `delta` above the
/// plane, SwibObject otherwise.
StixelType classify_cluster(const std::vector<Point3>& cluster, const Plane& plane, double delta);

struct ExtractOptions {
  int column = 0;
  int min_stixel_height = 4;
  /// Distance is measured from here to the top point (camera coordinates).
  Vec3 distance_origin = Vec3::Zero();
};

/// Heights closer than this (meters) count as equally high when picking the top point.
inline constexpr double kTopTieTolerance = 0.02;

/// Index of the top point: maximum height above the plane, ties resolved
/// toward the smallest image row.
std::size_t top_point_index(const std::vector<Point3>& cluster, const Plane& plane, const CameraIntrinsics& intr);

/// Builds the Stixel for one camera-frame cluster.
///
/// vTop is the row of the top point. Ground objects end at the row of the
/// nearest point dropped onto the plane; swib objects end at
/// `preceding_top_row`, or at their own lowest row when nothing precedes them.
/// Throws Errc::DegenerateStixel when the result is shorter than
/// opts.min_stixel_height.
Stixel extract_stixel(const std::vector<Point3>& cluster, StixelType type, const Plane& plane,
                      std::optional<int> preceding_top_row, const CameraIntrinsics& intr, const GridSpec& grid,
                      const ExtractOptions& opts);

struct AgtResult {
  StixelWorld world;
  Plane plane;
  std::vector<std::size_t> ground_indices;
  std::vector<std::size_t> visible_indices;  // non-ground points that survived hidden point removal
};

AgtResult generate_stixel_world_detailed(const PointCloud& cloud, const Calibration& calib, const AgtConfig& cfg);

/// LiDAR cloud (sensor frame) + calibration -> ground-truth Stixel-World.
/// Propagates Errc::GroundNotFound.
StixelWorld generate_stixel_world(const PointCloud& cloud, const Calibration& calib, const AgtConfig& cfg);

}  // namespace stixelforge::agt
