#pragma once

#include <vector>

#include "stixelforge/core.hpp"

namespace stixelforge::cluster {

inline constexpr int kNoise = -1;

struct DbscanConfig {
  double eps = 0.4;  // meters
  int min_pts = 3;   // neighbourhood size including the point itself

  void validate() const;
};

/// Density-based clustering with Euclidean distance.
///
/// Labels are 0..k-1 in order of each cluster's first core point; border
/// points belong to the first cluster that reaches them. Points are visited in
/// input order, so the result is a pure function of the input sequence.
std::vector<int> dbscan(const std::vector<Point3>& points, const DbscanConfig& cfg);

struct ColumnBin {
  int column = 0;
  std::vector<std::size_t> point_indices;
};

/// Assigns candidate points to image columns by floor(u / stride). Points
/// behind the camera or projecting outside the image are dropped. Always
/// returns grid.cols() bins.
std::vector<ColumnBin> bin_by_column(const PointCloud& cloud, const CameraIntrinsics& intr, const GridSpec& grid,
                                     const std::vector<std::size_t>& candidates);

/// Clusters one column bin on (range from origin, height above plane) and
/// returns clusters of parent-cloud indices ordered by increasing mean range.
/// Noise points are dropped.
std::vector<std::vector<std::size_t>> cluster_column_objects(const ColumnBin& bin, const PointCloud& cloud,
                                                             const Plane& plane, const DbscanConfig& cfg);

}  // namespace stixelforge::cluster
