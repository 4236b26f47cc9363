#pragma once

#include <cstdint>
#include <vector>

#include "stixelforge/core.hpp"

namespace stixelforge::ground {

struct RansacConfig {
  int iterations = 500;
  double inlier_threshold = 0.15;  // meters, stage 1
  double stage2_threshold = 0.08;  // meters, stage 2
  /// Stage-1 candidates have a height above the sensor (-y in the camera
  /// frame) below this value: 1.0 m below the origin extended 0.5 m upward.
  double height_prior = -0.5;
  double min_inlier_fraction = 0.05;
  std::uint64_t seed = 42;

  void validate() const;
};

struct PlaneFit {
  Plane plane;                       // least-squares refined
  std::vector<std::size_t> inliers;  // ascending indices within threshold of `plane`
  Plane sample_plane;                // best minimal-sample hypothesis before refinement
};

/// Least-squares plane (smallest principal axis of the covariance) through
/// the selected points.
Plane fit_plane_least_squares(const std::vector<Point3>& points, const std::vector<std::size_t>& indices);

/// Sum of squared point-to-plane distances over `indices`.
double plane_residual(const Plane& plane, const std::vector<Point3>& points,
                      const std::vector<std::size_t>& indices);

/// Single RANSAC stage: best minimal-sample plane by inlier count, refined by
/// least squares over its inliers. Deterministic for a fixed seed.
PlaneFit fit_plane_ransac(const PointCloud& points, double threshold, int iterations, std::uint64_t seed);

struct GroundResult {
  Plane plane;
  std::vector<std::size_t> ground;        // stage-2 inliers
  std::vector<std::size_t> stage1_inliers;
};

/// Coarse fit on the low points, then a tighter refit on the stage-1 inliers.
/// Throws Errc::GroundNotFound when the stage-2 inlier fraction is below
/// cfg.min_inlier_fraction.
GroundResult two_stage_ground(const PointCloud& cloud, const RansacConfig& cfg);

}  // namespace stixelforge::ground
