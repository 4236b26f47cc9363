#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "stixelforge/core.hpp"

namespace stixelforge::synth {

/// World frame: +x forward, +y left, +z up. The ground is the plane z = ground_z.

struct Box {
  Vec3 center;
  Vec3 extents;  // full side lengths
};

/// Parallelogram corner + s * edge_a + t * edge_b, s, t in [0, 1].
struct Wall {
  Vec3 corner;
  Vec3 edge_a;
  Vec3 edge_b;
};

struct LidarSpec {
  Vec3 origin{0.0, 0.0, 1.8};
  double fov_up = 22.5;  // degrees
  double fov_down = -22.5;
  int channels = 128;
  double azimuth_step = 0.35;  // degrees
  double azimuth_min = -180.0;
  double azimuth_max = 180.0;
  double max_range = 120.0;  // meters
  double noise_sigma = 0.0;  // meters, Gaussian range noise

  void validate() const;
};

/// Pinhole camera mounted at `offset` from the LiDAR, level, looking along +x.
struct CameraRig {
  CameraIntrinsics intrinsics{1000.0, 1000.0, 960.0, 600.0, 1920, 1200};
  Vec3 offset{0.1, -0.05, -0.3};

  Calibration calibration() const;
};

struct SceneSpec {
  double ground_z = 0.0;
  std::vector<Box> boxes;
  std::vector<Wall> walls;
  LidarSpec sensor;
  CameraRig camera;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Reads the scene grammar (see README):
///   seed = 7
///   ground_z = 0
///   sensor.origin = 0 0 1.8
///   box = cx cy cz  ex ey ez
///   wall = ox oy oz  ax ay az  bx by bz
SceneSpec parse_scene(std::string_view text);

struct Hit {
  double t;
  int object;  // -1 ground, boxes 0..nb-1, walls nb..
};

/// Nearest intersection of the ray origin + t * dir (t > 0) in world coordinates.
std::optional<Hit> cast_ray(const SceneSpec& spec, const Vec3& origin, const Vec3& dir);

/// One ray per (channel, azimuth); returns first hits in the sensor frame.
PointCloud simulate_lidar(const SceneSpec& spec);

/// Unit direction of every LiDAR ray, channel-major.
std::vector<Vec3> lidar_directions(const LidarSpec& sensor);

/// Stixels derived by ray casting the camera image against the scene.
///
/// Each column is sampled at every half pixel across its strip and every
/// row. Object surfaces outside the LiDAR field of view or range do not count.
/// Per object the visible top row, the ground footprint of its nearest
/// visible point and its lowest visible row are measured, then columns are
/// walked near to far the same way labels are assigned from LiDAR data.
StixelWorld oracle_stixel_world(const SceneSpec& spec, const Calibration& calib, const GridSpec& grid,
                                double ground_attach_delta = 0.3, int min_stixel_height = 4);

}  // namespace stixelforge::synth
