#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "stixelforge/core.hpp"
#include "stixelforge/synth.hpp"

namespace sf_test {

using stixelforge::Vec3;

struct PlaneFixture {
  std::vector<Vec3> pts;
  std::vector<std::size_t> inliers;
};

/// 70 points on z = 0 with sigma 0.02 noise, 30 uniform outliers in a 10 m cube.
inline PlaneFixture seventy_percent(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> xy(-5, 5), cube(-5, 5);
  std::normal_distribution<double> noise(0, 0.02);
  PlaneFixture f;
  for (int i = 0; i < 70; ++i) {
    f.inliers.push_back(f.pts.size());
    f.pts.emplace_back(xy(rng), xy(rng), noise(rng));
  }
  for (int i = 0; i < 30; ++i) f.pts.emplace_back(cube(rng), cube(rng), cube(rng));
  return f;
}

/// Up to 200 points: uniform, gaussian blobs, or a coarse lattice with exact ties and duplicates.
inline std::vector<Vec3> random_point_set(std::mt19937_64& rng) {
  const int n = std::uniform_int_distribution<int>(0, 200)(rng);
  const int mode = std::uniform_int_distribution<int>(0, 2)(rng);
  std::vector<Vec3> pts;
  std::uniform_real_distribution<double> u(0, 5);
  std::normal_distribution<double> g(0, 0.3);
  std::uniform_int_distribution<int> lattice(0, 6);
  std::vector<Vec3> centres;
  for (int k = 0; k < 4; ++k) centres.emplace_back(u(rng), u(rng), u(rng));
  for (int i = 0; i < n; ++i) {
    switch (mode) {
      case 0: pts.emplace_back(u(rng), u(rng), u(rng)); break;
      case 1: pts.push_back(centres[static_cast<std::size_t>(i % 4)] + Vec3(g(rng), g(rng), g(rng))); break;
      default: pts.emplace_back(0.5 * lattice(rng), 0.5 * lattice(rng), 0.0); break;
    }
  }
  return pts;
}

/// Camera frame: a 20x20 wall grid on z = 5 spanning [-2, 2]^2, then 100 box points around z = 10.
inline stixelforge::PointCloud wall_and_box(std::size_t* box_begin) {
  std::vector<Vec3> pts;
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j) pts.emplace_back(-2.0 + 4.0 * i / 19.0, -2.0 + 4.0 * j / 19.0, 5.0);
  *box_begin = pts.size();
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (int k = 0; k < 100; ++k) pts.emplace_back(u(rng), u(rng), 10.0 + u(rng));
  return stixelforge::PointCloud(pts, stixelforge::Frame::Camera);
}

/// Sensor looking forward over +-60 degrees, no objects.
inline stixelforge::synth::SceneSpec forward_scene() {
  stixelforge::synth::SceneSpec spec;
  spec.sensor.azimuth_min = -60;
  spec.sensor.azimuth_max = 60;
  spec.sensor.azimuth_step = 0.18;
  return spec;
}

/// A 2.5 m wall at x = 10 and a 3.4 m box behind it at x = 20..22. The
/// camera (1.5 m) cannot see the box; the LiDAR (1.8 m) grazes its upper edge.
inline stixelforge::synth::SceneSpec occluded_box_scene() {
  auto spec = forward_scene();
  spec.walls.push_back({Vec3(10, -10, 0), Vec3(0, 20, 0), Vec3(0, 0, 2.5)});
  spec.boxes.push_back({Vec3(21, 0, 1.7), Vec3(2, 2, 3.4)});
  return spec;
}

}  // namespace sf_test
