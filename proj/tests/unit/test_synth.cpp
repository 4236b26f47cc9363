#include <gtest/gtest.h>

#include <set>

#include "helpers.hpp"
#include "stixelforge/synth.hpp"

using namespace stixelforge;
using namespace stixelforge::synth;

namespace {

SceneSpec forward_scene() {
  SceneSpec spec;
  spec.sensor.azimuth_min = -60;
  spec.sensor.azimuth_max = 60;
  return spec;
}

}  // namespace

TEST(CastRay, NearestHitWins) {
  SceneSpec spec;
  spec.boxes.push_back({Vec3(10, 0, 1), Vec3(2, 2, 2)});
  spec.walls.push_back({Vec3(5, -1, 0), Vec3(0, 2, 0), Vec3(0, 0, 1)});
  const auto h = cast_ray(spec, Vec3(0, 0, 1.5), Vec3(1, 0, 0));
  ASSERT_TRUE(h);
  EXPECT_EQ(h->object, 0);
  EXPECT_DOUBLE_EQ(h->t, 9.0);
  const auto low = cast_ray(spec, Vec3(0, 0, 0.5), Vec3(1, 0, 0));
  ASSERT_TRUE(low);
  EXPECT_EQ(low->object, 1);
  EXPECT_DOUBLE_EQ(low->t, 5.0);
  const auto down = cast_ray(spec, Vec3(0, 0, 2), Vec3(0, 0.6, -0.8));
  ASSERT_TRUE(down);
  EXPECT_EQ(down->object, -1);
  EXPECT_DOUBLE_EQ(down->t, 2.5);
  EXPECT_FALSE(cast_ray(spec, Vec3(0, 0, 2), Vec3(0, 0, 1)));
}

TEST(SimulateLidar, EmptySceneHitsOnlyThePlane) {
  const auto spec = forward_scene();
  const auto pc = simulate_lidar(spec);
  ASSERT_GT(pc.size(), 1000u);
  for (const auto& p : pc.points()) {
    EXPECT_NEAR(p.z(), -1.8, 1e-9);
    EXPECT_LE(p.norm(), spec.sensor.max_range + 1e-9);
  }
}

TEST(SimulateLidar, BoxHitCountMatchesAnalyticRayCount) {
  // A 3 m tall box centred ahead: only its front face at x = 9 is visible.
  auto spec = forward_scene();
  spec.boxes.push_back({Vec3(10, 0, 1.5), Vec3(2, 3, 3)});
  int expected = 0;
  for (const auto& d : lidar_directions(spec.sensor)) {
    if (d.x() <= 0) continue;
    const double t = 9.0 / d.x();
    const Vec3 p = spec.sensor.origin + t * d;
    expected += std::abs(p.y()) <= 1.5 && p.z() >= 0.0 && p.z() <= 3.0;
  }
  int box_hits = 0;
  const auto cloud = simulate_lidar(spec);
  for (const auto& p : cloud.points()) box_hits += std::abs(p.x() - 9.0) < 1e-9;
  EXPECT_EQ(box_hits, expected);
  EXPECT_GT(expected, 500);
}

TEST(SimulateLidar, SeedDeterminism) {
  auto spec = forward_scene();
  spec.sensor.noise_sigma = 0.02;
  spec.seed = 5;
  const auto a = simulate_lidar(spec), b = simulate_lidar(spec);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]);
  spec.seed = 6;
  EXPECT_NE(simulate_lidar(spec)[0], a[0]);
}

TEST(LidarDirections, GridLayout) {
  LidarSpec s;
  s.channels = 3;
  s.fov_up = 10;
  s.fov_down = -10;
  s.azimuth_min = -1;
  s.azimuth_max = 1;
  s.azimuth_step = 0.5;
  const auto d = lidar_directions(s);
  ASSERT_EQ(d.size(), 15u);
  for (const auto& v : d) EXPECT_NEAR(v.norm(), 1.0, 1e-12);
  EXPECT_NEAR(d.front().z(), std::sin(-10 * M_PI / 180), 1e-12);
  EXPECT_NEAR(d.back().z(), std::sin(10 * M_PI / 180), 1e-12);
}

TEST(OracleStixelWorld, EmptySceneGroundOnly) {
  const auto spec = forward_scene();
  const auto calib = spec.camera.calibration();
  const auto w = oracle_stixel_world(spec, calib, GridSpec(1200, 1920, 8));
  EXPECT_TRUE(w.object_stixels().empty());
  EXPECT_FALSE(w.stixels().empty());
}

TEST(OracleStixelWorld, BoxMatchesCornerProjection) {
  auto spec = forward_scene();
  spec.boxes.push_back({Vec3(11, 0, 1), Vec3(2, 2, 2)});  // front face at x = 10, 2 m tall
  const auto calib = spec.camera.calibration();
  const GridSpec grid(1200, 1920, 8);
  const auto w = oracle_stixel_world(spec, calib, grid);
  // Camera sits at world (0.1, -0.05, 1.5).
  const double depth = 10.0 - 0.1;
  const double top = 600 + 1000 * (1.5 - 2.0) / depth;
  const double bottom = 600 + 1000 * 1.5 / depth;
  std::set<int> cols;
  for (const auto& s : w.object_stixels()) {
    cols.insert(s.column());
    EXPECT_EQ(s.type(), StixelType::GroundObject);
    EXPECT_NEAR(s.v_top(), top, 1.0);
    EXPECT_NEAR(s.v_bottom(), bottom, 1.0);
  }
  // Box spans y in [-1, 1], i.e. camera x in [-1.05, 0.95] at depth 9.9.
  const int first = static_cast<int>((960 + 1000 * -1.05 / depth) / 8);
  const int last = static_cast<int>((960 + 1000 * 0.95 / depth) / 8);
  ASSERT_FALSE(cols.empty());
  EXPECT_EQ(static_cast<int>(cols.size()), *cols.rbegin() - *cols.begin() + 1);
  EXPECT_NEAR(*cols.begin(), first, 1);
  EXPECT_NEAR(*cols.rbegin(), last, 1);
}

TEST(OracleStixelWorld, ElevatedSlabIsSwibOnHorizon) {
  auto spec = forward_scene();
  spec.boxes.push_back({Vec3(13.5, 0, 4.4), Vec3(3, 8, 0.8)});
  const auto calib = spec.camera.calibration();
  const auto w = oracle_stixel_world(spec, calib, GridSpec(1200, 1920, 8));
  ASSERT_FALSE(w.object_stixels().empty());
  for (const auto& s : w.object_stixels()) {
    EXPECT_EQ(s.type(), StixelType::SwibObject);
    EXPECT_EQ(s.v_bottom(), 600);  // level camera: the road horizon is the principal row
  }
}

TEST(ParseScene, Grammar) {
  const auto spec = parse_scene(R"(# two objects
seed = 9
ground_z = -0.1
sensor.origin = 0 0 1.9
sensor.channels = 64
sensor.azimuth_step = 0.2
sensor.azimuth_min = -45
sensor.azimuth_max = 45
camera.offset = 0 0 -0.4
box = 12 0 1   2 2 2
box = 20 3 1   2 2 2
wall = 30 -5 0  0 10 0  0 0 4
)");
  EXPECT_EQ(spec.seed, 9u);
  EXPECT_EQ(spec.ground_z, -0.1);
  EXPECT_EQ(spec.sensor.origin, Vec3(0, 0, 1.9));
  EXPECT_EQ(spec.sensor.channels, 64);
  EXPECT_EQ(spec.boxes.size(), 2u);
  EXPECT_EQ(spec.boxes[1].center, Vec3(20, 3, 1));
  ASSERT_EQ(spec.walls.size(), 1u);
  EXPECT_EQ(spec.walls[0].edge_b, Vec3(0, 0, 4));
  EXPECT_EQ(spec.camera.offset, Vec3(0, 0, -0.4));
}

TEST(ParseScene, Errors) {
  EXPECT_ERRC(parse_scene("colour = red"), Errc::ParseError);
  EXPECT_ERRC(parse_scene("box = 1 2 3"), Errc::ParseError);
  EXPECT_ERRC(parse_scene("box = 1 2 3 4 5 x"), Errc::ParseError);
  EXPECT_ERRC(parse_scene("just text"), Errc::ParseError);
  EXPECT_ERRC(parse_scene("box = -5 0 1 2 2 2"), Errc::InvalidArgument);
  EXPECT_ERRC(parse_scene("sensor.channels = 0"), Errc::InvalidArgument);
}
