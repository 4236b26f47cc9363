#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "fixtures.hpp"
#include "helpers.hpp"
#include "oracles.hpp"
#include "stixelforge/cluster.hpp"
#include "stixelforge/geometry.hpp"
#include "stixelforge/synth.hpp"

using namespace stixelforge;
using namespace stixelforge::cluster;

TEST(Dbscan, Examples) {
  EXPECT_TRUE(dbscan({}, DbscanConfig{}).empty());

  std::vector<Vec3> two_groups;
  for (int i = 0; i < 5; ++i) two_groups.emplace_back(0.1 * i, 0, 0);
  for (int i = 0; i < 5; ++i) two_groups.emplace_back(10 + 0.1 * i, 0, 0);
  const auto labels = dbscan(two_groups, DbscanConfig{0.5, 3});
  EXPECT_EQ(labels, (std::vector<int>{0, 0, 0, 0, 0, 1, 1, 1, 1, 1}));

  std::vector<Vec3> isolated{{0, 0, 0}, {10, 0, 0}, {0, 10, 0}, {0, 0, 10}};
  EXPECT_EQ(dbscan(isolated, DbscanConfig{1.0, 2}), std::vector<int>(4, kNoise));
}

TEST(Dbscan, BorderPointGoesToFirstCluster) {
  // Point 2 sits between two dense groups and is reachable from both.
  std::vector<Vec3> pts{{0, 0, 0},    {0.2, 0, 0},  {1.0, 0, 0}, {1.8, 0, 0}, {1.9, 0, 0},
                        {-0.1, 0, 0}, {-0.2, 0, 0}, {2.0, 0, 0}, {2.1, 0, 0}};
  const auto labels = dbscan(pts, DbscanConfig{0.85, 4});
  EXPECT_EQ(labels[0], 0);
  EXPECT_EQ(labels[2], labels[0]);
  EXPECT_NE(labels[3], labels[0]);
}

TEST(Dbscan, MatchesBruteForceReference) {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto pts = sf_test::random_point_set(rng);
    const double eps = std::uniform_real_distribution<double>(0.1, 1.0)(rng);
    const int min_pts = std::uniform_int_distribution<int>(1, 6)(rng);
    ASSERT_EQ(dbscan(pts, DbscanConfig{eps, min_pts}), sf_test::brute_dbscan(pts, eps, min_pts))
        << "trial " << trial;
  }
}

TEST(Dbscan, ConfigValidation) {
  EXPECT_ERRC(dbscan({Vec3::Zero()}, DbscanConfig{0.0, 3}), Errc::InvalidArgument);
  EXPECT_ERRC(dbscan({Vec3::Zero()}, DbscanConfig{0.4, 0}), Errc::InvalidArgument);
}

TEST(BinByColumn, FloorOfUOverStride) {
  const CameraIntrinsics intr(100, 100, 320, 240, 640, 480);
  const GridSpec grid(480, 640, 8);
  // u = 100 * 0.104 + 320 = 330.4
  PointCloud pc({Vec3(1.04, 0, 10), Vec3(0, 0, -5), Vec3(100, 0, 1), Vec3(0, 0, 3)}, Frame::Camera);
  const auto bins = bin_by_column(pc, intr, grid, {0, 1, 2, 3});
  ASSERT_EQ(bins.size(), 80u);
  EXPECT_EQ(bins[41].point_indices, std::vector<std::size_t>{0});
  EXPECT_EQ(bins[40].point_indices, std::vector<std::size_t>{3});
  std::size_t total = 0;
  for (const auto& b : bins) total += b.point_indices.size();
  EXPECT_EQ(total, 2u);
  EXPECT_ERRC(bin_by_column(pc, intr, GridSpec(480, 632, 8), {0}), Errc::GridMismatch);
}

TEST(BinByColumn, PartitionOfCandidates) {
  const CameraIntrinsics intr(500, 500, 320, 240, 640, 480);
  const GridSpec grid(480, 640, 4);
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-10, 10);
  std::vector<Vec3> pts;
  for (int i = 0; i < 2000; ++i) pts.emplace_back(u(rng), u(rng), u(rng));
  PointCloud pc(pts, Frame::Camera);
  std::vector<std::size_t> cand;
  for (std::size_t i = 0; i < pts.size(); i += 2) cand.push_back(i);
  const auto bins = bin_by_column(pc, intr, grid, cand);
  std::set<std::size_t> seen;
  for (const auto& b : bins) {
    for (auto i : b.point_indices) {
      EXPECT_TRUE(seen.insert(i).second);
      const auto px = geometry::project_point(intr, pts[i]);
      EXPECT_GE(px.u, b.column * 4.0);
      EXPECT_LT(px.u, (b.column + 1) * 4.0);
    }
  }
  for (auto i : cand) {
    if (seen.count(i)) continue;
    const auto px = geometry::try_project(intr, pts[i]);
    EXPECT_TRUE(!px || px->u < 0 || px->u >= 640 || px->v < 0 || px->v >= 480);
  }
}

TEST(BinByColumn, WallCountsMatchRayCast) {
  // A wall straight ahead fills the lower image; every LiDAR return lands in the column its ray projects to.
  synth::SceneSpec spec;
  spec.sensor.azimuth_min = -30;
  spec.sensor.azimuth_max = 30;
  spec.walls.push_back({Vec3(12, -15, 0), Vec3(0, 30, 0), Vec3(0, 0, 6)});
  const auto calib = spec.camera.calibration();
  const auto grid = GridSpec(1200, 1920, 8);
  const auto cam = geometry::transform_to_camera(synth::simulate_lidar(spec), calib.extrinsics);
  std::vector<std::size_t> wall;
  std::vector<int> expected(static_cast<std::size_t>(grid.cols()), 0);
  for (std::size_t i = 0; i < cam.size(); ++i) {
    if (std::abs(cam[i].z() - 11.9) > 1e-6) continue;  // wall plane at x = 12 is z = 11.9 in the camera
    wall.push_back(i);
    const auto px = geometry::try_project(calib.intrinsics, cam[i]);
    if (px && px->u >= 0 && px->u < 1920 && px->v >= 0 && px->v < 1200) ++expected[static_cast<std::size_t>(px->u / 8)];
  }
  const auto bins = bin_by_column(cam, calib.intrinsics, grid, wall);
  int covered = 0;
  for (const auto& b : bins) {
    EXPECT_EQ(static_cast<int>(b.point_indices.size()), expected[static_cast<std::size_t>(b.column)]);
    covered += !b.point_indices.empty();
  }
  EXPECT_GT(covered, 100);
}

TEST(ClusterColumnObjects, Examples) {
  const Plane ground(Vec3(0, -1, 0), 1.5);
  EXPECT_TRUE(cluster_column_objects(ColumnBin{3, {}}, PointCloud(), ground, DbscanConfig{}).empty());

  // Near box at 5 m (points 0..9) and far wall at 20 m (points 10..29), listed far first.
  std::vector<Vec3> pts;
  for (int i = 0; i < 20; ++i) pts.emplace_back(0, 1.4 - 0.2 * i, 20);
  for (int i = 0; i < 10; ++i) pts.emplace_back(0, 1.4 - 0.15 * i, 5);
  PointCloud pc(pts, Frame::Camera);
  ColumnBin bin{0, {}};
  for (std::size_t i = 0; i < pts.size(); ++i) bin.point_indices.push_back(i);
  const auto clusters = cluster_column_objects(bin, pc, ground, DbscanConfig{});
  ASSERT_EQ(clusters.size(), 2u);
  EXPECT_EQ(clusters[0].size(), 10u);
  EXPECT_EQ(clusters[0].front(), 20u);
  EXPECT_EQ(clusters[1].size(), 20u);

  ColumnBin three{0, {0, 1, 2}};
  EXPECT_TRUE(cluster_column_objects(three, pc, ground, DbscanConfig{0.4, 5}).empty());
}

TEST(ClusterColumnObjects, OrderedByMeanRange) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> r(2, 60), h(-3, 1.4), jitter(-0.05, 0.05);
  const Plane ground(Vec3(0, -1, 0), 1.5);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Vec3> pts;
    for (int k = 0; k < 6; ++k) {
      const double z = r(rng), y = h(rng);
      for (int i = 0; i < 8; ++i) pts.emplace_back(jitter(rng), y + jitter(rng), z + jitter(rng));
    }
    PointCloud pc(pts, Frame::Camera);
    ColumnBin bin{0, {}};
    for (std::size_t i = 0; i < pts.size(); ++i) bin.point_indices.push_back(i);
    const auto clusters = cluster_column_objects(bin, pc, ground, DbscanConfig{});
    double prev = -1;
    for (const auto& c : clusters) {
      double mean = 0;
      for (auto i : c) mean += pts[i].norm();
      mean /= static_cast<double>(c.size());
      EXPECT_GE(mean, prev);
      prev = mean;
    }
  }
}
