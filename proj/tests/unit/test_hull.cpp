#include <gtest/gtest.h>

#include <random>

#include "helpers.hpp"
#include "oracles.hpp"
#include "stixelforge/hull.hpp"

using namespace stixelforge;

namespace {

std::vector<Vec3> random_points(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<Vec3> pts;
  for (int i = 0; i < n; ++i) pts.emplace_back(g(rng), g(rng), g(rng));
  return pts;
}

}  // namespace

TEST(ConvexHull, Tetrahedron) {
  std::vector<Vec3> pts{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0.1, 0.1, 0.1}};
  const auto h = hull::convex_hull(pts);
  EXPECT_EQ(h.vertices, (std::vector<std::size_t>{0, 1, 2, 3}));
  EXPECT_EQ(h.faces.size(), 4u);
}

TEST(ConvexHull, CubeIgnoresFaceAndEdgePoints) {
  std::vector<Vec3> pts;
  for (int x = 0; x <= 2; ++x)
    for (int y = 0; y <= 2; ++y)
      for (int z = 0; z <= 2; ++z) pts.emplace_back(x, y, z);
  const auto h = hull::convex_hull(pts);
  ASSERT_EQ(h.vertices.size(), 8u);
  for (auto v : h.vertices) {
    const auto& p = pts[v];
    EXPECT_TRUE((p.x() == 0 || p.x() == 2) && (p.y() == 0 || p.y() == 2) && (p.z() == 0 || p.z() == 2));
  }
}

TEST(ConvexHull, FacesOrientedOutward) {
  std::mt19937_64 rng(5);
  const auto pts = random_points(rng, 200);
  const auto h = hull::convex_hull(pts);
  for (const auto& f : h.faces) {
    const Vec3 n = (pts[f[1]] - pts[f[0]]).cross(pts[f[2]] - pts[f[0]]);
    for (const auto& p : pts) EXPECT_LE(n.dot(p - pts[f[0]]), 1e-9);
  }
  // Closed triangulated sphere: V - E + F = 2 with E = 3F/2.
  EXPECT_EQ(static_cast<long>(h.vertices.size()) - static_cast<long>(h.faces.size()) / 2, 2);
}

TEST(ConvexHull, MatchesBruteForceOnRandomSets) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    const int n = std::uniform_int_distribution<int>(4, 30)(rng);
    const auto pts = random_points(rng, n);
    EXPECT_EQ(hull::convex_hull(pts).vertices, sf_test::brute_hull_vertices(pts)) << "trial " << trial;
  }
}

TEST(ConvexHull, DegenerateInputs) {
  std::vector<Vec3> three{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  EXPECT_ERRC(hull::convex_hull(three), Errc::DegenerateHull);
  std::vector<Vec3> line{{0, 0, 0}, {1, 1, 1}, {2, 2, 2}, {3, 3, 3}};
  EXPECT_ERRC(hull::convex_hull(line), Errc::DegenerateHull);
  std::vector<Vec3> flat{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}, {0.5, 0.2, 0}};
  EXPECT_ERRC(hull::convex_hull(flat), Errc::DegenerateHull);
  std::vector<Vec3> same(5, Vec3(1, 2, 3));
  EXPECT_ERRC(hull::convex_hull(same), Errc::DegenerateHull);
}
