#pragma once

#include <Eigen/Geometry>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "stixelforge/core.hpp"

namespace sf_test {

using stixelforge::Vec3;

/// O(n^2) DBSCAN: core flags, connected core components labelled in order of
/// their first core point, border points joining the lowest-labelled reachable
/// component.
inline std::vector<int> brute_dbscan(const std::vector<Vec3>& pts, double eps, int min_pts) {
  const std::size_t n = pts.size();
  std::vector<std::vector<std::size_t>> nbr(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if ((pts[i] - pts[j]).squaredNorm() <= eps * eps) nbr[i].push_back(j);
    }
  }
  std::vector<bool> core(n);
  for (std::size_t i = 0; i < n; ++i) core[i] = static_cast<int>(nbr[i].size()) >= min_pts;

  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < n; ++i) {
    if (!core[i]) continue;
    for (auto j : nbr[i]) {
      if (core[j]) parent[find(i)] = find(j);
    }
  }

  std::vector<int> label(n, -1);
  std::vector<int> root_label(n, -1);
  int next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!core[i]) continue;
    auto r = find(i);
    if (root_label[r] < 0) root_label[r] = next++;
    label[i] = root_label[r];
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (core[i]) continue;
    int best = -1;
    for (auto j : nbr[i]) {
      if (core[j] && (best < 0 || label[j] < best)) best = label[j];
    }
    label[i] = best;
  }
  return label;
}

/// Hull vertices of points in general position: a point is a vertex when some
/// plane through it and two other points has every remaining point on one side.
inline std::vector<std::size_t> brute_hull_vertices(const std::vector<Vec3>& pts) {
  const std::size_t n = pts.size();
  std::set<std::size_t> verts;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t k = j + 1; k < n; ++k) {
        const Vec3 normal = (pts[j] - pts[i]).cross(pts[k] - pts[i]);
        if (normal.norm() < 1e-12) continue;
        int pos = 0, neg = 0;
        for (std::size_t q = 0; q < n; ++q) {
          if (q == i || q == j || q == k) continue;
          const double d = normal.dot(pts[q] - pts[i]);
          if (d > 0) ++pos;
          if (d < 0) ++neg;
        }
        if (pos == 0 || neg == 0) verts.insert({i, j, k});
      }
    }
  }
  return {verts.begin(), verts.end()};
}

/// Length of the overlap and of the union of two row intervals, counted pixel by pixel.
inline double pixel_iou(int a0, int a1, int b0, int b1) {
  const int lo = std::min(a0, b0), hi = std::max(a1, b1);
  int inter = 0, uni = 0;
  for (int r = lo; r < hi; ++r) {
    const bool in_a = r >= a0 && r < a1;
    const bool in_b = r >= b0 && r < b1;
    inter += in_a && in_b;
    uni += in_a || in_b;
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / uni;
}

/// Mean binary cross entropy, evaluated term by term.
inline double hand_bce(const std::vector<double>& y, const std::vector<double>& p) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += y[i] * std::log(p[i]) + (1.0 - y[i]) * std::log(1.0 - p[i]);
  return -s / static_cast<double>(y.size());
}

}  // namespace sf_test
