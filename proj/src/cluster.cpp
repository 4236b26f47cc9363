#include "stixelforge/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <unordered_map>

#include "stixelforge/geometry.hpp"

namespace stixelforge::cluster {
namespace {

constexpr int kUnvisited = -2;

/// Uniform grid with cell size eps; candidate neighbours live in the 27
/// surrounding cells.
class GridIndex {
 public:
  GridIndex(const std::vector<Point3>& points, double eps) : points_(points), eps_(eps) {
    for (std::size_t i = 0; i < points.size(); ++i) cells_[key(cell_of(points[i]))].push_back(i);
  }

  void neighbours(std::size_t i, std::vector<std::size_t>& out) const {
    out.clear();
    const auto c = cell_of(points_[i]);
    const double eps2 = eps_ * eps_;
    for (long dx = -1; dx <= 1; ++dx) {
      for (long dy = -1; dy <= 1; ++dy) {
        for (long dz = -1; dz <= 1; ++dz) {
          auto it = cells_.find(key({c[0] + dx, c[1] + dy, c[2] + dz}));
          if (it == cells_.end()) continue;
          for (auto j : it->second) {
            if ((points_[j] - points_[i]).squaredNorm() <= eps2) out.push_back(j);
          }
        }
      }
    }
    std::sort(out.begin(), out.end());
  }

 private:
  std::array<long, 3> cell_of(const Point3& p) const {
    return {static_cast<long>(std::floor(p.x() / eps_)), static_cast<long>(std::floor(p.y() / eps_)),
            static_cast<long>(std::floor(p.z() / eps_))};
  }

  static std::uint64_t key(const std::array<long, 3>& c) {
    // 21 bits per axis is ample for cells within a single sensor frame.
    const auto mask = (std::uint64_t{1} << 21) - 1;
    return ((static_cast<std::uint64_t>(c[0]) & mask) << 42) | ((static_cast<std::uint64_t>(c[1]) & mask) << 21) |
           (static_cast<std::uint64_t>(c[2]) & mask);
  }

  const std::vector<Point3>& points_;
  double eps_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> cells_;
};

}  // namespace

void DbscanConfig::validate() const {
  if (!(eps > 0.0) || !std::isfinite(eps)) raise(Errc::InvalidArgument, "dbscan eps must be positive");
  if (min_pts < 1) raise(Errc::InvalidArgument, "dbscan minPts must be >= 1");
}

std::vector<int> dbscan(const std::vector<Point3>& points, const DbscanConfig& cfg) {
  cfg.validate();
  const std::size_t n = points.size();
  std::vector<int> labels(n, kUnvisited);
  if (n == 0) return labels;

  const GridIndex index(points, cfg.eps);
  const auto min_pts = static_cast<std::size_t>(cfg.min_pts);
  std::vector<std::size_t> nbrs;
  std::deque<std::size_t> queue;
  int next_label = 0;

  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] != kUnvisited) continue;
    index.neighbours(i, nbrs);
    if (nbrs.size() < min_pts) {
      labels[i] = kNoise;
      continue;
    }
    const int label = next_label++;
    labels[i] = label;
    queue.assign(nbrs.begin(), nbrs.end());
    while (!queue.empty()) {
      const std::size_t j = queue.front();
      queue.pop_front();
      if (labels[j] == kNoise) labels[j] = label;
      if (labels[j] != kUnvisited) continue;
      labels[j] = label;
      index.neighbours(j, nbrs);
      if (nbrs.size() >= min_pts) queue.insert(queue.end(), nbrs.begin(), nbrs.end());
    }
  }
  return labels;
}

std::vector<ColumnBin> bin_by_column(const PointCloud& cloud, const CameraIntrinsics& intr, const GridSpec& grid,
                                     const std::vector<std::size_t>& candidates) {
  if (grid.image_width() != intr.width() || grid.image_height() != intr.height()) {
    raise(Errc::GridMismatch, "grid does not match the camera image size");
  }
  std::vector<ColumnBin> bins(static_cast<std::size_t>(grid.cols()));
  for (int c = 0; c < grid.cols(); ++c) bins[static_cast<std::size_t>(c)].column = c;

  for (auto idx : candidates) {
    if (idx >= cloud.size()) raise(Errc::InvalidArgument, "candidate index out of range");
    const auto px = geometry::try_project(intr, cloud[idx]);
    if (!px) continue;
    if (!(px->u >= 0.0 && px->u < intr.width() && px->v >= 0.0 && px->v < intr.height())) continue;
    const int column = static_cast<int>(std::floor(px->u / grid.stride()));
    bins[static_cast<std::size_t>(column)].point_indices.push_back(idx);
  }
  return bins;
}

std::vector<std::vector<std::size_t>> cluster_column_objects(const ColumnBin& bin, const PointCloud& cloud,
                                                             const Plane& plane, const DbscanConfig& cfg) {
  std::vector<std::vector<std::size_t>> clusters;
  if (bin.point_indices.empty()) return clusters;

  std::vector<Point3> features;
  features.reserve(bin.point_indices.size());
  for (auto idx : bin.point_indices) {
    const auto& p = cloud[idx];
    features.emplace_back(p.norm(), plane.signed_distance(p), 0.0);
  }
  const auto labels = dbscan(features, cfg);
  const int count = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
  clusters.resize(static_cast<std::size_t>(std::max(count, 0)));
  for (std::size_t k = 0; k < labels.size(); ++k) {
    if (labels[k] >= 0) clusters[static_cast<std::size_t>(labels[k])].push_back(bin.point_indices[k]);
  }

  std::vector<double> mean_range(clusters.size(), 0.0);
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    for (auto idx : clusters[c]) mean_range[c] += cloud[idx].norm();
    mean_range[c] /= static_cast<double>(clusters[c].size());
  }
  std::vector<std::size_t> order(clusters.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return mean_range[a] < mean_range[b]; });
  std::vector<std::vector<std::size_t>> sorted;
  sorted.reserve(clusters.size());
  for (auto c : order) sorted.push_back(std::move(clusters[c]));
  return sorted;
}

}  // namespace stixelforge::cluster
