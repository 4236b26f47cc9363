#include "stixelforge/agt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "stixelforge/geometry.hpp"

namespace stixelforge::agt {
namespace {

int to_row(double v, int image_height) {
  if (!std::isfinite(v)) return v > 0 ? image_height : 0;
  const double clamped = std::clamp(v, 0.0, static_cast<double>(image_height));
  return static_cast<int>(std::lround(clamped));
}

double row_of(const CameraIntrinsics& intr, const Point3& p) {
  const auto px = geometry::try_project(intr, p);
  return px ? px->v : std::numeric_limits<double>::infinity();
}

}  // namespace

void AgtConfig::validate() const {
  ransac.validate();
  dbscan.validate();
  if (!(hpr_gamma > 0.0) || !std::isfinite(hpr_gamma)) raise(Errc::InvalidArgument, "hpr gamma must be positive");
  if (!(ground_attach_delta > 0.0)) raise(Errc::InvalidArgument, "ground attach delta must be positive");
  if (min_stixel_height < 1) raise(Errc::InvalidArgument, "min stixel height must be >= 1");
  if (stride < 1) raise(Errc::InvalidArgument, "grid stride must be >= 1");
}

StixelType classify_cluster(const std::vector<Point3>& cluster, const Plane& plane, double delta) {
  if (cluster.empty()) raise(Errc::InvalidArgument, "cannot classify an empty cluster");
  double lowest = std::numeric_limits<double>::infinity();
  for (const auto& p : cluster) lowest = std::min(lowest, plane.signed_distance(p));
  return lowest <= delta ? StixelType::GroundObject : StixelType::SwibObject;
}

std::size_t top_point_index(const std::vector<Point3>& cluster, const Plane& plane, const CameraIntrinsics& intr) {
  if (cluster.empty()) raise(Errc::InvalidArgument, "empty cluster has no top point");
  constexpr double kTie = kTopTieTolerance;
  double max_h = -std::numeric_limits<double>::infinity();
  for (const auto& p : cluster) max_h = std::max(max_h, plane.signed_distance(p));
  std::size_t best = cluster.size();
  double best_row = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < cluster.size(); ++i) {
    if (plane.signed_distance(cluster[i]) < max_h - kTie) continue;
    const double row = row_of(intr, cluster[i]);
    if (best == cluster.size() || row < best_row) {
      best = i;
      best_row = row;
    }
  }
  return best;
}

Stixel extract_stixel(const std::vector<Point3>& cluster, StixelType type, const Plane& plane,
                      std::optional<int> preceding_top_row, const CameraIntrinsics& intr, const GridSpec& grid,
                      const ExtractOptions& opts) {
  if (cluster.empty()) raise(Errc::InvalidArgument, "cannot extract a stixel from an empty cluster");
  if (!is_object(type)) raise(Errc::InvalidArgument, "extract_stixel builds object stixels only");
  const int height = grid.image_height();

  const Point3& top = cluster[top_point_index(cluster, plane, intr)];
  const int v_top = to_row(row_of(intr, top), height);

  int v_bottom = 0;
  if (type == StixelType::GroundObject) {
    const auto nearest = std::min_element(cluster.begin(), cluster.end(),
                                          [](const Point3& a, const Point3& b) { return a.norm() < b.norm(); });
    v_bottom = to_row(row_of(intr, plane.project(*nearest)), height);
  } else if (preceding_top_row) {
    v_bottom = std::clamp(*preceding_top_row, 0, height);
  } else {
    double lowest = -std::numeric_limits<double>::infinity();
    for (const auto& p : cluster) lowest = std::max(lowest, row_of(intr, p));
    v_bottom = to_row(lowest, height);
  }

  if (v_bottom - v_top < opts.min_stixel_height) {
    raise(Errc::DegenerateStixel, "stixel [" + std::to_string(v_top) + ", " + std::to_string(v_bottom) +
                                      ") shorter than " + std::to_string(opts.min_stixel_height) + " px");
  }
  return Stixel(opts.column, v_top, v_bottom, type, (top - opts.distance_origin).norm());
}

AgtResult generate_stixel_world_detailed(const PointCloud& cloud, const Calibration& calib, const AgtConfig& cfg) {
  cfg.validate();
  if (cloud.empty()) raise(Errc::InvalidArgument, "cannot generate stixels from an empty cloud");
  const auto& intr = calib.intrinsics;
  const GridSpec grid(intr.height(), intr.width(), cfg.stride);

  const PointCloud cam = geometry::transform_to_camera(cloud, calib.extrinsics);
  auto ground = ground::two_stage_ground(cam, cfg.ransac);
  const Plane& plane = ground.plane;

  std::vector<char> is_ground(cam.size(), 0);
  for (auto i : ground.ground) is_ground[i] = 1;
  std::vector<std::size_t> front;
  for (std::size_t i = 0; i < cam.size(); ++i) {
    if (!is_ground[i] && cam[i].z() > geometry::kMinDepth) front.push_back(i);
  }

  std::vector<std::size_t> visible = front;
  if (!front.empty()) {
    try {
      const auto kept = geometry::remove_hidden_points(cam.select(front), cfg.hpr_gamma);
      visible.clear();
      visible.reserve(kept.size());
      for (auto k : kept) visible.push_back(front[k]);
    } catch (const Error& e) {
      if (e.code() != Errc::DegenerateHull) throw;
    }
  }

  const auto object_bins = cluster::bin_by_column(cam, intr, grid, visible);
  const auto ground_bins = cluster::bin_by_column(cam, intr, grid, ground.ground);
  const Vec3 camera_origin = Vec3::Zero();

  std::vector<Stixel> stixels;
  for (int column = 0; column < grid.cols(); ++column) {
    const auto& bin = object_bins[static_cast<std::size_t>(column)];
    const auto clusters = cluster::cluster_column_objects(bin, cam, plane, cfg.dbscan);
    const ExtractOptions opts{column, cfg.min_stixel_height, camera_origin};
    const double u_center = (column + 0.5) * grid.stride();
    std::optional<int> horizon;
    if (const auto h = geometry::horizon_row(intr, plane, u_center)) horizon = to_row(*h, grid.image_height());

    std::vector<Stixel> emitted;
    for (const auto& members : clusters) {
      std::vector<Point3> pts;
      pts.reserve(members.size());
      for (auto idx : members) pts.push_back(cam[idx]);

      StixelType type = classify_cluster(pts, plane, cfg.ground_attach_delta);
      const int top = to_row(row_of(intr, pts[top_point_index(pts, plane, intr)]), grid.image_height());
      std::optional<int> preceding;
      if (!emitted.empty()) {
        const int prev_top = emitted.back().v_top();
        if (top < prev_top) {
          type = StixelType::SwibObject;
          preceding = prev_top;
        }
      } else if (type == StixelType::SwibObject && horizon && *horizon > top) {
        preceding = *horizon;
      }

      std::optional<Stixel> stixel;
      try {
        stixel = extract_stixel(pts, type, plane, preceding, intr, grid, opts);
      } catch (const Error& e) {
        if (e.code() != Errc::DegenerateStixel) throw;
        continue;
      }

      // Nearer stixels own their rows; trim this one to the free span below its top.
      int v_top = stixel->v_top();
      int v_bottom = stixel->v_bottom();
      bool covered = false;
      for (const auto& other : emitted) {
        if (other.v_top() <= v_top && v_top < other.v_bottom()) covered = true;
        if (other.v_top() > v_top) v_bottom = std::min(v_bottom, other.v_top());
      }
      if (covered || v_bottom - v_top < cfg.min_stixel_height) continue;
      emitted.emplace_back(column, v_top, v_bottom, stixel->type(), stixel->distance());
    }

    const auto& gbin = ground_bins[static_cast<std::size_t>(column)];
    if (!gbin.point_indices.empty()) {
      int g_top = 0;
      if (!emitted.empty()) {
        for (const auto& s : emitted) g_top = std::max(g_top, s.v_bottom());
      } else {
        g_top = horizon.value_or(0);
      }
      double lowest = -std::numeric_limits<double>::infinity();
      std::optional<std::size_t> farthest;
      double farthest_row = std::numeric_limits<double>::infinity();
      for (auto idx : gbin.point_indices) {
        const double v = row_of(intr, cam[idx]);
        lowest = std::max(lowest, v);
        if (v >= g_top && v < farthest_row) {
          farthest_row = v;
          farthest = idx;
        }
      }
      const int g_bottom = to_row(lowest, grid.image_height());
      if (g_bottom > g_top) {
        std::optional<double> distance;
        if (farthest) distance = (cam[*farthest] - camera_origin).norm();
        emitted.emplace_back(column, g_top, g_bottom, StixelType::Ground, distance);
      }
    }

    std::sort(emitted.begin(), emitted.end(),
              [](const Stixel& a, const Stixel& b) { return a.v_top() < b.v_top(); });
    stixels.insert(stixels.end(), emitted.begin(), emitted.end());
  }

  return AgtResult{StixelWorld(std::move(stixels), grid), plane, std::move(ground.ground), std::move(visible)};
}

StixelWorld generate_stixel_world(const PointCloud& cloud, const Calibration& calib, const AgtConfig& cfg) {
  return generate_stixel_world_detailed(cloud, calib, cfg).world;
}

}  // namespace stixelforge::agt
