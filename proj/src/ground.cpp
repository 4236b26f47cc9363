#include "stixelforge/ground.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/Geometry>

#include <cmath>
#include <optional>
#include <random>

namespace stixelforge::ground {
namespace {

std::vector<std::size_t> inliers_of(const Plane& plane, const std::vector<Point3>& points, double threshold) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (std::abs(plane.signed_distance(points[i])) <= threshold) out.push_back(i);
  }
  return out;
}

}  // namespace

void RansacConfig::validate() const {
  if (iterations < 1) raise(Errc::InvalidArgument, "ransac iterations must be >= 1");
  if (!(inlier_threshold > 0.0) || !(stage2_threshold > 0.0)) {
    raise(Errc::InvalidArgument, "ransac thresholds must be positive");
  }
  if (stage2_threshold > inlier_threshold) {
    raise(Errc::InvalidArgument, "stage-2 threshold must not exceed the stage-1 threshold");
  }
  if (!std::isfinite(height_prior)) raise(Errc::InvalidArgument, "height prior must be finite");
  if (!(min_inlier_fraction > 0.0 && min_inlier_fraction <= 1.0)) {
    raise(Errc::InvalidArgument, "min inlier fraction must lie in (0, 1]");
  }
}

Plane fit_plane_least_squares(const std::vector<Point3>& points, const std::vector<std::size_t>& indices) {
  if (indices.size() < 3) raise(Errc::InsufficientPoints, "least squares plane needs 3 points");
  Vec3 centroid = Vec3::Zero();
  for (auto i : indices) centroid += points[i];
  centroid /= static_cast<double>(indices.size());
  Mat3 cov = Mat3::Zero();
  for (auto i : indices) {
    const Vec3 d = points[i] - centroid;
    cov += d * d.transpose();
  }
  Eigen::SelfAdjointEigenSolver<Mat3> solver(cov);
  const auto& evals = solver.eigenvalues();
  if (evals(1) <= 1e-12 * std::max(1.0, evals(2))) {
    raise(Errc::NoModelFound, "inliers are collinear");
  }
  const Vec3 normal = solver.eigenvectors().col(0);
  return Plane(normal, -normal.dot(centroid));
}

double plane_residual(const Plane& plane, const std::vector<Point3>& points,
                      const std::vector<std::size_t>& indices) {
  double sum = 0.0;
  for (auto i : indices) {
    const double d = plane.signed_distance(points[i]);
    sum += d * d;
  }
  return sum;
}

PlaneFit fit_plane_ransac(const PointCloud& cloud, double threshold, int iterations, std::uint64_t seed) {
  if (!(threshold > 0.0)) raise(Errc::InvalidArgument, "threshold must be positive");
  if (iterations < 1) raise(Errc::InvalidArgument, "iterations must be >= 1");
  const auto& pts = cloud.points();
  const std::size_t n = pts.size();
  if (n < 3) raise(Errc::InsufficientPoints, "plane fit needs at least 3 points, got " + std::to_string(n));

  double scale = 1.0;
  for (const auto& p : pts) scale = std::max(scale, p.cwiseAbs().maxCoeff());

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);

  std::optional<Plane> best;
  std::size_t best_count = 0;
  for (int it = 0; it < iterations; ++it) {
    const std::size_t a = pick(rng);
    std::size_t b = pick(rng);
    std::size_t c = pick(rng);
    if (a == b || b == c || a == c) continue;
    const Vec3 normal = (pts[b] - pts[a]).cross(pts[c] - pts[a]);
    if (normal.norm() <= 1e-12 * scale * scale) continue;
    const Plane candidate(normal, -normal.dot(pts[a]));
    std::size_t count = 0;
    for (const auto& p : pts) {
      if (std::abs(candidate.signed_distance(p)) <= threshold) ++count;
    }
    if (count > best_count) {
      best_count = count;
      best = candidate;
    }
  }
  if (!best) raise(Errc::NoModelFound, "every RANSAC sample was degenerate");

  const auto sample_inliers = inliers_of(*best, pts, threshold);
  Plane refined = *best;
  try {
    refined = fit_plane_least_squares(pts, sample_inliers);
  } catch (const Error&) {
    // Collinear inlier set: keep the minimal-sample plane.
  }
  auto inliers = inliers_of(refined, pts, threshold);
  return PlaneFit{refined, std::move(inliers), *best};
}

GroundResult two_stage_ground(const PointCloud& cloud, const RansacConfig& cfg) {
  cfg.validate();
  if (cloud.empty()) raise(Errc::InvalidArgument, "ground fit needs a non-empty cloud");
  const auto& pts = cloud.points();

  std::vector<std::size_t> low;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (-pts[i].y() < cfg.height_prior) low.push_back(i);
  }

  try {
    const auto stage1 = fit_plane_ransac(cloud.select(low), cfg.inlier_threshold, cfg.iterations, cfg.seed);
    auto stage1_inliers = inliers_of(stage1.plane, pts, cfg.inlier_threshold);

    const auto stage2 =
        fit_plane_ransac(cloud.select(stage1_inliers), cfg.stage2_threshold, cfg.iterations, cfg.seed + 1);
    std::vector<std::size_t> ground;
    ground.reserve(stage2.inliers.size());
    for (auto i : stage2.inliers) ground.push_back(stage1_inliers[i]);

    const double fraction = static_cast<double>(ground.size()) / static_cast<double>(pts.size());
    if (fraction < cfg.min_inlier_fraction) {
      raise(Errc::GroundNotFound, "ground inlier fraction " + std::to_string(fraction) + " below minimum");
    }
    return GroundResult{stage2.plane, std::move(ground), std::move(stage1_inliers)};
  } catch (const Error& e) {
    if (e.code() == Errc::InsufficientPoints || e.code() == Errc::NoModelFound) {
      raise(Errc::GroundNotFound, e.what());
    }
    throw;
  }
}

}  // namespace stixelforge::ground
