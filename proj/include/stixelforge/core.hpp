#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "stixelforge/error.hpp"

namespace stixelforge {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Point3 = Vec3;

/// Row-major dense matrix used for heat maps, targets and gradients.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class Frame { Sensor, Camera };

bool is_finite(const Point3& p) noexcept;

class PointCloud {
 public:
  PointCloud() = default;
  PointCloud(std::vector<Point3> points, Frame frame);

  const std::vector<Point3>& points() const noexcept { return points_; }
  const Point3& operator[](std::size_t i) const { return points_[i]; }
  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }
  Frame frame() const noexcept { return frame_; }

  /// Sub-cloud in the order given by `indices`.
  PointCloud select(const std::vector<std::size_t>& indices) const;

 private:
  std::vector<Point3> points_;
  Frame frame_ = Frame::Sensor;
};

class CameraIntrinsics {
 public:
  CameraIntrinsics(double fx, double fy, double cx, double cy, int width, int height);

  double fx() const noexcept { return fx_; }
  double fy() const noexcept { return fy_; }
  double cx() const noexcept { return cx_; }
  double cy() const noexcept { return cy_; }
  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

 private:
  double fx_, fy_, cx_, cy_;
  int width_, height_;
};

/// Rigid sensor -> camera transform: p_cam = rotation * p_sensor + translation.
class Extrinsics {
 public:
  Extrinsics();
  Extrinsics(const Mat3& rotation, const Vec3& translation);

  const Mat3& rotation() const noexcept { return rotation_; }
  const Vec3& translation() const noexcept { return translation_; }

  Vec3 apply(const Vec3& p) const { return rotation_ * p + translation_; }
  Extrinsics inverse() const;

 private:
  Mat3 rotation_;
  Vec3 translation_;
};

struct Calibration {
  CameraIntrinsics intrinsics;
  Extrinsics extrinsics;
};

/// {p : normal . p + offset = 0}. The normal is unit length and oriented so
/// that the origin lies on the non-negative side (signed height >= 0).
class Plane {
 public:
  Plane(const Vec3& normal, double offset);

  const Vec3& normal() const noexcept { return normal_; }
  double offset() const noexcept { return offset_; }

  double signed_distance(const Vec3& p) const noexcept { return normal_.dot(p) + offset_; }
  Vec3 project(const Vec3& p) const { return p - signed_distance(p) * normal_; }

 private:
  Vec3 normal_;
  double offset_;
};

enum class StixelType : std::uint8_t { Ground, GroundObject, SwibObject, Sky };

std::string_view stixel_type_code(StixelType type);
bool is_object(StixelType type) noexcept;

class Stixel {
 public:
  Stixel(int column, int v_top, int v_bottom, StixelType type,
         std::optional<double> distance = std::nullopt);

  int column() const noexcept { return column_; }
  int v_top() const noexcept { return v_top_; }
  int v_bottom() const noexcept { return v_bottom_; }
  int height() const noexcept { return v_bottom_ - v_top_; }
  StixelType type() const noexcept { return type_; }
  const std::optional<double>& distance() const noexcept { return distance_; }

  friend bool operator==(const Stixel&, const Stixel&) = default;

 private:
  int column_;
  int v_top_;
  int v_bottom_;
  StixelType type_;
  std::optional<double> distance_;
};

/// Closed-open pixel rows [vTop, vBottom) covered by a Stixel.
std::pair<int, int> stixel_pixel_interval(const Stixel& s) noexcept;

class GridSpec {
 public:
  GridSpec(int image_height, int image_width, int stride);

  int stride() const noexcept { return stride_; }
  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  int image_height() const noexcept { return rows_ * stride_; }
  int image_width() const noexcept { return cols_ * stride_; }

  /// Output tensor shape (channels, rows, cols).
  std::array<int, 3> tensor_shape() const noexcept { return {2, rows_, cols_}; }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

 private:
  int stride_;
  int rows_;
  int cols_;
};

class StixelWorld {
 public:
  StixelWorld(std::vector<Stixel> stixels, int image_width, int image_height, int stixel_width);
  StixelWorld(std::vector<Stixel> stixels, const GridSpec& grid)
      : StixelWorld(std::move(stixels), grid.image_width(), grid.image_height(), grid.stride()) {}

  const std::vector<Stixel>& stixels() const noexcept { return stixels_; }
  int image_width() const noexcept { return image_width_; }
  int image_height() const noexcept { return image_height_; }
  int stixel_width() const noexcept { return stixel_width_; }
  int columns() const noexcept { return image_width_ / stixel_width_; }
  GridSpec grid() const { return GridSpec(image_height_, image_width_, stixel_width_); }

  std::vector<Stixel> object_stixels() const;
  std::vector<Stixel> column_stixels(int column) const;

  friend bool operator==(const StixelWorld&, const StixelWorld&) = default;

 private:
  std::vector<Stixel> stixels_;
  int image_width_;
  int image_height_;
  int stixel_width_;
};

struct HeatmapPair {
  HeatmapPair(Matrix occ, Matrix cut, const GridSpec& grid);

  Matrix occ;
  Matrix cut;
  GridSpec grid;
};

using BinaryMatrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct TargetGrid {
  TargetGrid(BinaryMatrix occ, BinaryMatrix cut, const GridSpec& grid);

  BinaryMatrix occ;
  BinaryMatrix cut;
  GridSpec grid;
};

}  // namespace stixelforge
