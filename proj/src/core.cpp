#include "stixelforge/core.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace stixelforge {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::BehindCamera: return "BehindCamera";
    case Errc::DegenerateHull: return "DegenerateHull";
    case Errc::InsufficientPoints: return "InsufficientPoints";
    case Errc::NoModelFound: return "NoModelFound";
    case Errc::GroundNotFound: return "GroundNotFound";
    case Errc::DegenerateStixel: return "DegenerateStixel";
    case Errc::GridMismatch: return "GridMismatch";
    case Errc::NonFiniteInput: return "NonFiniteInput";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::ColumnMismatch: return "ColumnMismatch";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::TruncatedFile: return "TruncatedFile";
    case Errc::MissingKey: return "MissingKey";
    case Errc::MalformedMatrix: return "MalformedMatrix";
    case Errc::ParseError: return "ParseError";
    case Errc::BadMagic: return "BadMagic";
    case Errc::VersionUnsupported: return "VersionUnsupported";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

bool is_finite(const Point3& p) noexcept {
  return std::isfinite(p.x()) && std::isfinite(p.y()) && std::isfinite(p.z());
}

PointCloud::PointCloud(std::vector<Point3> points, Frame frame)
    : points_(std::move(points)), frame_(frame) {
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!is_finite(points_[i])) {
      raise(Errc::NonFiniteInput, "point " + std::to_string(i) + " has a non-finite coordinate");
    }
  }
}

PointCloud PointCloud::select(const std::vector<std::size_t>& indices) const {
  std::vector<Point3> out;
  out.reserve(indices.size());
  for (auto i : indices) {
    if (i >= points_.size()) raise(Errc::InvalidArgument, "point index out of range");
    out.push_back(points_[i]);
  }
  PointCloud cloud;
  cloud.points_ = std::move(out);
  cloud.frame_ = frame_;
  return cloud;
}

CameraIntrinsics::CameraIntrinsics(double fx, double fy, double cx, double cy, int width, int height)
    : fx_(fx), fy_(fy), cx_(cx), cy_(cy), width_(width), height_(height) {
  if (!(std::isfinite(fx) && std::isfinite(fy) && std::isfinite(cx) && std::isfinite(cy))) {
    raise(Errc::InvalidArgument, "intrinsics must be finite");
  }
  if (!(fx > 0.0 && fy > 0.0)) raise(Errc::InvalidArgument, "focal lengths must be positive");
  if (width <= 0 || height <= 0) raise(Errc::InvalidArgument, "image size must be positive");
  if (!(cx > 0.0 && cx < width && cy > 0.0 && cy < height)) {
    raise(Errc::InvalidArgument, "principal point must lie inside the image");
  }
}

Extrinsics::Extrinsics() : rotation_(Mat3::Identity()), translation_(Vec3::Zero()) {}

Extrinsics::Extrinsics(const Mat3& rotation, const Vec3& translation)
    : rotation_(rotation), translation_(translation) {
  if (!rotation.allFinite() || !translation.allFinite()) {
    raise(Errc::InvalidArgument, "extrinsics must be finite");
  }
  const double ortho_err = (rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff();
  if (ortho_err > 1e-9 || std::abs(rotation.determinant() - 1.0) > 1e-9) {
    raise(Errc::InvalidArgument, "rotation must be orthonormal with determinant +1");
  }
}

Extrinsics Extrinsics::inverse() const {
  Extrinsics inv;
  inv.rotation_ = rotation_.transpose();
  inv.translation_ = -(inv.rotation_ * translation_);
  return inv;
}

Plane::Plane(const Vec3& normal, double offset) : normal_(normal), offset_(offset) {
  const double norm = normal.norm();
  if (!std::isfinite(norm) || !std::isfinite(offset) || norm < 1e-12) {
    raise(Errc::InvalidArgument, "plane normal must be finite and non-zero");
  }
  normal_ /= norm;
  offset_ /= norm;
  if (offset_ < 0.0) {
    normal_ = -normal_;
    offset_ = -offset_;
  }
}

std::string_view stixel_type_code(StixelType type) {
  switch (type) {
    case StixelType::Ground: return "G";
    case StixelType::GroundObject: return "GO";
    case StixelType::SwibObject: return "SO";
    case StixelType::Sky: return "S";
  }
  return "?";
}

bool is_object(StixelType type) noexcept {
  return type == StixelType::GroundObject || type == StixelType::SwibObject;
}

Stixel::Stixel(int column, int v_top, int v_bottom, StixelType type, std::optional<double> distance)
    : column_(column), v_top_(v_top), v_bottom_(v_bottom), type_(type), distance_(distance) {
  if (column < 0) raise(Errc::InvalidArgument, "stixel column must be non-negative");
  if (v_top < 0 || v_top >= v_bottom) {
    raise(Errc::InvalidArgument, "stixel rows must satisfy 0 <= vTop < vBottom (got " +
                                     std::to_string(v_top) + ", " + std::to_string(v_bottom) + ")");
  }
  if (distance && !(std::isfinite(*distance) && *distance >= 0.0)) {
    raise(Errc::InvalidArgument, "stixel distance must be finite and non-negative");
  }
}

std::pair<int, int> stixel_pixel_interval(const Stixel& s) noexcept { return {s.v_top(), s.v_bottom()}; }

GridSpec::GridSpec(int image_height, int image_width, int stride) : stride_(stride), rows_(0), cols_(0) {
  if (stride < 1) raise(Errc::InvalidArgument, "grid stride must be >= 1");
  if (image_height < stride || image_width < stride) {
    raise(Errc::InvalidArgument, "image must hold at least one grid cell");
  }
  if (image_height % stride != 0 || image_width % stride != 0) {
    raise(Errc::InvalidArgument, "stride " + std::to_string(stride) + " must divide image size " +
                                     std::to_string(image_width) + "x" + std::to_string(image_height));
  }
  rows_ = image_height / stride;
  cols_ = image_width / stride;
}

StixelWorld::StixelWorld(std::vector<Stixel> stixels, int image_width, int image_height, int stixel_width)
    : stixels_(std::move(stixels)),
      image_width_(image_width),
      image_height_(image_height),
      stixel_width_(stixel_width) {
  const GridSpec grid(image_height, image_width, stixel_width);
  std::map<int, std::vector<std::pair<int, int>>> objects_per_column;
  for (const auto& s : stixels_) {
    if (s.column() >= grid.cols()) {
      raise(Errc::InvalidArgument, "stixel column " + std::to_string(s.column()) + " outside grid");
    }
    if (s.v_bottom() > image_height) raise(Errc::InvalidArgument, "stixel extends below the image");
    if (is_object(s.type())) objects_per_column[s.column()].emplace_back(s.v_top(), s.v_bottom());
  }
  for (auto& [column, intervals] : objects_per_column) {
    for (std::size_t i = 0; i < intervals.size(); ++i) {
      for (std::size_t j = i + 1; j < intervals.size(); ++j) {
        const int lo = std::max(intervals[i].first, intervals[j].first);
        const int hi = std::min(intervals[i].second, intervals[j].second);
        if (hi - lo > 0) {
          raise(Errc::InvalidArgument, "object stixels overlap in column " + std::to_string(column));
        }
      }
    }
  }
}

std::vector<Stixel> StixelWorld::object_stixels() const {
  std::vector<Stixel> out;
  std::copy_if(stixels_.begin(), stixels_.end(), std::back_inserter(out),
               [](const Stixel& s) { return is_object(s.type()); });
  return out;
}

std::vector<Stixel> StixelWorld::column_stixels(int column) const {
  std::vector<Stixel> out;
  std::copy_if(stixels_.begin(), stixels_.end(), std::back_inserter(out),
               [column](const Stixel& s) { return s.column() == column; });
  return out;
}

HeatmapPair::HeatmapPair(Matrix occ_in, Matrix cut_in, const GridSpec& grid_in)
    : occ(std::move(occ_in)), cut(std::move(cut_in)), grid(grid_in) {
  if (occ.rows() != grid.rows() || occ.cols() != grid.cols() || cut.rows() != grid.rows() ||
      cut.cols() != grid.cols()) {
    raise(Errc::GridMismatch, "heat map dimensions do not match the grid");
  }
}

TargetGrid::TargetGrid(BinaryMatrix occ_in, BinaryMatrix cut_in, const GridSpec& grid_in)
    : occ(std::move(occ_in)), cut(std::move(cut_in)), grid(grid_in) {
  if (occ.rows() != grid.rows() || occ.cols() != grid.cols() || cut.rows() != grid.rows() ||
      cut.cols() != grid.cols()) {
    raise(Errc::GridMismatch, "target dimensions do not match the grid");
  }
  if ((occ.array() > 1).any() || (cut.array() > 1).any()) {
    raise(Errc::InvalidArgument, "target cells must be 0 or 1");
  }
  for (Eigen::Index c = 0; c < cut.cols(); ++c) {
    if (cut.col(c).any() && !occ.col(c).any()) {
      raise(Errc::InvalidArgument, "cut marked in a column without occupancy");
    }
  }
}

}  // namespace stixelforge
