#include "stixelforge/synth.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "stixelforge/keyvalue.hpp"

namespace stixelforge::synth {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;
constexpr double kTMin = 1e-9;

std::optional<double> hit_ground(double ground_z, const Vec3& o, const Vec3& d) {
  if (d.z() >= 0.0) return std::nullopt;
  const double t = (ground_z - o.z()) / d.z();
  if (t <= kTMin) return std::nullopt;
  return t;
}

std::optional<double> hit_box(const Box& b, const Vec3& o, const Vec3& d) {
  double t0 = -std::numeric_limits<double>::infinity();
  double t1 = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 3; ++k) {
    const double lo = b.center[k] - 0.5 * b.extents[k];
    const double hi = b.center[k] + 0.5 * b.extents[k];
    if (std::abs(d[k]) < 1e-15) {
      if (o[k] < lo || o[k] > hi) return std::nullopt;
      continue;
    }
    double a = (lo - o[k]) / d[k];
    double c = (hi - o[k]) / d[k];
    if (a > c) std::swap(a, c);
    t0 = std::max(t0, a);
    t1 = std::min(t1, c);
    if (t0 > t1) return std::nullopt;
  }
  if (t0 > kTMin) return t0;
  if (t1 > kTMin) return t1;
  return std::nullopt;
}

std::optional<double> hit_wall(const Wall& w, const Vec3& o, const Vec3& d) {
  const Vec3 n = w.edge_a.cross(w.edge_b);
  const double denom = n.dot(d);
  if (std::abs(denom) < 1e-15) return std::nullopt;
  const double t = n.dot(w.corner - o) / denom;
  if (t <= kTMin) return std::nullopt;
  const Vec3 rel = o + t * d - w.corner;
  Eigen::Matrix2d gram;
  gram << w.edge_a.dot(w.edge_a), w.edge_a.dot(w.edge_b), w.edge_a.dot(w.edge_b), w.edge_b.dot(w.edge_b);
  const Eigen::Vector2d st = gram.ldlt().solve(Eigen::Vector2d(w.edge_a.dot(rel), w.edge_b.dot(rel)));
  constexpr double kEdge = 1e-12;
  if (st[0] < -kEdge || st[0] > 1.0 + kEdge || st[1] < -kEdge || st[1] > 1.0 + kEdge) return std::nullopt;
  return t;
}

std::vector<double> channel_elevations(const LidarSpec& s) {
  std::vector<double> el(static_cast<std::size_t>(s.channels));
  for (int c = 0; c < s.channels; ++c) {
    el[static_cast<std::size_t>(c)] =
        s.channels == 1 ? 0.5 * (s.fov_up + s.fov_down)
                        : s.fov_down + (s.fov_up - s.fov_down) * c / static_cast<double>(s.channels - 1);
  }
  return el;
}

std::vector<double> azimuths(const LidarSpec& s) {
  const double span = s.azimuth_max - s.azimuth_min;
  const bool full_turn = span >= 360.0 - 1e-9;
  std::vector<double> az;
  for (long k = 0;; ++k) {
    const double a = s.azimuth_min + static_cast<double>(k) * s.azimuth_step;
    if (full_turn ? a >= s.azimuth_min + 360.0 - 1e-9 : a > s.azimuth_max + 1e-9) break;
    az.push_back(a);
  }
  return az;
}

bool inside_lidar_view(const LidarSpec& s, const Vec3& world_point) {
  const Vec3 rel = world_point - s.origin;
  const double range = rel.norm();
  if (range > s.max_range || range <= 0.0) return false;
  const double el = std::asin(std::clamp(rel.z() / range, -1.0, 1.0)) / kDeg;
  if (el < s.fov_down - 1e-9 || el > s.fov_up + 1e-9) return false;
  if (s.azimuth_max - s.azimuth_min < 360.0 - 1e-9) {
    const double az = std::atan2(rel.y(), rel.x()) / kDeg;
    if (az < s.azimuth_min - 1e-9 || az > s.azimuth_max + 1e-9) return false;
  }
  return true;
}

std::vector<double> numbers_exact(const kv::Entry& e, std::size_t n) {
  auto v = kv::parse_numbers(e.value, e.line);
  if (v.size() != n) {
    raise(Errc::ParseError, "line " + std::to_string(e.line) + ": '" + e.key + "' expects " + std::to_string(n) +
                                " numbers, got " + std::to_string(v.size()));
  }
  return v;
}

int to_row(double v, int height) {
  return static_cast<int>(std::lround(std::clamp(v, 0.0, static_cast<double>(height))));
}

struct ObjectTrack {
  int top_row = std::numeric_limits<int>::max();
  int low_row = -1;
  double nearest = std::numeric_limits<double>::infinity();
  Vec3 nearest_point = Vec3::Zero();
  Vec3 top_point = Vec3::Zero();
  double distance_sum = 0.0;
  long hits = 0;
};

}  // namespace

void LidarSpec::validate() const {
  if (channels < 1) raise(Errc::InvalidArgument, "sensor needs at least one channel");
  if (!(fov_up > fov_down) && channels > 1) raise(Errc::InvalidArgument, "vertical field of view must be positive");
  if (!(azimuth_step > 0.0)) raise(Errc::InvalidArgument, "azimuth step must be positive");
  if (!(azimuth_max >= azimuth_min)) raise(Errc::InvalidArgument, "azimuth range is empty");
  if (!(max_range > 0.0)) raise(Errc::InvalidArgument, "max range must be positive");
  if (!(noise_sigma >= 0.0)) raise(Errc::InvalidArgument, "noise sigma must be >= 0");
  if (!is_finite(origin)) raise(Errc::InvalidArgument, "sensor origin must be finite");
}

Calibration CameraRig::calibration() const {
  Mat3 r;
  r << 0, -1, 0, 0, 0, -1, 1, 0, 0;
  return Calibration{intrinsics, Extrinsics(r, -r * offset)};
}

void SceneSpec::validate() const {
  sensor.validate();
  if (!(sensor.origin.z() > ground_z)) raise(Errc::InvalidArgument, "sensor must sit above the ground");
  for (const auto& b : boxes) {
    if (!(b.extents.array() > 0.0).all()) raise(Errc::InvalidArgument, "box extents must be positive");
    if (!(b.center.x() - 0.5 * b.extents.x() > sensor.origin.x())) {
      raise(Errc::InvalidArgument, "boxes must lie in front of the sensor");
    }
  }
  for (const auto& w : walls) {
    if (w.edge_a.cross(w.edge_b).norm() < 1e-12) raise(Errc::InvalidArgument, "wall edges are parallel");
    for (const Vec3& c : {w.corner, Vec3(w.corner + w.edge_a), Vec3(w.corner + w.edge_b),
                          Vec3(w.corner + w.edge_a + w.edge_b)}) {
      if (!(c.x() > sensor.origin.x())) raise(Errc::InvalidArgument, "walls must lie in front of the sensor");
    }
  }
}

SceneSpec parse_scene(std::string_view text) {
  const auto doc = kv::Document::parse(text);
  SceneSpec spec;
  for (const auto& e : doc.entries()) {
    const auto& k = e.key;
    if (k == "seed") {
      const auto v = kv::parse_int(e.value, e.line);
      if (v < 0) raise(Errc::ParseError, "line " + std::to_string(e.line) + ": seed must be >= 0");
      spec.seed = static_cast<std::uint64_t>(v);
    } else if (k == "ground_z") {
      spec.ground_z = kv::parse_double(e.value, e.line);
    } else if (k == "sensor.origin") {
      const auto v = numbers_exact(e, 3);
      spec.sensor.origin = Vec3(v[0], v[1], v[2]);
    } else if (k == "sensor.fov_up") {
      spec.sensor.fov_up = kv::parse_double(e.value, e.line);
    } else if (k == "sensor.fov_down") {
      spec.sensor.fov_down = kv::parse_double(e.value, e.line);
    } else if (k == "sensor.channels") {
      spec.sensor.channels = static_cast<int>(kv::parse_int(e.value, e.line));
    } else if (k == "sensor.azimuth_step") {
      spec.sensor.azimuth_step = kv::parse_double(e.value, e.line);
    } else if (k == "sensor.azimuth_min") {
      spec.sensor.azimuth_min = kv::parse_double(e.value, e.line);
    } else if (k == "sensor.azimuth_max") {
      spec.sensor.azimuth_max = kv::parse_double(e.value, e.line);
    } else if (k == "sensor.max_range") {
      spec.sensor.max_range = kv::parse_double(e.value, e.line);
    } else if (k == "sensor.noise_sigma") {
      spec.sensor.noise_sigma = kv::parse_double(e.value, e.line);
    } else if (k == "camera.intrinsics") {
      const auto v = numbers_exact(e, 6);
      spec.camera.intrinsics =
          CameraIntrinsics(v[0], v[1], v[2], v[3], static_cast<int>(v[4]), static_cast<int>(v[5]));
    } else if (k == "camera.offset") {
      const auto v = numbers_exact(e, 3);
      spec.camera.offset = Vec3(v[0], v[1], v[2]);
    } else if (k == "box") {
      const auto v = numbers_exact(e, 6);
      spec.boxes.push_back(Box{Vec3(v[0], v[1], v[2]), Vec3(v[3], v[4], v[5])});
    } else if (k == "wall") {
      const auto v = numbers_exact(e, 9);
      spec.walls.push_back(Wall{Vec3(v[0], v[1], v[2]), Vec3(v[3], v[4], v[5]), Vec3(v[6], v[7], v[8])});
    } else {
      raise(Errc::ParseError, "line " + std::to_string(e.line) + ": unknown key '" + k + "'");
    }
  }
  spec.validate();
  return spec;
}

std::optional<Hit> cast_ray(const SceneSpec& spec, const Vec3& origin, const Vec3& dir) {
  std::optional<Hit> best;
  auto consider = [&](std::optional<double> t, int id) {
    if (t && (!best || *t < best->t)) best = Hit{*t, id};
  };
  consider(hit_ground(spec.ground_z, origin, dir), -1);
  const int nb = static_cast<int>(spec.boxes.size());
  for (int i = 0; i < nb; ++i) consider(hit_box(spec.boxes[static_cast<std::size_t>(i)], origin, dir), i);
  for (std::size_t i = 0; i < spec.walls.size(); ++i) {
    consider(hit_wall(spec.walls[i], origin, dir), nb + static_cast<int>(i));
  }
  return best;
}

std::vector<Vec3> lidar_directions(const LidarSpec& sensor) {
  sensor.validate();
  const auto el = channel_elevations(sensor);
  const auto az = azimuths(sensor);
  std::vector<Vec3> dirs;
  dirs.reserve(el.size() * az.size());
  for (double e : el) {
    for (double a : az) {
      const double ce = std::cos(e * kDeg);
      dirs.emplace_back(ce * std::cos(a * kDeg), ce * std::sin(a * kDeg), std::sin(e * kDeg));
    }
  }
  return dirs;
}

PointCloud simulate_lidar(const SceneSpec& spec) {
  spec.validate();
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<Point3> pts;
  for (const Vec3& d : lidar_directions(spec.sensor)) {
    const auto hit = cast_ray(spec, spec.sensor.origin, d);
    if (!hit || hit->t > spec.sensor.max_range) continue;
    double range = hit->t;
    if (spec.sensor.noise_sigma > 0.0) range += spec.sensor.noise_sigma * noise(rng);
    pts.push_back(range * d);
  }
  return PointCloud(std::move(pts), Frame::Sensor);
}

StixelWorld oracle_stixel_world(const SceneSpec& spec, const Calibration& calib, const GridSpec& grid,
                                double ground_attach_delta, int min_stixel_height) {
  spec.validate();
  const auto& intr = calib.intrinsics;
  if (intr.width() != grid.image_width() || intr.height() != grid.image_height()) {
    raise(Errc::GridMismatch, "grid does not match the camera image");
  }
  const Mat3& rot = calib.extrinsics.rotation();
  const Vec3 cam_in_sensor = -rot.transpose() * calib.extrinsics.translation();
  const Vec3 cam_world = spec.sensor.origin + cam_in_sensor;
  const int height = grid.image_height();
  const int s = grid.stride();

  const std::size_t n_objects = spec.boxes.size() + spec.walls.size();
  std::vector<double> object_base(n_objects);
  for (std::size_t i = 0; i < spec.boxes.size(); ++i) {
    object_base[i] = spec.boxes[i].center.z() - 0.5 * spec.boxes[i].extents.z() - spec.ground_z;
  }
  for (std::size_t i = 0; i < spec.walls.size(); ++i) {
    const auto& w = spec.walls[i];
    object_base[spec.boxes.size() + i] =
        std::min({w.corner.z(), w.corner.z() + w.edge_a.z(), w.corner.z() + w.edge_b.z(),
                  w.corner.z() + w.edge_a.z() + w.edge_b.z()}) -
        spec.ground_z;
  }

  auto row_of_world = [&](const Vec3& p) {
    const Vec3 c = rot * (p - spec.sensor.origin) + calib.extrinsics.translation();
    return intr.cy() + intr.fy() * c.y() / c.z();
  };

  // Ground normal (world +z) in camera coordinates, for the horizon line.
  const Vec3 n_cam = rot * Vec3::UnitZ();

  std::vector<Stixel> stixels;
  for (int col = 0; col < grid.cols(); ++col) {
    std::vector<ObjectTrack> tracks(n_objects);
    int ground_low = -1;
    for (int k = 0; k <= 2 * s; ++k) {
      const double u = std::min(col * s + 0.5 * k, (col + 1) * s - 1e-3);
      for (int v = 0; v <= height; ++v) {
        const Vec3 d_cam((u - intr.cx()) / intr.fx(), (v - intr.cy()) / intr.fy(), 1.0);
        const Vec3 d = rot.transpose() * d_cam;
        const auto hit = cast_ray(spec, cam_world, d);
        if (!hit) continue;
        const Vec3 p = cam_world + hit->t * d;
        if (!inside_lidar_view(spec.sensor, p)) continue;
        if (hit->object < 0) {
          ground_low = std::max(ground_low, v);
          continue;
        }
        auto& tr = tracks[static_cast<std::size_t>(hit->object)];
        const double dist = hit->t * d.norm();
        if (v < tr.top_row) {
          tr.top_row = v;
          tr.top_point = p;
        }
        tr.low_row = std::max(tr.low_row, v);
        if (dist < tr.nearest) {
          tr.nearest = dist;
          tr.nearest_point = p;
        }
        tr.distance_sum += dist;
        ++tr.hits;
      }
    }

    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < n_objects; ++i) {
      if (tracks[i].hits > 0) order.push_back(i);
    }
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return tracks[a].distance_sum / tracks[a].hits < tracks[b].distance_sum / tracks[b].hits;
    });

    std::optional<int> horizon;
    if (std::abs(n_cam.y()) > 1e-12) {
      const double uc = (col + 0.5) * s;
      horizon = to_row(intr.cy() - intr.fy() * (n_cam.z() + n_cam.x() * (uc - intr.cx()) / intr.fx()) / n_cam.y(),
                       height);
    }

    std::vector<Stixel> emitted;
    for (auto id : order) {
      const auto& tr = tracks[id];
      StixelType type = object_base[id] <= ground_attach_delta ? StixelType::GroundObject : StixelType::SwibObject;
      const int top = tr.top_row;
      std::optional<int> preceding;
      if (!emitted.empty()) {
        if (top < emitted.back().v_top()) {
          type = StixelType::SwibObject;
          preceding = emitted.back().v_top();
        }
      } else if (type == StixelType::SwibObject && horizon && *horizon > top) {
        preceding = horizon;
      }
      int bottom = 0;
      if (type == StixelType::GroundObject) {
        const Vec3 foot(tr.nearest_point.x(), tr.nearest_point.y(), spec.ground_z);
        bottom = to_row(row_of_world(foot), height);
      } else {
        bottom = preceding ? *preceding : tr.low_row;
      }
      if (bottom - top < min_stixel_height) continue;
      bool covered = false;
      for (const auto& other : emitted) {
        if (other.v_top() <= top && top < other.v_bottom()) covered = true;
        if (other.v_top() > top) bottom = std::min(bottom, other.v_top());
      }
      if (covered || bottom - top < min_stixel_height) continue;
      const Vec3 top_cam = rot * (tr.top_point - spec.sensor.origin) + calib.extrinsics.translation();
      emitted.emplace_back(col, top, bottom, type, top_cam.norm());
    }

    if (ground_low >= 0) {
      int g_top = 0;
      if (!emitted.empty()) {
        for (const auto& st : emitted) g_top = std::max(g_top, st.v_bottom());
      } else {
        g_top = horizon.value_or(0);
      }
      if (ground_low > g_top) emitted.emplace_back(col, g_top, ground_low, StixelType::Ground);
    }
    std::sort(emitted.begin(), emitted.end(),
              [](const Stixel& a, const Stixel& b) { return a.v_top() < b.v_top(); });
    stixels.insert(stixels.end(), emitted.begin(), emitted.end());
  }
  return StixelWorld(std::move(stixels), grid);
}

}  // namespace stixelforge::synth
