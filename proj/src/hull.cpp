#include "stixelforge/hull.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace stixelforge::hull {
namespace {

struct Face {
  std::array<std::size_t, 3> v;
  Vec3 normal;
  double offset = 0.0;
  std::vector<std::size_t> outside;
  bool alive = true;
  int visit = -1;
};

std::uint64_t edge_key(std::size_t a, std::size_t b) {
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint64_t>(b);
}

class Quickhull {
 public:
  Quickhull(std::span<const Vec3> points, double eps) : pts_(points) {
    double scale = 0.0;
    for (const auto& p : pts_) scale = std::max(scale, p.cwiseAbs().maxCoeff());
    eps_ = eps * std::max(1.0, scale);
  }

  Hull run() {
    build_simplex();
    std::vector<std::size_t> horizon_from, horizon_to;
    std::vector<std::size_t> visible;
    std::vector<std::size_t> stack;
    int pass = 0;
    for (std::size_t fi = 0; fi < faces_.size(); ++fi) {
      if (!faces_[fi].alive || faces_[fi].outside.empty()) continue;

      const Face& seed = faces_[fi];
      std::size_t eye = seed.outside.front();
      double best = -1.0;
      for (auto p : seed.outside) {
        const double d = distance(seed, pts_[p]);
        if (d > best) {
          best = d;
          eye = p;
        }
      }

      // Flood the faces that can see the eye point.
      ++pass;
      visible.clear();
      horizon_from.clear();
      horizon_to.clear();
      stack.assign(1, fi);
      faces_[fi].visit = pass;
      while (!stack.empty()) {
        const std::size_t f = stack.back();
        stack.pop_back();
        visible.push_back(f);
        const auto v = faces_[f].v;
        for (int e = 0; e < 3; ++e) {
          const std::size_t a = v[e], b = v[(e + 1) % 3];
          const std::size_t nb = edges_.at(edge_key(b, a));
          if (faces_[nb].visit == pass) continue;
          if (distance(faces_[nb], pts_[eye]) > eps_) {
            faces_[nb].visit = pass;
            stack.push_back(nb);
          } else {
            horizon_from.push_back(a);
            horizon_to.push_back(b);
          }
        }
      }

      std::vector<std::size_t> orphans;
      for (auto f : visible) {
        Face& face = faces_[f];
        face.alive = false;
        for (int e = 0; e < 3; ++e) edges_.erase(edge_key(face.v[e], face.v[(e + 1) % 3]));
        for (auto p : face.outside) {
          if (p != eye) orphans.push_back(p);
        }
        face.outside.clear();
        face.outside.shrink_to_fit();
      }

      const std::size_t first_new = faces_.size();
      for (std::size_t h = 0; h < horizon_from.size(); ++h) {
        add_face(horizon_from[h], horizon_to[h], eye);
      }
      for (auto p : orphans) {
        double best_d = eps_;
        std::size_t best_f = faces_.size();
        for (std::size_t f = first_new; f < faces_.size(); ++f) {
          const double d = distance(faces_[f], pts_[p]);
          if (d > best_d) {
            best_d = d;
            best_f = f;
          }
        }
        if (best_f < faces_.size()) faces_[best_f].outside.push_back(p);
      }
    }

    Hull out;
    std::vector<char> is_vertex(pts_.size(), 0);
    for (const auto& f : faces_) {
      if (!f.alive) continue;
      out.faces.push_back(f.v);
      for (auto v : f.v) is_vertex[v] = 1;
    }
    for (std::size_t i = 0; i < pts_.size(); ++i) {
      if (is_vertex[i]) out.vertices.push_back(i);
    }
    return out;
  }

 private:
  double distance(const Face& f, const Vec3& p) const { return f.normal.dot(p) + f.offset; }

  std::size_t add_face(std::size_t a, std::size_t b, std::size_t c) {
    Face f;
    f.v = {a, b, c};
    Vec3 n = (pts_[b] - pts_[a]).cross(pts_[c] - pts_[a]);
    const double len = n.norm();
    f.normal = len > 0.0 ? Vec3(n / len) : Vec3::Zero();
    f.offset = -f.normal.dot(pts_[a]);
    faces_.push_back(std::move(f));
    const std::size_t id = faces_.size() - 1;
    edges_[edge_key(a, b)] = id;
    edges_[edge_key(b, c)] = id;
    edges_[edge_key(c, a)] = id;
    return id;
  }

  void build_simplex() {
    const std::size_t n = pts_.size();
    if (n < 4) raise(Errc::DegenerateHull, "need at least four points for a 3D hull");

    // Extreme pair along the widest axis.
    std::size_t i0 = 0, i1 = 0;
    double widest = -1.0;
    for (int axis = 0; axis < 3; ++axis) {
      std::size_t lo = 0, hi = 0;
      for (std::size_t i = 1; i < n; ++i) {
        if (pts_[i][axis] < pts_[lo][axis]) lo = i;
        if (pts_[i][axis] > pts_[hi][axis]) hi = i;
      }
      const double span = pts_[hi][axis] - pts_[lo][axis];
      if (span > widest) {
        widest = span;
        i0 = lo;
        i1 = hi;
      }
    }
    if (widest <= eps_) raise(Errc::DegenerateHull, "all points coincide");

    const Vec3 dir = (pts_[i1] - pts_[i0]).normalized();
    std::size_t i2 = n;
    double far_line = eps_;
    for (std::size_t i = 0; i < n; ++i) {
      const Vec3 d = pts_[i] - pts_[i0];
      const double dist = (d - d.dot(dir) * dir).norm();
      if (dist > far_line) {
        far_line = dist;
        i2 = i;
      }
    }
    if (i2 == n) raise(Errc::DegenerateHull, "points are collinear");

    const Vec3 pn = (pts_[i1] - pts_[i0]).cross(pts_[i2] - pts_[i0]).normalized();
    std::size_t i3 = n;
    double far_plane = eps_;
    for (std::size_t i = 0; i < n; ++i) {
      const double dist = std::abs(pn.dot(pts_[i] - pts_[i0]));
      if (dist > far_plane) {
        far_plane = dist;
        i3 = i;
      }
    }
    if (i3 == n) raise(Errc::DegenerateHull, "points are coplanar");

    // Orient the base so that i3 lies behind it.
    if (pn.dot(pts_[i3] - pts_[i0]) > 0.0) std::swap(i1, i2);
    add_face(i0, i1, i2);
    add_face(i0, i3, i1);
    add_face(i1, i3, i2);
    add_face(i2, i3, i0);

    for (std::size_t i = 0; i < n; ++i) {
      if (i == i0 || i == i1 || i == i2 || i == i3) continue;
      double best_d = eps_;
      std::size_t best_f = faces_.size();
      for (std::size_t f = 0; f < 4; ++f) {
        const double d = distance(faces_[f], pts_[i]);
        if (d > best_d) {
          best_d = d;
          best_f = f;
        }
      }
      if (best_f < faces_.size()) faces_[best_f].outside.push_back(i);
    }
  }

  std::span<const Vec3> pts_;
  double eps_;
  std::vector<Face> faces_;
  std::unordered_map<std::uint64_t, std::size_t> edges_;
};

}  // namespace

Hull convex_hull(std::span<const Vec3> points, double eps) {
  if (points.size() > std::numeric_limits<std::uint32_t>::max()) {
    raise(Errc::InvalidArgument, "too many points for the hull");
  }
  return Quickhull(points, eps).run();
}

}  // namespace stixelforge::hull
