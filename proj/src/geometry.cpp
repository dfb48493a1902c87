// Copyright 2026 The packsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "packsim/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace packsim::geom {

Pose Pose::from_isometry(const Eigen::Isometry3d& iso) {
  Pose p;
  p.position = iso.translation();
  p.orientation = Quat(iso.rotation()).normalized();
  return p;
}

Eigen::Isometry3d Pose::isometry() const {
  Eigen::Isometry3d iso = Eigen::Isometry3d::Identity();
  iso.linear() = orientation.toRotationMatrix();
  iso.translation() = position;
  return iso;
}

Pose Pose::inverse() const {
  Pose inv;
  inv.orientation = orientation.conjugate();
  inv.position = -(inv.orientation * position);
  return inv;
}

Pose Pose::operator*(const Pose& rhs) const {
  Pose out;
  out.orientation = orientation * rhs.orientation;
  out.position = orientation * rhs.position + position;
  return out;
}

bool is_unit(const Quat& q, double tol) { return std::abs(q.norm() - 1.0) <= tol; }

double angle_between(const Quat& a, const Quat& b) {
  const double dot = std::min(1.0, std::abs(a.dot(b)));
  return 2.0 * std::acos(dot);
}

double point_box_distance_sq(const Vec3& p, const Vec3& half_extents) {
  double sum = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double excess = std::abs(p[i]) - half_extents[i];
    if (excess > 0.0) sum += excess * excess;
  }
  return sum;
}

double point_cylinder_distance(const Vec3& p, double radius, double half_height) {
  const double radial = std::hypot(p.x(), p.y()) - radius;
  const double axial = std::abs(p.z()) - half_height;
  const double dr = std::max(0.0, radial);
  const double dz = std::max(0.0, axial);
  return std::hypot(dr, dz);
}

double segment_box_distance_sq(const Vec3& a, const Vec3& b, const Box& box) {
  // Work in the box frame. The squared distance along the segment is a convex,
  // piecewise quadratic function of t whose pieces change only where a
  // coordinate crosses a face plane; minimize each piece in closed form.
  const Pose inv = box.pose.inverse();
  const Vec3 p0 = inv.apply(a);
  const Vec3 d = inv.apply(b) - p0;
  const Vec3& h = box.half_extents;

  std::array<double, 8> cuts{};
  std::size_t n = 0;
  cuts[n++] = 0.0;
  for (int i = 0; i < 3; ++i) {
    if (d[i] == 0.0) continue;
    for (double face : {-h[i], h[i]}) {
      const double t = (face - p0[i]) / d[i];
      if (t > 0.0 && t < 1.0) cuts[n++] = t;
    }
  }
  cuts[n++] = 1.0;
  std::sort(cuts.begin(), cuts.begin() + n);

  auto eval = [&](double t) { return point_box_distance_sq(p0 + t * d, h); };

  double best = eval(0.0);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double lo = cuts[k];
    const double hi = cuts[k + 1];
    best = std::min(best, eval(hi));
    if (hi <= lo) continue;
    const double mid = 0.5 * (lo + hi);
    double num = 0.0;
    double den = 0.0;
    for (int i = 0; i < 3; ++i) {
      const double c = p0[i] + mid * d[i];
      double offset;
      if (c > h[i]) {
        offset = p0[i] - h[i];
      } else if (c < -h[i]) {
        offset = p0[i] + h[i];
      } else {
        continue;
      }
      num += offset * d[i];
      den += d[i] * d[i];
    }
    if (den > 0.0) {
      const double t = std::clamp(-num / den, lo, hi);
      best = std::min(best, eval(t));
    }
  }
  return best;
}

double segment_cylinder_distance(const Vec3& a, const Vec3& b, const Cylinder& cyl) {
  const Pose inv = cyl.pose.inverse();
  const Vec3 p0 = inv.apply(a);
  const Vec3 d = inv.apply(b) - p0;
  auto f = [&](double t) {
    return point_cylinder_distance(p0 + t * d, cyl.radius, cyl.half_height);
  };
  // Distance to a convex set is convex along a line: golden-section search.
  constexpr double kInvPhi = 0.6180339887498949;
  double lo = 0.0;
  double hi = 1.0;
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int it = 0; it < 90 && hi - lo > 1e-15; ++it) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = f(x2);
    }
  }
  return std::min({f(0.0), f(1.0), f1, f2, f(0.5 * (lo + hi))});
}

double point_segment_distance_sq(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 ab = b - a;
  const double len_sq = ab.squaredNorm();
  double t = 0.0;
  if (len_sq > 0.0) t = std::clamp((p - a).dot(ab) / len_sq, 0.0, 1.0);
  return (a + t * ab - p).squaredNorm();
}

Vec3 solid_center(const Solid& s) {
  return std::visit([](const auto& v) { return v.pose.position; }, s);
}

double solid_bounding_radius(const Solid& s) {
  if (const auto* box = std::get_if<Box>(&s)) return box->half_extents.norm();
  const auto& cyl = std::get<Cylinder>(s);
  return std::hypot(cyl.radius, cyl.half_height);
}

bool capsule_intersects(const Capsule& c, const Solid& solid) {
  const double reach = c.radius + solid_bounding_radius(solid);
  if (point_segment_distance_sq(solid_center(solid), c.a, c.b) >= reach * reach) return false;
  if (const auto* box = std::get_if<Box>(&solid)) {
    return segment_box_distance_sq(c.a, c.b, *box) < c.radius * c.radius;
  }
  return segment_cylinder_distance(c.a, c.b, std::get<Cylinder>(solid)) < c.radius;
}

std::array<Vec3, 8> solid_corners(const Solid& s) {
  Pose pose;
  Vec3 h;
  if (const auto* box = std::get_if<Box>(&s)) {
    pose = box->pose;
    h = box->half_extents;
  } else {
    const auto& cyl = std::get<Cylinder>(s);
    pose = cyl.pose;
    h = Vec3(cyl.radius, cyl.radius, cyl.half_height);
  }
  std::array<Vec3, 8> out;
  for (int k = 0; k < 8; ++k) {
    const Vec3 local((k & 1) ? h.x() : -h.x(), (k & 2) ? h.y() : -h.y(), (k & 4) ? h.z() : -h.z());
    out[k] = pose.apply(local);
  }
  return out;
}

namespace {
inline double min_sel(double a, double b) { return a < b ? a : b; }
inline double max_sel(double a, double b) { return a > b ? a : b; }
}  // namespace

std::optional<double> ray_aabb(const Vec3& o, const Vec3& d, const Vec3& half_extents) {
  // Same selection semantics as the vector kernels so both paths agree bit for bit.
  double t_near = -std::numeric_limits<double>::infinity();
  double t_far = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 3; ++i) {
    const double t1 = (-half_extents[i] - o[i]) / d[i];
    const double t2 = (half_extents[i] - o[i]) / d[i];
    t_near = max_sel(t_near, min_sel(t1, t2));
    t_far = min_sel(t_far, max_sel(t1, t2));
  }
  if (!(t_near <= t_far) || !(t_far >= 0.0)) return std::nullopt;
  return max_sel(t_near, 0.0);
}

std::optional<double> ray_z_cylinder(const Vec3& o, const Vec3& d, double radius,
                                     double half_height) {
  double best = std::numeric_limits<double>::infinity();
  // Side wall.
  const double qa = d.x() * d.x() + d.y() * d.y();
  if (qa > 0.0) {
    const double qb = 2.0 * (o.x() * d.x() + o.y() * d.y());
    const double qc = o.x() * o.x() + o.y() * o.y() - radius * radius;
    const double disc = qb * qb - 4.0 * qa * qc;
    if (disc >= 0.0) {
      const double sq = std::sqrt(disc);
      for (double t : {(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)}) {
        if (t < 0.0) continue;
        const double z = o.z() + t * d.z();
        if (std::abs(z) <= half_height) best = std::min(best, t);
      }
    }
  }
  // Caps.
  if (d.z() != 0.0) {
    for (double cap : {-half_height, half_height}) {
      const double t = (cap - o.z()) / d.z();
      if (t < 0.0) continue;
      const double x = o.x() + t * d.x();
      const double y = o.y() + t * d.y();
      if (x * x + y * y <= radius * radius) best = std::min(best, t);
    }
  }
  // Origin inside.
  if (o.x() * o.x() + o.y() * o.y() <= radius * radius && std::abs(o.z()) <= half_height) {
    return 0.0;
  }
  if (std::isinf(best)) return std::nullopt;
  return best;
}

std::optional<double> ray_hit(const Vec3& origin, const Vec3& dir, const Solid& s) {
  if (const auto* box = std::get_if<Box>(&s)) {
    const Pose inv = box->pose.inverse();
    return ray_aabb(inv.apply(origin), inv.orientation * dir, box->half_extents);
  }
  const auto& cyl = std::get<Cylinder>(s);
  const Pose inv = cyl.pose.inverse();
  return ray_z_cylinder(inv.apply(origin), inv.orientation * dir, cyl.radius, cyl.half_height);
}

}  // namespace packsim::geom
