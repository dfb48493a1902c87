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

#pragma once

#include <Eigen/Geometry>

#include <array>
#include <optional>
#include <variant>

namespace packsim::geom {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;

/// Rigid transform: rotation as a unit quaternion followed by translation.
struct Pose {
  Vec3 position = Vec3::Zero();
  Quat orientation = Quat::Identity();

  static Pose identity() { return {}; }
  static Pose from_isometry(const Eigen::Isometry3d& iso);
  Eigen::Isometry3d isometry() const;

  Vec3 apply(const Vec3& p) const { return orientation * p + position; }
  Pose inverse() const;
  Pose operator*(const Pose& rhs) const;
};

/// True when the orientation quaternion has unit norm within `tol`.
bool is_unit(const Quat& q, double tol = 1e-9);

/// Geodesic angle between two orientations, in radians.
double angle_between(const Quat& a, const Quat& b);

struct Capsule {
  Vec3 a = Vec3::Zero();
  Vec3 b = Vec3::Zero();
  double radius = 0.0;

  double length() const { return (b - a).norm(); }
};

/// Oriented box; `half_extents` are in the box frame given by `pose`.
struct Box {
  Pose pose;
  Vec3 half_extents = Vec3::Zero();
};

/// Finite cylinder with its axis along the local z axis.
struct Cylinder {
  Pose pose;
  double radius = 0.0;
  double half_height = 0.0;
};

using Solid = std::variant<Box, Cylinder>;

// Squared distance from a point to an axis-aligned box centered at the origin.
double point_box_distance_sq(const Vec3& p, const Vec3& half_extents);

// Distance from a point to a z-aligned cylinder centered at the origin (0 inside).
double point_cylinder_distance(const Vec3& p, double radius, double half_height);

/// Exact squared distance between segment [a, b] and an oriented box.
double segment_box_distance_sq(const Vec3& a, const Vec3& b, const Box& box);

/// Distance between segment [a, b] and a finite cylinder.
double segment_cylinder_distance(const Vec3& a, const Vec3& b, const Cylinder& cyl);

/// Strict intersection: touching at exactly `radius` does not count.
bool capsule_intersects(const Capsule& c, const Solid& solid);

/// Squared distance between a point and segment [a, b].
double point_segment_distance_sq(const Vec3& p, const Vec3& a, const Vec3& b);

/// Center and radius of a sphere enclosing the solid.
Vec3 solid_center(const Solid& s);
double solid_bounding_radius(const Solid& s);

/// Eight corners of the solid's bounding box in world frame.
std::array<Vec3, 8> solid_corners(const Solid& s);

/// Entry parameter of the ray o + t*d (t >= 0) into the solid, if any.
std::optional<double> ray_hit(const Vec3& origin, const Vec3& dir, const Solid& s);

// Local-frame primitives shared with the vectorized depth renderer.
std::optional<double> ray_aabb(const Vec3& o, const Vec3& d, const Vec3& half_extents);
std::optional<double> ray_z_cylinder(const Vec3& o, const Vec3& d, double radius,
                                     double half_height);

}  // namespace packsim::geom
