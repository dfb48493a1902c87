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

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "packsim/geometry.hpp"
#include "packsim/json_io.hpp"

namespace packsim::kinematics {

inline constexpr int kDof = 6;

/// Six joint angles in radians.
using JointVector = std::array<double, kDof>;
using Jacobian = Eigen::Matrix<double, 6, kDof>;

/// Standard Denavit-Hartenberg row: Rz(theta + offset) Tz(d) Tx(a) Rx(alpha).
struct DhRow {
  double a = 0.0;
  double d = 0.0;
  double alpha = 0.0;
  double theta_offset = 0.0;
};

/// Capsule rigidly attached to `link` (0 = base frame, k = frame after joint k).
struct LinkCapsule {
  int link = 0;
  geom::Vec3 a = geom::Vec3::Zero();
  geom::Vec3 b = geom::Vec3::Zero();
  double radius = 0.0;
};

struct ArmModel {
  std::array<DhRow, kDof> dh{};
  geom::Pose base_pose;
  std::vector<LinkCapsule> link_capsules;
  JointVector lower{};
  JointVector upper{};
  JointVector velocity_limits{};
  JointVector acceleration_limits{};

  /// Published UR10 parameters, +-2pi limits, 2 rad/s and 4 rad/s^2.
  static ArmModel ur10();
};

class JointLimitError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// One capsule per link with nonzero DH displacement, spanning the link
/// between consecutive joint frames.
std::vector<LinkCapsule> default_link_capsules(const std::array<DhRow, kDof>& dh);

/// Throws std::invalid_argument on a malformed model (non-positive radius, bad link index).
void validate_arm(const ArmModel& arm);

bool within_limits(const ArmModel& arm, const JointVector& q);

/// World frames of the base (index 0) and of every joint frame 1..6.
std::array<Eigen::Isometry3d, kDof + 1> link_frames(const ArmModel& arm, const JointVector& q);

/// Flange pose in world coordinates. Throws JointLimitError outside the limits.
geom::Pose forward_kinematics(const ArmModel& arm, const JointVector& q);

/// Geometric Jacobian at the flange; rows are (linear xyz, angular xyz).
Jacobian jacobian(const ArmModel& arm, const JointVector& q);

struct IkOptions {
  double damping = 0.05;
  int max_iterations = 200;
  int restarts = 16;
  double position_tolerance = 1e-4;
  double orientation_tolerance = 1e-3;
  std::uint64_t restart_seed = 0x5eed1c0de;
};

/// Damped-least-squares IK from `seed`, then from up to `restarts` random
/// seeds. The result is wrapped to the 2pi-equivalent closest to `seed` that
/// lies within the limits. Empty when every attempt misses the tolerances.
std::optional<JointVector> inverse_kinematics(const ArmModel& arm, const geom::Pose& target,
                                              const JointVector& seed,
                                              const IkOptions& options = {});

/// Position and orientation error between the flange at q and `target`.
struct PoseError {
  double position = 0.0;
  double orientation = 0.0;
};
PoseError pose_error(const ArmModel& arm, const JointVector& q, const geom::Pose& target);

/// World-frame capsules for every link capsule at configuration q.
std::vector<geom::Capsule> arm_capsules(const ArmModel& arm, const JointVector& q);

double joint_distance(const JointVector& a, const JointVector& b);

ArmModel arm_from_json(const Json& j, const ArmModel& defaults = ArmModel::ur10());
Json arm_to_json(const ArmModel& arm);

}  // namespace packsim::kinematics
