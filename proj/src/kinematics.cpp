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

#include "packsim/kinematics.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>

namespace packsim::kinematics {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

Eigen::Isometry3d dh_transform(const DhRow& row, double q) {
  const double theta = q + row.theta_offset;
  const double ct = std::cos(theta);
  const double st = std::sin(theta);
  const double ca = std::cos(row.alpha);
  const double sa = std::sin(row.alpha);
  Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
  t.matrix() << ct, -st * ca, st * sa, row.a * ct,  //
      st, ct * ca, -ct * sa, row.a * st,            //
      0.0, sa, ca, row.d,                           //
      0.0, 0.0, 0.0, 1.0;
  return t;
}

Eigen::Matrix<double, 6, 1> twist_error(const Eigen::Isometry3d& current,
                                        const Eigen::Isometry3d& target) {
  Eigen::Matrix<double, 6, 1> e;
  e.head<3>() = target.translation() - current.translation();
  const Eigen::AngleAxisd aa(target.linear() * current.linear().transpose());
  e.tail<3>() = aa.angle() * aa.axis();
  return e;
}

Eigen::Isometry3d flange(const ArmModel& arm, const JointVector& q) {
  Eigen::Isometry3d t = arm.base_pose.isometry();
  for (int i = 0; i < kDof; ++i) t = t * dh_transform(arm.dh[i], q[i]);
  return t;
}

Jacobian jacobian_unchecked(const ArmModel& arm, const JointVector& q) {
  const auto frames = link_frames(arm, q);
  const Eigen::Vector3d tip = frames[kDof].translation();
  Jacobian j;
  for (int i = 0; i < kDof; ++i) {
    const Eigen::Vector3d z = frames[i].linear().col(2);
    const Eigen::Vector3d o = frames[i].translation();
    j.block<3, 1>(0, i) = z.cross(tip - o);
    j.block<3, 1>(3, i) = z;
  }
  return j;
}

// Damped least squares from one seed; returns the final configuration.
JointVector dls_solve(const ArmModel& arm, const Eigen::Isometry3d& target, JointVector q,
                      const IkOptions& opt) {
  for (int it = 0; it < opt.max_iterations; ++it) {
    const auto e = twist_error(flange(arm, q), target);
    if (e.head<3>().norm() < 1e-10 && e.tail<3>().norm() < 1e-10) break;
    // Full damping far from the goal, fading out near it so the last steps
    // converge quadratically even close to a singularity.
    const double lambda = opt.damping * std::min(1.0, 10.0 * e.norm());
    const double lambda_sq = lambda * lambda;
    const Jacobian j = jacobian_unchecked(arm, q);
    const Eigen::Matrix<double, 6, 6> jjt = j * j.transpose() + lambda_sq * Jacobian::Identity();
    Eigen::Matrix<double, 6, 1> dq = j.transpose() * jjt.ldlt().solve(e);
    const double step = dq.cwiseAbs().maxCoeff();
    if (step > 0.5) dq *= 0.5 / step;
    for (int k = 0; k < kDof; ++k) q[k] += dq[k];
  }
  return q;
}

// Closest 2pi-equivalent of q to `near`, shifted back inside the limits.
JointVector wrap_near(const ArmModel& arm, JointVector q, const JointVector& near) {
  for (int k = 0; k < kDof; ++k) {
    q[k] = near[k] + std::remainder(q[k] - near[k], kTwoPi);
    while (q[k] > arm.upper[k]) q[k] -= kTwoPi;
    while (q[k] < arm.lower[k]) q[k] += kTwoPi;
  }
  return q;
}

}  // namespace

ArmModel ArmModel::ur10() {
  ArmModel arm;
  const double a[kDof] = {0.0, -0.612, -0.5723, 0.0, 0.0, 0.0};
  const double d[kDof] = {0.1273, 0.0, 0.0, 0.163941, 0.1157, 0.0922};
  const double alpha[kDof] = {kPi / 2.0, 0.0, 0.0, kPi / 2.0, -kPi / 2.0, 0.0};
  for (int i = 0; i < kDof; ++i) arm.dh[i] = {a[i], d[i], alpha[i], 0.0};
  arm.link_capsules = default_link_capsules(arm.dh);
  arm.lower.fill(-kTwoPi);
  arm.upper.fill(kTwoPi);
  arm.velocity_limits.fill(2.0);
  arm.acceleration_limits.fill(4.0);
  return arm;
}

std::vector<LinkCapsule> default_link_capsules(const std::array<DhRow, kDof>& dh) {
  constexpr double kRadius[kDof] = {0.075, 0.06, 0.05, 0.045, 0.045, 0.045};
  std::vector<LinkCapsule> out;
  for (int i = 0; i < kDof; ++i) {
    const DhRow& r = dh[i];
    // Origin of frame i-1 expressed in frame i: Rx(-alpha) * (-a, 0, -d).
    const geom::Vec3 prev(-r.a, -r.d * std::sin(r.alpha), -r.d * std::cos(r.alpha));
    if (prev.norm() < 1e-9) continue;
    out.push_back({i + 1, prev, geom::Vec3::Zero(), kRadius[i]});
  }
  return out;
}

void validate_arm(const ArmModel& arm) {
  for (const auto& c : arm.link_capsules) {
    if (!(c.radius > 0.0)) throw std::invalid_argument("link capsule radius must be positive");
    if (c.link < 0 || c.link > kDof) throw std::invalid_argument("link capsule index out of range");
  }
  for (int i = 0; i < kDof; ++i) {
    if (!(arm.lower[i] <= arm.upper[i])) throw std::invalid_argument("joint limits inverted");
    if (!(arm.velocity_limits[i] > 0.0) || !(arm.acceleration_limits[i] > 0.0)) {
      throw std::invalid_argument("velocity and acceleration limits must be positive");
    }
  }
  if (!geom::is_unit(arm.base_pose.orientation)) {
    throw std::invalid_argument("arm base orientation is not a unit quaternion");
  }
}

bool within_limits(const ArmModel& arm, const JointVector& q) {
  for (int i = 0; i < kDof; ++i) {
    if (!(q[i] >= arm.lower[i] && q[i] <= arm.upper[i])) return false;
  }
  return true;
}

std::array<Eigen::Isometry3d, kDof + 1> link_frames(const ArmModel& arm, const JointVector& q) {
  std::array<Eigen::Isometry3d, kDof + 1> frames;
  frames[0] = arm.base_pose.isometry();
  for (int i = 0; i < kDof; ++i) frames[i + 1] = frames[i] * dh_transform(arm.dh[i], q[i]);
  return frames;
}

geom::Pose forward_kinematics(const ArmModel& arm, const JointVector& q) {
  if (!within_limits(arm, q)) throw JointLimitError("joint configuration outside limits");
  return geom::Pose::from_isometry(flange(arm, q));
}

Jacobian jacobian(const ArmModel& arm, const JointVector& q) {
  if (!within_limits(arm, q)) throw JointLimitError("joint configuration outside limits");
  return jacobian_unchecked(arm, q);
}

PoseError pose_error(const ArmModel& arm, const JointVector& q, const geom::Pose& target) {
  const auto e = twist_error(flange(arm, q), target.isometry());
  return {e.head<3>().norm(), e.tail<3>().norm()};
}

std::optional<JointVector> inverse_kinematics(const ArmModel& arm, const geom::Pose& target,
                                              const JointVector& seed, const IkOptions& options) {
  const Eigen::Isometry3d goal = target.isometry();
  auto accept = [&](const JointVector& q) -> std::optional<JointVector> {
    const PoseError err = pose_error(arm, q, target);
    if (err.position < options.position_tolerance &&
        err.orientation < options.orientation_tolerance) {
      return wrap_near(arm, q, seed);
    }
    return std::nullopt;
  };

  // A seed that already meets a tight tolerance is returned untouched.
  {
    const PoseError err = pose_error(arm, seed, target);
    if (err.position < 1e-10 && err.orientation < 1e-10 && within_limits(arm, seed)) return seed;
  }
  if (auto q = accept(dls_solve(arm, goal, seed, options))) return q;

  std::mt19937_64 rng(options.restart_seed);
  std::uniform_real_distribution<double> angle(-kPi, kPi);
  for (int r = 0; r < options.restarts; ++r) {
    JointVector start;
    for (auto& v : start) v = angle(rng);
    if (auto q = accept(dls_solve(arm, goal, start, options))) return q;
  }
  return std::nullopt;
}

std::vector<geom::Capsule> arm_capsules(const ArmModel& arm, const JointVector& q) {
  const auto frames = link_frames(arm, q);
  std::vector<geom::Capsule> out;
  out.reserve(arm.link_capsules.size());
  for (const auto& c : arm.link_capsules) {
    const auto& f = frames[static_cast<std::size_t>(c.link)];
    out.push_back({f * c.a, f * c.b, c.radius});
  }
  return out;
}

double joint_distance(const JointVector& a, const JointVector& b) {
  double s = 0.0;
  for (int i = 0; i < kDof; ++i) {
    const double d = a[i] - b[i];
    s = s + d * d;
  }
  return std::sqrt(s);
}

namespace {
JointVector joints_from_json(const Json& j) {
  if (!j.is_array() || j.size() != kDof) throw std::invalid_argument("expected 6 joint values");
  JointVector v;
  for (int i = 0; i < kDof; ++i) v[i] = j.at(i).get<double>();
  return v;
}
}  // namespace

ArmModel arm_from_json(const Json& j, const ArmModel& defaults) {
  ArmModel arm = defaults;
  if (j.contains("dh")) {
    const Json& rows = j.at("dh");
    if (!rows.is_array() || rows.size() != kDof) throw std::invalid_argument("dh needs 6 rows");
    for (int i = 0; i < kDof; ++i) {
      const Json& r = rows.at(i);
      arm.dh[i] = {r.at("a").get<double>(), r.at("d").get<double>(), r.at("alpha").get<double>(),
                   r.value("theta_offset", 0.0)};
    }
    arm.link_capsules = default_link_capsules(arm.dh);
  }
  if (j.contains("base_pose")) arm.base_pose = pose_from_json(j.at("base_pose"));
  if (j.contains("link_capsules")) {
    arm.link_capsules.clear();
    for (const Json& c : j.at("link_capsules")) {
      arm.link_capsules.push_back({c.at("link").get<int>(), vec3_from_json(c.at("a")),
                                   vec3_from_json(c.at("b")), c.at("radius").get<double>()});
    }
  }
  if (j.contains("lower")) arm.lower = joints_from_json(j.at("lower"));
  if (j.contains("upper")) arm.upper = joints_from_json(j.at("upper"));
  if (j.contains("velocity_limits")) arm.velocity_limits = joints_from_json(j.at("velocity_limits"));
  if (j.contains("acceleration_limits")) {
    arm.acceleration_limits = joints_from_json(j.at("acceleration_limits"));
  }
  validate_arm(arm);
  return arm;
}

Json arm_to_json(const ArmModel& arm) {
  Json rows = Json::array();
  for (const auto& r : arm.dh) {
    rows.push_back({{"a", r.a}, {"d", r.d}, {"alpha", r.alpha}, {"theta_offset", r.theta_offset}});
  }
  Json caps = Json::array();
  for (const auto& c : arm.link_capsules) {
    caps.push_back(
        {{"link", c.link}, {"a", vec3_to_json(c.a)}, {"b", vec3_to_json(c.b)}, {"radius", c.radius}});
  }
  return Json{{"dh", rows},
              {"base_pose", pose_to_json(arm.base_pose)},
              {"link_capsules", caps},
              {"lower", arm.lower},
              {"upper", arm.upper},
              {"velocity_limits", arm.velocity_limits},
              {"acceleration_limits", arm.acceleration_limits}};
}

}  // namespace packsim::kinematics
