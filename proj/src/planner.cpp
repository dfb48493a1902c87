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

#include "packsim/planner.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "packsim/simd/kernels.hpp"

namespace packsim::planner {

using kinematics::kDof;

namespace {
constexpr double kGoalTolerance = 1e-9;
}

void validate_params(const PlannerParams& p) {
  if (p.i_max < 0) throw std::invalid_argument("i_max must be non-negative");
  if (!(p.goal_bias >= 0.0 && p.goal_bias <= 1.0)) {
    throw std::invalid_argument("goal_bias must lie in [0, 1]");
  }
  if (!(p.steer_min > 0.0 && p.steer_min <= p.steer_max)) {
    throw std::invalid_argument("need 0 < steer_min <= steer_max");
  }
  if (!(p.neighbor_radius >= 0.0)) throw std::invalid_argument("neighbor_radius must be >= 0");
  if (!(p.edge_resolution > 0.0)) throw std::invalid_argument("edge_resolution must be > 0");
}

PlannerParams params_from_json(const Json& j, PlannerParams p) {
  p.i_max = j.value("i_max", p.i_max);
  p.goal_bias = j.value("goal_bias", p.goal_bias);
  p.steer_min = j.value("steer_min", p.steer_min);
  p.steer_max = j.value("steer_max", p.steer_max);
  p.neighbor_radius = j.value("neighbor_radius", p.neighbor_radius);
  p.edge_resolution = j.value("edge_resolution", p.edge_resolution);
  p.rng_seed = j.value("rng_seed", p.rng_seed);
  validate_params(p);
  return p;
}

Json params_to_json(const PlannerParams& p) {
  return Json{{"i_max", p.i_max},
              {"goal_bias", p.goal_bias},
              {"steer_min", p.steer_min},
              {"steer_max", p.steer_max},
              {"neighbor_radius", p.neighbor_radius},
              {"edge_resolution", p.edge_resolution},
              {"rng_seed", p.rng_seed}};
}

PlanTree::PlanTree(const JointVector& root) {
  nodes_.push_back({root, 0.0, kNoParent});
  children_.emplace_back();
  for (int j = 0; j < kDof; ++j) cols_[j].push_back(root[j]);
}

std::size_t PlanTree::insert(const JointVector& q, std::size_t parent) {
  const PlanNode& p = nodes_.at(parent);
  const double d = p.d + kinematics::joint_distance(q, p.q);
  nodes_.push_back({q, d, parent});
  children_.emplace_back();
  const std::size_t idx = nodes_.size() - 1;
  children_[parent].push_back(idx);
  for (int j = 0; j < kDof; ++j) cols_[j].push_back(q[j]);
  return idx;
}

std::size_t PlanTree::nearest(const JointVector& q) const {
  simd::JointColumns view;
  for (int j = 0; j < kDof; ++j) view.col[j] = cols_[j].data();
  view.count = nodes_.size();
  return simd::nearest(view, q).index;
}

std::vector<std::size_t> PlanTree::within(const JointVector& q, double radius) const {
  simd::JointColumns view;
  for (int j = 0; j < kDof; ++j) view.col[j] = cols_[j].data();
  view.count = nodes_.size();
  std::vector<std::size_t> out;
  simd::within_radius(view, q, radius * radius, out);
  return out;
}

bool PlanTree::is_ancestor(std::size_t ancestor, std::size_t node) const {
  for (std::size_t cur = node; cur != kNoParent; cur = nodes_[cur].parent) {
    if (cur == ancestor) return true;
  }
  return false;
}

void PlanTree::reparent(std::size_t node, std::size_t new_parent) {
  if (is_ancestor(node, new_parent)) throw std::logic_error("reparent would create a cycle");
  auto& siblings = children_[nodes_[node].parent];
  siblings.erase(std::find(siblings.begin(), siblings.end(), node));
  nodes_[node].parent = new_parent;
  children_[new_parent].push_back(node);

  std::vector<std::size_t> stack{node};
  while (!stack.empty()) {
    const std::size_t cur = stack.back();
    stack.pop_back();
    const PlanNode& p = nodes_[nodes_[cur].parent];
    nodes_[cur].d = p.d + kinematics::joint_distance(nodes_[cur].q, p.q);
    for (std::size_t c : children_[cur]) stack.push_back(c);
  }
}

std::vector<JointVector> PlanTree::path_to(std::size_t node) const {
  std::vector<JointVector> path;
  for (std::size_t cur = node; cur != kNoParent; cur = nodes_[cur].parent) {
    path.push_back(nodes_[cur].q);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

JointVector sample(const PlannerParams& params, const ArmModel& arm, const JointVector& q_t,
                   Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (unit(rng) < params.goal_bias) return q_t;
  JointVector q;
  for (int j = 0; j < kDof; ++j) {
    q[j] = std::uniform_real_distribution<double>(arm.lower[j], arm.upper[j])(rng);
  }
  return q;
}

std::size_t find_nearest(const PlanTree& tree, const JointVector& q_s) { return tree.nearest(q_s); }

std::optional<JointVector> steer(const JointVector& q_s, const JointVector& q_nearest,
                                 const PlannerParams& params) {
  const double delta = kinematics::joint_distance(q_s, q_nearest);
  if (delta < params.steer_min) return std::nullopt;
  if (delta <= params.steer_max) return q_s;
  const double scale = params.steer_max / delta;
  JointVector out;
  for (int j = 0; j < kDof; ++j) out[j] = q_nearest[j] + (q_s[j] - q_nearest[j]) * scale;
  return out;
}

bool config_valid(const scene::SceneWorld& world, const ArmModel& arm, const JointVector& q) {
  if (!kinematics::within_limits(arm, q)) return false;
  const auto shape = kinematics::arm_capsules(arm, q);
  return !scene::collides(world, shape);
}

bool edge_valid(const scene::SceneWorld& world, const ArmModel& arm, const JointVector& q_a,
                const JointVector& q_b, double edge_resolution) {
  const double length = kinematics::joint_distance(q_a, q_b);
  const auto steps = static_cast<std::size_t>(std::ceil(length / edge_resolution));
  if (!config_valid(world, arm, q_a)) return false;
  for (std::size_t i = 1; i <= steps; ++i) {
    JointVector q;
    if (i == steps) {
      q = q_b;
    } else {
      const double s = static_cast<double>(i) / static_cast<double>(steps);
      for (int j = 0; j < kDof; ++j) q[j] = q_a[j] + (q_b[j] - q_a[j]) * s;
    }
    if (!config_valid(world, arm, q)) return false;
  }
  return true;
}

std::string_view status_name(PlanStatus s) {
  switch (s) {
    case PlanStatus::Success:
      return "success";
    case PlanStatus::InvalidStart:
      return "invalid-start";
    case PlanStatus::UnreachableTarget:
      return "unreachable-target";
    case PlanStatus::InvalidGoal:
      return "invalid-goal";
    case PlanStatus::IterationsExhausted:
      return "iterations-exhausted";
  }
  return "unknown";
}

PlanResult plan_to_configuration(const scene::SceneWorld& world, const ArmModel& arm,
                                 const JointVector& q0, const JointVector& q_t,
                                 const PlannerParams& params, const TreeObserver& observer) {
  validate_params(params);
  PlanResult result;
  result.goal = q_t;
  if (!config_valid(world, arm, q0)) {
    result.status = PlanStatus::InvalidStart;
    return result;
  }
  if (!config_valid(world, arm, q_t)) {
    result.status = PlanStatus::InvalidGoal;
    return result;
  }

  PlanTree tree(q0);
  if (kinematics::joint_distance(q0, q_t) <= kGoalTolerance) {
    result.status = PlanStatus::Success;
    result.path = {q0};
    result.tree_size = 1;
    return result;
  }

  Rng rng(params.rng_seed);
  const double radius = params.neighbor_radius;
  for (int i = 0; i < params.i_max; ++i) {
    result.iterations = i + 1;
    const JointVector q_s = sample(params, arm, q_t, rng);
    const std::size_t nearest = find_nearest(tree, q_s);
    const JointVector& q_near = tree.node(nearest).q;

    std::optional<JointVector> q_new = steer(q_s, q_near, params);
    // A goal sample closer than steer_min connects directly; otherwise a node
    // that lands just short of q_t would make the goal unreachable.
    if (!q_new && q_s == q_t && kinematics::joint_distance(q_s, q_near) > kGoalTolerance) {
      q_new = q_t;
    }
    if (!q_new) continue;
    if (!edge_valid(world, arm, q_near, *q_new, params.edge_resolution)) continue;

    const std::size_t added = tree.insert(*q_new, nearest);
    if (observer) observer(tree, TreeEvent::Inserted);

    for (std::size_t nb : tree.within(*q_new, radius)) {
      if (nb == added || nb == nearest) continue;
      const PlanNode& node_nb = tree.node(nb);
      const PlanNode& node_new = tree.node(added);
      const double via_new = node_new.d + kinematics::joint_distance(node_new.q, node_nb.q);
      if (!(via_new < node_nb.d)) continue;
      if (tree.is_ancestor(nb, added)) continue;
      if (!edge_valid(world, arm, node_new.q, node_nb.q, params.edge_resolution)) continue;
      tree.reparent(nb, added);
      if (observer) observer(tree, TreeEvent::Rewired);
    }

    if (kinematics::joint_distance(tree.node(added).q, q_t) <= kGoalTolerance) {
      result.status = PlanStatus::Success;
      result.path = tree.path_to(added);
      result.tree_size = tree.size();
      return result;
    }
  }
  result.status = PlanStatus::IterationsExhausted;
  result.tree_size = tree.size();
  return result;
}

PlanResult plan(const scene::SceneWorld& world, const ArmModel& arm, const JointVector& q0,
                const geom::Pose& p_t, const PlannerParams& params, const TreeObserver& observer) {
  validate_params(params);
  if (!config_valid(world, arm, q0)) {
    PlanResult r;
    r.status = PlanStatus::InvalidStart;
    return r;
  }
  const auto q_t = kinematics::inverse_kinematics(arm, p_t, q0);
  if (!q_t) {
    PlanResult r;
    r.status = PlanStatus::UnreachableTarget;
    return r;
  }
  return plan_to_configuration(world, arm, q0, *q_t, params, observer);
}

}  // namespace packsim::planner
