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

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string_view>
#include <vector>

#include "packsim/json_io.hpp"
#include "packsim/kinematics.hpp"
#include "packsim/scene.hpp"

namespace packsim::planner {

using kinematics::ArmModel;
using kinematics::JointVector;
using Rng = std::mt19937_64;

struct PlannerParams {
  int i_max = 10000;
  double goal_bias = 0.2;
  double steer_min = 0.05;
  double steer_max = 0.5;
  double neighbor_radius = 1.0;
  double edge_resolution = 0.05;
  std::uint64_t rng_seed = 0;
};

/// Throws std::invalid_argument when a parameter invariant is broken.
void validate_params(const PlannerParams& p);
PlannerParams params_from_json(const Json& j, PlannerParams defaults = {});
Json params_to_json(const PlannerParams& p);

inline constexpr std::size_t kNoParent = static_cast<std::size_t>(-1);

/// Tree node: configuration, cost-to-root along tree edges, parent index.
struct PlanNode {
  JointVector q{};
  double d = 0.0;
  std::size_t parent = kNoParent;
};

/// Rooted tree over joint space. Configurations are additionally kept in
/// structure-of-arrays form so nearest-neighbour scans can be vectorized.
class PlanTree {
 public:
  explicit PlanTree(const JointVector& root);

  std::size_t size() const { return nodes_.size(); }
  const PlanNode& node(std::size_t i) const { return nodes_[i]; }
  const std::vector<PlanNode>& nodes() const { return nodes_; }

  /// Adds q under `parent` with d = parent.d + |q - parent.q|.
  std::size_t insert(const JointVector& q, std::size_t parent);

  /// Lowest-index node at minimum Euclidean distance from q.
  std::size_t nearest(const JointVector& q) const;

  /// Nodes within `radius` of q, ascending index.
  std::vector<std::size_t> within(const JointVector& q, double radius) const;

  bool is_ancestor(std::size_t ancestor, std::size_t node) const;

  /// Moves `node` under `new_parent` and refreshes the cost of its subtree.
  void reparent(std::size_t node, std::size_t new_parent);

  /// Root-to-node configurations following parent links.
  std::vector<JointVector> path_to(std::size_t node) const;

 private:
  std::vector<PlanNode> nodes_;
  std::vector<std::vector<std::size_t>> children_;
  std::array<std::vector<double>, kinematics::kDof> cols_;
};

/// With probability goal_bias returns q_t exactly, otherwise a uniform draw
/// over the joint-limit box.
JointVector sample(const PlannerParams& params, const ArmModel& arm, const JointVector& q_t,
                   Rng& rng);

std::size_t find_nearest(const PlanTree& tree, const JointVector& q_s);

/// Empty (skip marker) when |q_s - q_nearest| < steer_min; the point at
/// steer_max toward q_s when farther than steer_max; q_s itself otherwise.
std::optional<JointVector> steer(const JointVector& q_s, const JointVector& q_nearest,
                                 const PlannerParams& params);

/// Configuration-level validity: inside the joint limits and collision free.
bool config_valid(const scene::SceneWorld& world, const ArmModel& arm, const JointVector& q);

/// Checks the straight joint-space segment at a spacing of at most
/// `edge_resolution`, endpoints included.
bool edge_valid(const scene::SceneWorld& world, const ArmModel& arm, const JointVector& q_a,
                const JointVector& q_b, double edge_resolution);

enum class PlanStatus { Success, InvalidStart, UnreachableTarget, InvalidGoal, IterationsExhausted };

std::string_view status_name(PlanStatus s);

struct PlanResult {
  PlanStatus status = PlanStatus::IterationsExhausted;
  std::vector<JointVector> path;  // empty unless Success
  JointVector goal{};             // IK solution when one was found
  int iterations = 0;
  std::size_t tree_size = 0;

  bool ok() const { return status == PlanStatus::Success; }
};

enum class TreeEvent { Inserted, Rewired };

/// Called after each insertion and after each rewire.
using TreeObserver = std::function<void(const PlanTree&, TreeEvent)>;

/// Biased RRT with rewiring toward a joint-space goal.
PlanResult plan_to_configuration(const scene::SceneWorld& world, const ArmModel& arm,
                                 const JointVector& q0, const JointVector& q_t,
                                 const PlannerParams& params, const TreeObserver& observer = {});

/// Solves IK for the flange pose p_t (seeded at q0) and plans to it.
PlanResult plan(const scene::SceneWorld& world, const ArmModel& arm, const JointVector& q0,
                const geom::Pose& p_t, const PlannerParams& params,
                const TreeObserver& observer = {});

}  // namespace packsim::planner
