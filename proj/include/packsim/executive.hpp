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
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "packsim/kinematics.hpp"
#include "packsim/perception.hpp"
#include "packsim/planner.hpp"
#include "packsim/scene.hpp"
#include "packsim/trajectory.hpp"

namespace packsim::executive {

using kinematics::ArmModel;
using kinematics::JointVector;
using scene::SceneWorld;

enum class GripperKind { Parallel, Vacuum };
enum class GripperStatus { Open, Closed, VacuumOn, VacuumOff };

std::string_view gripper_name(GripperKind k);

struct GripperState {
  GripperKind kind = GripperKind::Parallel;
  GripperStatus status = GripperStatus::Open;
  geom::Pose tool_offset;                    // flange -> tool point
  std::vector<geom::Capsule> body;           // flange frame
  std::optional<std::string> holding;

  static GripperState parallel();
  static GripperState vacuum();
};

enum class ExecErrc { Busy, WrongGripper, Precondition, TooFar };

class ExecutiveError : public std::runtime_error {
 public:
  ExecutiveError(ExecErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ExecErrc code() const { return code_; }

 private:
  ExecErrc code_;
};

struct ActionCosts {
  double grasp = 0.5;
  double twist = 2.0;
  double vacuum = 0.5;
  double tool_change = 5.0;
};

/// Replaces the mounted gripper. Same kind is a no-op; throws Busy while
/// something is held. The caller is responsible for homing the arm first.
GripperState switch_gripper(const GripperState& state, GripperKind kind);

/// Time charged for a switch from `from` to `to`.
double switch_cost(const GripperState& from, GripperKind to, const ActionCosts& costs);

/// Arm model including the mounted gripper and any held component as extra
/// link-6 capsules.
ArmModel equipped_arm(const ArmModel& arm, const GripperState& gripper, const SceneWorld& world,
                      bool include_held = true);

geom::Pose tool_pose(const ArmModel& arm, const GripperState& gripper, const JointVector& q);

/// Flange pose that puts the tool point at `tool`.
geom::Pose flange_for_tool(const GripperState& gripper, const geom::Pose& tool);

struct ActionResult {
  SceneWorld world;
  bool in_zone = false;
};

/// Parallel gripper: close on `id` (attach) or open (detach whatever is held).
ActionResult parallel_set(SceneWorld world, GripperState& gripper, bool close,
                          std::string_view id, const geom::Pose& tool);

/// Vacuum gripper: on attaches module `id`, off detaches it.
ActionResult vacuum_set(SceneWorld world, GripperState& gripper, bool on, std::string_view id,
                        const geom::Pose& tool);

/// Joint-6 waypoints for a -2pi twist in four -pi/2 steps, starting at q.
/// Throws ExecutiveError{Precondition} unless the parallel gripper is closed,
/// and JointLimitError when joint 6 cannot travel the full turn.
std::vector<JointVector> unscrew_waypoints(const ArmModel& arm, const GripperState& gripper,
                                           const JointVector& q);

struct TaskRecord {
  std::string target;
  scene::ComponentCategory category = scene::ComponentCategory::Bolt;
  double execution_time = 0.0;  // simulated seconds
  double detection_score = 0.0;
  bool success = false;
  std::optional<std::string> failure_reason;
  double start_time = 0.0;
  double end_time = 0.0;
  int replans = 0;
};

struct TrajectoryLog {
  std::string target;
  std::string phase;
  planner::TimedTrajectory trajectory;
  std::vector<JointVector> path;  // geometric waypoints
};

struct RunOptions {
  planner::PlannerParams planner;
  int max_replans = 5;
  ActionCosts costs;
  JointVector home{};
  double hover = 0.02;
  double lift_small = 0.05;
  double lift_module = 0.3;
  double drop_height = 0.1;
  std::uint64_t seed = 0;
  bool keep_trajectories = true;
};

/// Tool-down home above the pack for the benchmark mounting.
JointVector default_home();

/// UR10 on the benchmark mounting point.
ArmModel benchmark_arm();

struct RunResult {
  std::vector<TaskRecord> records;
  SceneWorld final_world;
  GripperState final_gripper;
  int gripper_switches = 0;
  double sim_time = 0.0;
  std::vector<TrajectoryLog> trajectories;
  std::size_t initial_disassemblable = 0;
};

/// Stage-gated perceive / plan / manipulate / drop loop until nothing is left
/// to remove or every remaining target has been abandoned.
RunResult run_disassembly(const SceneWorld& world, const ArmModel& arm,
                          perception::Detector& detector, const RunOptions& options);

/// Header: target,category,execution_time_s,detection_score_pct,success
void write_metrics_csv(std::ostream& out, const std::vector<TaskRecord>& records);
void write_summary_json(std::ostream& out, const RunResult& result);

}  // namespace packsim::executive
