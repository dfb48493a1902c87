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

#include "packsim/executive.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "packsim/json_io.hpp"

namespace packsim::executive {

using scene::ComponentCategory;
using scene::Mobility;
using scene::SceneError;
using scene::SceneErrc;

namespace {
constexpr double kPi = std::numbers::pi;
}

std::string_view gripper_name(GripperKind k) {
  return k == GripperKind::Parallel ? "parallel" : "vacuum";
}

GripperState GripperState::parallel() {
  GripperState g;
  g.kind = GripperKind::Parallel;
  g.status = GripperStatus::Open;
  g.tool_offset.position = geom::Vec3(0.0, 0.0, 0.16);
  g.body = {{geom::Vec3(0.0, 0.0, 0.0), geom::Vec3(0.0, 0.0, 0.10), 0.045}};
  return g;
}

GripperState GripperState::vacuum() {
  GripperState g;
  g.kind = GripperKind::Vacuum;
  g.status = GripperStatus::VacuumOff;
  g.tool_offset.position = geom::Vec3(0.0, 0.0, 0.12);
  g.body = {{geom::Vec3(0.0, 0.0, 0.0), geom::Vec3(0.0, 0.0, 0.06), 0.045}};
  return g;
}

GripperState switch_gripper(const GripperState& state, GripperKind kind) {
  if (state.holding) {
    throw ExecutiveError(ExecErrc::Busy, "cannot change tools while holding '" + *state.holding + "'");
  }
  if (state.kind == kind) return state;
  return kind == GripperKind::Parallel ? GripperState::parallel() : GripperState::vacuum();
}

double switch_cost(const GripperState& from, GripperKind to, const ActionCosts& costs) {
  return from.kind == to ? 0.0 : costs.tool_change;
}

ArmModel equipped_arm(const ArmModel& arm, const GripperState& gripper, const SceneWorld& world,
                      bool include_held) {
  ArmModel out = arm;
  for (const auto& c : gripper.body) out.link_capsules.push_back({kinematics::kDof, c.a, c.b, c.radius});
  if (!include_held) return out;
  for (const auto& comp : world.components) {
    if (comp.mobility != Mobility::AttachedToGripper || !comp.grip) continue;
    const geom::Pose in_flange = gripper.tool_offset * *comp.grip;
    const geom::Capsule cap = comp.covering_capsule();
    out.link_capsules.push_back(
        {kinematics::kDof, in_flange.apply(cap.a), in_flange.apply(cap.b), cap.radius});
  }
  return out;
}

geom::Pose tool_pose(const ArmModel& arm, const GripperState& gripper, const JointVector& q) {
  return kinematics::forward_kinematics(arm, q) * gripper.tool_offset;
}

geom::Pose flange_for_tool(const GripperState& gripper, const geom::Pose& tool) {
  return tool * gripper.tool_offset.inverse();
}

ActionResult parallel_set(SceneWorld world, GripperState& gripper, bool close, std::string_view id,
                          const geom::Pose& tool) {
  if (gripper.kind != GripperKind::Parallel) {
    throw ExecutiveError(ExecErrc::WrongGripper, "parallel gripper is not mounted");
  }
  if (close) {
    if (gripper.holding) throw ExecutiveError(ExecErrc::Busy, "gripper already holding a part");
    try {
      world = scene::attach(std::move(world), id, tool);
    } catch (const SceneError& e) {
      if (e.code() == SceneErrc::TooFar) throw ExecutiveError(ExecErrc::TooFar, e.what());
      throw;
    }
    gripper.status = GripperStatus::Closed;
    gripper.holding = std::string(id);
    return {std::move(world), false};
  }
  gripper.status = GripperStatus::Open;
  if (!gripper.holding) return {std::move(world), false};
  auto released = scene::detach(std::move(world), *gripper.holding);
  gripper.holding.reset();
  return {std::move(released.world), released.in_zone};
}

ActionResult vacuum_set(SceneWorld world, GripperState& gripper, bool on, std::string_view id,
                        const geom::Pose& tool) {
  if (gripper.kind != GripperKind::Vacuum) {
    throw ExecutiveError(ExecErrc::WrongGripper, "vacuum gripper is not mounted");
  }
  if (on) {
    if (gripper.holding) throw ExecutiveError(ExecErrc::Busy, "gripper already holding a part");
    try {
      world = scene::attach(std::move(world), id, tool);
    } catch (const SceneError& e) {
      if (e.code() == SceneErrc::TooFar) throw ExecutiveError(ExecErrc::TooFar, e.what());
      throw;
    }
    gripper.status = GripperStatus::VacuumOn;
    gripper.holding = std::string(id);
    return {std::move(world), false};
  }
  gripper.status = GripperStatus::VacuumOff;
  if (!gripper.holding) return {std::move(world), false};
  auto released = scene::detach(std::move(world), id.empty() ? *gripper.holding : std::string(id));
  gripper.holding.reset();
  return {std::move(released.world), released.in_zone};
}

std::vector<JointVector> unscrew_waypoints(const ArmModel& arm, const GripperState& gripper,
                                           const JointVector& q) {
  if (gripper.kind != GripperKind::Parallel || gripper.status != GripperStatus::Closed) {
    throw ExecutiveError(ExecErrc::Precondition, "twist needs the parallel gripper closed on a bolt");
  }
  constexpr int w = kinematics::kDof - 1;
  if (q[w] - 2.0 * kPi < arm.lower[w]) {
    throw kinematics::JointLimitError("joint 6 cannot turn a full revolution from here");
  }
  std::vector<JointVector> out{q};
  for (int k = 1; k <= 4; ++k) {
    JointVector next = q;
    next[w] = q[w] - k * (kPi / 2.0);
    out.push_back(next);
  }
  return out;
}

JointVector default_home() { return {kPi, -kPi / 2.0, kPi / 2.0, -kPi / 2.0, -kPi / 2.0, 0.0}; }

ArmModel benchmark_arm() {
  ArmModel arm = ArmModel::ur10();
  arm.base_pose.position = geom::Vec3(0.0, -0.6, 0.0);
  arm.base_pose.orientation = geom::Quat(Eigen::AngleAxisd(kPi / 2.0, geom::Vec3::UnitZ()));
  return arm;
}

namespace {

struct Target {
  perception::Detection det;
  geom::Vec3 point;
  std::string id;
};

struct TaskFailure {
  std::string reason;
};

class Runner {
 public:
  Runner(const SceneWorld& world, const ArmModel& arm, perception::Detector& detector,
         const RunOptions& opt)
      : arm_(arm), detector_(detector), opt_(opt), world_(world), gripper_(GripperState::parallel()),
        q_(opt.home), plan_rng_(opt.seed), detect_rng_(opt.seed ^ 0x9e3779b97f4a7c15ULL) {
    planner::validate_params(opt.planner);
    if (opt.max_replans < 0) throw std::invalid_argument("max_replans must be >= 0");
    const ArmModel home_arm = equipped_arm(arm_, gripper_, world_);
    if (!planner::config_valid(world_, home_arm, q_)) {
      throw std::invalid_argument("home configuration is not collision free");
    }
    down_ = tool_pose(arm_, gripper_, q_).orientation;
  }

  RunResult run() {
    result_.initial_disassemblable = scene::remaining_disassemblable(world_);
    while (true) {
      auto targets = perceive();
      std::vector<perception::Detection> dets;
      for (const auto& t : targets) dets.push_back(t.det);
      const auto decision = perception::stage_and_target(dets);
      if (decision.flag == perception::StageFlag::Done) break;

      const ComponentCategory want = decision.target->category;
      const Target* target = nullptr;
      for (const auto& t : targets) {
        if (t.det.category == want) {
          target = &t;
          break;
        }
      }

      TaskRecord rec;
      rec.target = target->id;
      rec.category = want;
      rec.detection_score = target->det.score;
      rec.start_time = clock_;
      task_ = target->id;
      try {
        if (decision.flag == perception::StageFlag::Modules && gripper_.kind != GripperKind::Vacuum) {
          change_tool(GripperKind::Vacuum, rec);
        }
        execute(*target, rec);
        rec.success = true;
      } catch (const TaskFailure& f) {
        rec.success = false;
        rec.failure_reason = f.reason;
        abandoned_.insert(target->id);
      }
      rec.end_time = clock_;
      rec.execution_time = rec.end_time - rec.start_time;
      result_.records.push_back(rec);
    }
    result_.final_world = world_;
    result_.final_gripper = gripper_;
    result_.sim_time = clock_;
    return std::move(result_);
  }

 private:
  std::vector<Target> perceive() {
    const auto dets = detector_.detect(world_, world_.camera, detect_rng_);
    const auto depth = perception::render_depth(world_, world_.camera);
    std::vector<Target> out;
    for (const auto& d : dets) {
      geom::Vec3 p;
      try {
        p = perception::pixel_to_world(world_.camera, d.u, d.v, depth);
      } catch (const perception::NoDepthError&) {
        continue;
      }
      const auto id = scene::nearest_graspable(world_, d.category, p);
      if (!id || abandoned_.count(*id)) continue;
      out.push_back({d, p, *id});
    }
    return out;
  }

  ArmModel model(bool include_held) const { return equipped_arm(arm_, gripper_, world_, include_held); }

  void log(const std::string& phase, std::vector<JointVector> path, const ArmModel& model) {
    auto traj = planner::time_parameterize(path, model.velocity_limits, model.acceleration_limits);
    clock_ += traj.duration();
    if (opt_.keep_trajectories) {
      result_.trajectories.push_back({task_, phase, std::move(traj), std::move(path)});
    }
  }

  void arrive(const JointVector& q) {
    q_ = q;
    world_ = scene::carry(std::move(world_), tool_pose(arm_, gripper_, q_));
  }

  // Valid IK solution for a tool pose, trying several seeds.
  std::optional<JointVector> solve(const geom::Pose& tool, const ArmModel& m,
                                   const std::vector<JointVector>& seeds) {
    const geom::Pose flange = flange_for_tool(gripper_, tool);
    for (std::size_t attempt = 0; attempt < seeds.size() + 4; ++attempt) {
      kinematics::IkOptions ik;
      const JointVector& seed = seeds[std::min(attempt, seeds.size() - 1)];
      if (attempt >= seeds.size()) ik.restart_seed = plan_rng_();
      const auto q = kinematics::inverse_kinematics(m, flange, seed, ik);
      if (q && planner::config_valid(world_, m, *q)) return q;
    }
    return std::nullopt;
  }

  // Sampling-based move with fresh seeds on failure.
  void plan_move(const JointVector& goal, const std::string& phase, bool include_held,
                 TaskRecord& rec) {
    const ArmModel m = model(include_held);
    planner::PlannerParams params = opt_.planner;
    for (int attempt = 0; attempt <= opt_.max_replans; ++attempt) {
      params.rng_seed = plan_rng_();
      const auto res = planner::plan_to_configuration(world_, m, q_, goal, params);
      if (res.ok()) {
        log(phase, res.path, m);
        arrive(goal);
        return;
      }
      if (res.status == planner::PlanStatus::InvalidStart ||
          res.status == planner::PlanStatus::InvalidGoal) {
        throw TaskFailure{"planning-failure"};
      }
      ++rec.replans;
    }
    throw TaskFailure{"planning-failure"};
  }

  // Straight joint-space segment(s), edge-checked.
  void straight_move(std::vector<JointVector> path, const std::string& phase, bool include_held) {
    const ArmModel m = model(include_held);
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
      if (!planner::edge_valid(world_, m, path[k], path[k + 1], opt_.planner.edge_resolution)) {
        throw TaskFailure{phase + "-blocked"};
      }
    }
    const JointVector end = path.back();
    log(phase, std::move(path), m);
    arrive(end);
  }

  void change_tool(GripperKind kind, TaskRecord& rec) {
    if (q_ != opt_.home) plan_move(opt_.home, "home", false, rec);
    clock_ += switch_cost(gripper_, kind, opt_.costs);
    gripper_ = switch_gripper(gripper_, kind);
    ++result_.gripper_switches;
  }

  void grasp(const std::string& id) {
    const geom::Pose tool = tool_pose(arm_, gripper_, q_);
    try {
      if (gripper_.kind == GripperKind::Vacuum) {
        world_ = vacuum_set(world_, gripper_, true, id, tool).world;
        clock_ += opt_.costs.vacuum;
      } else {
        world_ = parallel_set(world_, gripper_, true, id, tool).world;
        clock_ += opt_.costs.grasp;
      }
    } catch (const ExecutiveError&) {
      throw TaskFailure{"grasp-failure"};
    } catch (const SceneError&) {
      throw TaskFailure{"grasp-failure"};
    }
  }

  bool release() {
    const geom::Pose tool = tool_pose(arm_, gripper_, q_);
    const std::string id = gripper_.holding.value_or("");
    if (gripper_.kind == GripperKind::Vacuum) {
      auto r = vacuum_set(std::move(world_), gripper_, false, id, tool);
      world_ = std::move(r.world);
      clock_ += opt_.costs.vacuum;
      return r.in_zone;
    }
    auto r = parallel_set(std::move(world_), gripper_, false, id, tool);
    world_ = std::move(r.world);
    clock_ += opt_.costs.grasp;
    return r.in_zone;
  }

  void execute(const Target& t, TaskRecord& rec) {
    try {
      world_ = scene::make_movable(world_, t.id);
    } catch (const SceneError& e) {
      throw TaskFailure{e.code() == SceneErrc::Precedence ? "precedence" : "wrong-state"};
    }

    // Approach: hover above the perceived point, tool pointing down.
    geom::Pose hover;
    hover.orientation = down_;
    hover.position = t.point + geom::Vec3(0.0, 0.0, opt_.hover);
    const ArmModel free_arm = model(false);
    auto q_hover = solve(hover, free_arm, {q_, opt_.home});
    if (!q_hover) throw TaskFailure{"unreachable"};
    if (t.det.category == ComponentCategory::Bolt) {
      // Bolts are symmetric about the tool axis; start the wrist mid-range so
      // the full unscrewing turn stays inside the joint limits.
      JointVector q = *q_hover;
      q[kinematics::kDof - 1] = kPi;
      if (!planner::config_valid(world_, free_arm, q)) throw TaskFailure{"unreachable"};
      q_hover = q;
    }
    plan_move(*q_hover, "approach", false, rec);

    geom::Pose contact = tool_pose(arm_, gripper_, q_);
    contact.position.z() -= opt_.hover;
    const auto q_contact = kinematics::inverse_kinematics(free_arm, flange_for_tool(gripper_, contact), q_);
    if (!q_contact) throw TaskFailure{"unreachable"};
    straight_move({q_, *q_contact}, "descend", false);
    grasp(t.id);

    try {
      if (t.det.category == ComponentCategory::Bolt) {
        straight_move(unscrew_waypoints(arm_, gripper_, q_), "twist", false);
        clock_ += opt_.costs.twist;
      }

      geom::Pose lifted = tool_pose(arm_, gripper_, q_);
      lifted.position.z() +=
          t.det.category == ComponentCategory::Module ? opt_.lift_module : opt_.lift_small;
      const auto q_lift = kinematics::inverse_kinematics(model(false), flange_for_tool(gripper_, lifted), q_);
      if (!q_lift) throw TaskFailure{"lift-unreachable"};
      straight_move({q_, *q_lift}, "lift", false);

      const auto zone = world_.drop_zones.find(t.det.category);
      if (zone == world_.drop_zones.end()) throw TaskFailure{"no-drop-zone"};
      geom::Pose drop;
      drop.orientation = down_;
      drop.position = zone->second.pose.position + geom::Vec3(0.0, 0.0, opt_.drop_height);
      const ArmModel loaded = model(true);
      const auto q_drop = solve(drop, loaded, {q_, opt_.home});
      if (!q_drop) throw TaskFailure{"drop-unreachable"};
      plan_move(*q_drop, "transfer", true, rec);
    } catch (const TaskFailure&) {
      release();
      throw;
    } catch (const kinematics::JointLimitError&) {
      release();
      throw TaskFailure{"joint-limit"};
    }

    if (!release()) throw TaskFailure{"outside-drop-zone"};
  }

  const ArmModel& arm_;
  perception::Detector& detector_;
  const RunOptions& opt_;
  SceneWorld world_;
  GripperState gripper_;
  JointVector q_;
  planner::Rng plan_rng_;
  perception::Rng detect_rng_;
  geom::Quat down_;
  double clock_ = 0.0;
  std::set<std::string> abandoned_;
  std::string task_;
  RunResult result_;
};

}  // namespace

RunResult run_disassembly(const SceneWorld& world, const ArmModel& arm,
                          perception::Detector& detector, const RunOptions& options) {
  scene::validate(world);
  kinematics::validate_arm(arm);
  return Runner(world, arm, detector, options).run();
}

void write_metrics_csv(std::ostream& out, const std::vector<TaskRecord>& records) {
  out << "target,category,execution_time_s,detection_score_pct,success\n";
  char buf[64];
  for (const auto& r : records) {
    out << r.target << ',' << scene::category_name(r.category) << ',';
    std::snprintf(buf, sizeof buf, "%.3f,%.1f,", r.execution_time, r.detection_score * 100.0);
    out << buf << (r.success ? "Yes" : "No") << '\n';
  }
}

void write_summary_json(std::ostream& out, const RunResult& result) {
  Json tasks = Json::array();
  std::size_t ok = 0;
  for (const auto& r : result.records) {
    ok += r.success ? 1 : 0;
    Json t{{"target", r.target},
           {"category", scene::category_name(r.category)},
           {"execution_time_s", r.execution_time},
           {"detection_score", r.detection_score},
           {"success", r.success},
           {"start_s", r.start_time},
           {"end_s", r.end_time},
           {"replans", r.replans}};
    if (r.failure_reason) t["failure_reason"] = *r.failure_reason;
    tasks.push_back(std::move(t));
  }
  const Json doc{{"tasks", tasks},
                 {"task_count", result.records.size()},
                 {"succeeded", ok},
                 {"initial_disassemblable", result.initial_disassemblable},
                 {"remaining_disassemblable", scene::remaining_disassemblable(result.final_world)},
                 {"gripper_switches", result.gripper_switches},
                 {"sim_time_s", result.sim_time}};
  out << doc.dump(2) << '\n';
}

}  // namespace packsim::executive
