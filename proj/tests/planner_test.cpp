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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "packsim/benchmark.hpp"
#include "packsim/executive.hpp"
#include "packsim/planner.hpp"
#include "test_support.hpp"

using namespace packsim;
using namespace packsim::planner;
using kinematics::joint_distance;

namespace {

JointVector goal_config() {
  JointVector q = executive::default_home();
  q[0] += 0.9;
  q[1] += 0.3;
  q[2] -= 0.4;
  return q;
}

scene::SceneWorld world_with_box(const geom::Vec3& center, const geom::Vec3& size) {
  scene::SceneWorld w = benchmark_scene();
  scene::SceneComponent c;
  c.id = "block";
  c.category = scene::ComponentCategory::PackBase;
  c.pose.position = center;
  c.shape = scene::BoxShape{size};
  w.components.push_back(c);
  return w;
}

void expect_costs_consistent(const PlanTree& tree) {
  for (std::size_t i = 1; i < tree.size(); ++i) {
    const auto& n = tree.node(i);
    ASSERT_NE(n.parent, kNoParent);
    EXPECT_NEAR(n.d, tree.node(n.parent).d + joint_distance(n.q, tree.node(n.parent).q), 1e-9);
  }
}

}  // namespace

TEST(Steer, ThreeCases) {
  PlannerParams p;
  const JointVector a{};
  JointVector b{};
  b[0] = 0.01;
  EXPECT_FALSE(steer(b, a, p).has_value());
  b[0] = 0.3;
  EXPECT_EQ(*steer(b, a, p), b);
  b[0] = 3.0;
  b[1] = 4.0;
  const auto s = steer(b, a, p);
  ASSERT_TRUE(s.has_value());
  EXPECT_NEAR(joint_distance(*s, a), p.steer_max, 1e-12);
  EXPECT_NEAR((*s)[0] / (*s)[1], 0.75, 1e-12);
}

TEST(Sample, GoalFrequencyFollowsBias) {
  PlannerParams p;
  p.goal_bias = 0.2;
  const ArmModel arm = executive::benchmark_arm();
  const JointVector q_t = goal_config();
  Rng rng(5);
  int hits = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const JointVector s = sample(p, arm, q_t, rng);
    if (s == q_t) ++hits;
    EXPECT_TRUE(kinematics::within_limits(arm, s));
  }
  // Binomial sd ~ 0.0028.
  EXPECT_NEAR(double(hits) / n, 0.2, 0.015);
  p.goal_bias = 0.0;
  for (int i = 0; i < 1000; ++i) EXPECT_NE(sample(p, arm, q_t, rng), q_t);
}

TEST(PlanTree, NearestAndWithinMatchLinearScan) {
  gen::Rng rng(6);
  PlanTree tree(gen::random_joints(rng));
  for (int i = 0; i < 300; ++i) tree.insert(gen::random_joints(rng), i % (tree.size()));
  for (int t = 0; t < 200; ++t) {
    const JointVector q = gen::random_joints(rng);
    std::size_t best = 0;
    for (std::size_t i = 1; i < tree.size(); ++i) {
      if (joint_distance(tree.node(i).q, q) < joint_distance(tree.node(best).q, q)) best = i;
    }
    EXPECT_EQ(tree.nearest(q), best);
    const double r = 4.0 + 0.02 * t;
    std::vector<std::size_t> expect;
    for (std::size_t i = 0; i < tree.size(); ++i) {
      const auto& x = tree.node(i).q;
      double s = 0.0;
      for (int k = 0; k < 6; ++k) s += (x[k] - q[k]) * (x[k] - q[k]);
      if (s <= r * r) expect.push_back(i);
    }
    EXPECT_EQ(tree.within(q, r), expect);
  }
}

TEST(PlanTree, ReparentKeepsCostsAndRejectsCycles) {
  gen::Rng rng(7);
  PlanTree tree(JointVector{});
  for (int i = 0; i < 200; ++i) {
    tree.insert(gen::random_joints(rng), std::size_t(gen::uniform(rng, 0, double(tree.size()) - 1e-9)));
  }
  int moved = 0;
  for (int t = 0; t < 300; ++t) {
    const std::size_t n = 1 + std::size_t(gen::uniform(rng, 0, double(tree.size() - 1) - 1e-9));
    const std::size_t p = std::size_t(gen::uniform(rng, 0, double(tree.size()) - 1e-9));
    if (p == n || tree.is_ancestor(n, p)) {
      if (p != n) {
        EXPECT_THROW(tree.reparent(n, p), std::logic_error);
      }
      continue;
    }
    tree.reparent(n, p);
    ++moved;
    expect_costs_consistent(tree);
  }
  EXPECT_GT(moved, 100);
  EXPECT_TRUE(tree.is_ancestor(0, tree.size() - 1));
  const auto path = tree.path_to(tree.size() - 1);
  EXPECT_EQ(path.front(), JointVector{});
  EXPECT_EQ(path.back(), tree.node(tree.size() - 1).q);
}

TEST(Plan, FindsValidPathAroundPack) {
  const auto world = benchmark_scene();
  const ArmModel arm = executive::benchmark_arm();
  const JointVector q0 = executive::default_home();
  const JointVector qt = goal_config();
  ASSERT_TRUE(config_valid(world, arm, qt));
  PlannerParams p;
  int rewires = 0;
  const auto r = plan_to_configuration(world, arm, q0, qt, p, [&](const PlanTree& t, TreeEvent e) {
    if (e == TreeEvent::Rewired) ++rewires;
    expect_costs_consistent(t);
  });
  ASSERT_TRUE(r.ok()) << status_name(r.status);
  EXPECT_EQ(r.path.front(), q0);
  EXPECT_EQ(r.path.back(), qt);
  EXPECT_LE(r.iterations, p.i_max);
  for (std::size_t i = 1; i < r.path.size(); ++i) {
    // Ten times finer than the planner's own edge check.
    EXPECT_TRUE(edge_valid(world, arm, r.path[i - 1], r.path[i], p.edge_resolution / 10));
  }
}

TEST(Plan, PathAvoidsObstacleBetweenPoses) {
  // A block between the start and goal flange positions forces a detour.
  const ArmModel arm = executive::benchmark_arm();
  const JointVector q0 = executive::default_home();
  JointVector qt = q0;
  qt[0] += 1.4;
  const geom::Vec3 a = kinematics::forward_kinematics(arm, q0).position;
  const geom::Vec3 b = kinematics::forward_kinematics(arm, qt).position;
  const geom::Vec3 mid = 0.5 * (a + b);
  const auto world = world_with_box(mid, geom::Vec3(0.1, 0.1, 0.1));
  ASSERT_TRUE(config_valid(world, arm, q0));
  ASSERT_TRUE(config_valid(world, arm, qt));
  ASSERT_FALSE(edge_valid(world, arm, q0, qt, 0.05));
  PlannerParams p;
  const auto r = plan_to_configuration(world, arm, q0, qt, p);
  ASSERT_TRUE(r.ok()) << status_name(r.status);
  EXPECT_GT(r.path.size(), 2u);
  for (std::size_t i = 1; i < r.path.size(); ++i) {
    EXPECT_TRUE(edge_valid(world, arm, r.path[i - 1], r.path[i], p.edge_resolution / 10));
  }
}

TEST(Plan, StartEqualsGoal) {
  const auto r = plan_to_configuration(benchmark_scene(), executive::benchmark_arm(),
                                       executive::default_home(), executive::default_home(), {});
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.path.size(), 1u);
}

TEST(Plan, FailureStatuses) {
  const ArmModel arm = executive::benchmark_arm();
  const JointVector home = executive::default_home();
  const geom::Vec3 flange = kinematics::forward_kinematics(arm, home).position;
  const auto blocked = world_with_box(flange, geom::Vec3(0.2, 0.2, 0.2));
  EXPECT_EQ(plan_to_configuration(blocked, arm, home, goal_config(), {}).status, PlanStatus::InvalidStart);
  EXPECT_EQ(plan_to_configuration(blocked, arm, goal_config(), home, {}).status, PlanStatus::InvalidGoal);

  geom::Pose far;
  far.position = geom::Vec3(4.0, 0.0, 0.5);
  EXPECT_EQ(plan(benchmark_scene(), arm, home, far, {}).status, PlanStatus::UnreachableTarget);

  PlannerParams tiny;
  tiny.i_max = 3;
  tiny.goal_bias = 0.0;
  const auto r = plan_to_configuration(benchmark_scene(), arm, home, goal_config(), tiny);
  EXPECT_EQ(r.status, PlanStatus::IterationsExhausted);
  EXPECT_EQ(r.iterations, 3);
  EXPECT_TRUE(r.path.empty());
}

TEST(Plan, DeterministicForSeed) {
  const auto world = benchmark_scene();
  const ArmModel arm = executive::benchmark_arm();
  PlannerParams p;
  p.rng_seed = 42;
  const auto a = plan_to_configuration(world, arm, executive::default_home(), goal_config(), p);
  const auto b = plan_to_configuration(world, arm, executive::default_home(), goal_config(), p);
  EXPECT_EQ(a.path, b.path);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(Plan, PoseTargetReachesIkSolution) {
  const auto world = benchmark_scene();
  const ArmModel arm = executive::benchmark_arm();
  const auto target = kinematics::forward_kinematics(arm, goal_config());
  const auto r = plan(world, arm, executive::default_home(), target, {});
  ASSERT_TRUE(r.ok());
  const auto err = kinematics::pose_error(arm, r.path.back(), target);
  EXPECT_LT(err.position, 1e-4);
  EXPECT_LT(err.orientation, 1e-3);
}

TEST(Params, JsonRoundTripAndValidation) {
  PlannerParams p;
  p.i_max = 123;
  p.goal_bias = 0.35;
  p.rng_seed = 9;
  const auto back = params_from_json(params_to_json(p));
  EXPECT_EQ(back.i_max, 123);
  EXPECT_EQ(back.goal_bias, 0.35);
  EXPECT_EQ(back.rng_seed, 9u);
  EXPECT_EQ(params_from_json(Json::object()).steer_max, PlannerParams{}.steer_max);

  auto bad = [](auto edit) {
    PlannerParams q;
    edit(q);
    EXPECT_THROW(validate_params(q), std::invalid_argument);
  };
  bad([](PlannerParams& q) { q.i_max = -1; });
  bad([](PlannerParams& q) { q.goal_bias = 1.5; });
  bad([](PlannerParams& q) { q.steer_min = 0.6; });
  bad([](PlannerParams& q) { q.steer_min = 0.0; });
  bad([](PlannerParams& q) { q.neighbor_radius = -1.0; });
  bad([](PlannerParams& q) { q.edge_resolution = 0.0; });
  EXPECT_THROW(params_from_json(Json{{"goal_bias", -0.1}}), std::invalid_argument);
}
