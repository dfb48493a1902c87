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

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "packsim/trajectory.hpp"
#include "test_support.hpp"

using namespace packsim;
using namespace packsim::planner;

namespace {

const JointVector kVmax{2, 2, 2, 2, 2, 2};
const JointVector kAmax{4, 4, 4, 4, 4, 4};

std::vector<JointVector> random_path(gen::Rng& rng, int n) {
  std::vector<JointVector> path{gen::random_joints(rng, -2.0, 2.0)};
  for (int i = 1; i < n; ++i) {
    JointVector q = path.back();
    for (double& v : q) v += gen::uniform(rng, -0.5, 0.5);
    path.push_back(q);
  }
  return path;
}

// Clamped spline from the full 4-coefficients-per-segment linear system.
std::vector<double> oracle_knot_velocities(const std::vector<double>& t, const std::vector<double>& y) {
  const int m = int(t.size()) - 1;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(4 * m, 4 * m);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(4 * m);
  int row = 0;
  // Segment k: y = c0 + c1 s + c2 s^2 + c3 s^3 with s = time since knot k.
  for (int k = 0; k < m; ++k) {
    const double h = t[k + 1] - t[k];
    a(row, 4 * k) = 1;
    b(row++) = y[k];
    a(row, 4 * k) = 1;
    a(row, 4 * k + 1) = h;
    a(row, 4 * k + 2) = h * h;
    a(row, 4 * k + 3) = h * h * h;
    b(row++) = y[k + 1];
    if (k + 1 < m) {
      a(row, 4 * k + 1) = 1;
      a(row, 4 * k + 2) = 2 * h;
      a(row, 4 * k + 3) = 3 * h * h;
      a(row, 4 * (k + 1) + 1) = -1;
      ++row;
      a(row, 4 * k + 2) = 2;
      a(row, 4 * k + 3) = 6 * h;
      a(row, 4 * (k + 1) + 2) = -2;
      ++row;
    }
  }
  a(row++, 1) = 1;
  const double h = t[m] - t[m - 1];
  a(row, 4 * (m - 1) + 1) = 1;
  a(row, 4 * (m - 1) + 2) = 2 * h;
  a(row, 4 * (m - 1) + 3) = 3 * h * h;
  const Eigen::VectorXd c = a.fullPivLu().solve(b);
  std::vector<double> v;
  for (int k = 0; k < m; ++k) v.push_back(c(4 * k + 1));
  v.push_back(0.0);
  return v;
}

}  // namespace

TEST(Trajectory, KnotVelocitiesMatchDenseSolve) {
  gen::Rng rng(21);
  for (int trial = 0; trial < 50; ++trial) {
    const auto path = random_path(rng, 2 + trial % 9);
    const auto traj = time_parameterize(path, kVmax, kAmax);
    std::vector<double> t;
    for (const auto& k : traj.knots) t.push_back(k.t);
    for (int j = 0; j < 6; ++j) {
      std::vector<double> y;
      for (const auto& k : traj.knots) y.push_back(k.q[j]);
      const auto v = oracle_knot_velocities(t, y);
      for (std::size_t i = 0; i < v.size(); ++i) EXPECT_NEAR(traj.knots[i].qd[j], v[i], 1e-8);
    }
  }
}

TEST(Trajectory, LimitsHoldOnDenseSampling) {
  gen::Rng rng(22);
  for (int trial = 0; trial < 100; ++trial) {
    const auto path = random_path(rng, 2 + trial % 12);
    const auto traj = time_parameterize(path, kVmax, kAmax);
    const double dt = traj.duration() / 5000;
    for (int i = 0; i <= 5000; ++i) {
      const auto s = traj.sample(i * dt);
      for (int j = 0; j < 6; ++j) {
        EXPECT_LE(std::abs(s.qd[j]), kVmax[j] + 1e-9);
        EXPECT_LE(std::abs(s.qdd[j]), kAmax[j] + 1e-9);
      }
    }
    const auto use = limit_usage(traj, kVmax, kAmax);
    EXPECT_LE(use.velocity, 1.0);
    EXPECT_LE(use.acceleration, 1.0);
  }
}

TEST(Trajectory, EndpointsTimesAndContinuity) {
  gen::Rng rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    const auto path = random_path(rng, 3 + trial % 7);
    const auto traj = time_parameterize(path, kVmax, kAmax);
    ASSERT_EQ(traj.knots.size(), path.size());
    EXPECT_EQ(traj.knots.front().t, 0.0);
    for (std::size_t i = 0; i < path.size(); ++i) EXPECT_EQ(traj.knots[i].q, path[i]);
    for (std::size_t i = 1; i < traj.knots.size(); ++i) EXPECT_GT(traj.knots[i].t, traj.knots[i - 1].t);
    for (int j = 0; j < 6; ++j) {
      EXPECT_EQ(traj.knots.front().qd[j], 0.0);
      EXPECT_EQ(traj.knots.back().qd[j], 0.0);
    }
    EXPECT_EQ(traj.sample(traj.duration()).q, path.back());
    EXPECT_EQ(traj.sample(0.0).q, path.front());
    for (std::size_t k = 0; k + 2 < traj.knots.size(); ++k) {
      const auto left = traj.sample_segment(k, 1.0);
      const auto right = traj.sample_segment(k + 1, 0.0);
      for (int j = 0; j < 6; ++j) {
        EXPECT_NEAR(left.q[j], right.q[j], 1e-12);
        EXPECT_NEAR(left.qd[j], right.qd[j], 1e-9);
        EXPECT_NEAR(left.qdd[j], right.qdd[j], 1e-7);
      }
    }
  }
}

TEST(Trajectory, ScalingIsNotWasteful) {
  // Shrinking every segment by one more scale step would break a limit.
  gen::Rng rng(24);
  for (int trial = 0; trial < 20; ++trial) {
    const auto path = random_path(rng, 5);
    const auto traj = time_parameterize(path, kVmax, kAmax);
    const auto use = limit_usage(traj, kVmax, kAmax);
    EXPECT_GT(std::max(use.velocity, use.acceleration), 1.0 / (1.1 * 1.1 * 1.1));
  }
}

TEST(Trajectory, SingleWaypointAndEmpty) {
  const std::vector<JointVector> one{JointVector{0.1, 0.2, 0.3, 0.4, 0.5, 0.6}};
  const auto traj = time_parameterize(one, kVmax, kAmax);
  ASSERT_EQ(traj.knots.size(), 1u);
  EXPECT_EQ(traj.duration(), 0.0);
  EXPECT_EQ(traj.sample(1.0).q, one[0]);
  EXPECT_THROW(time_parameterize(std::vector<JointVector>{}, kVmax, kAmax), std::invalid_argument);
}

TEST(Trajectory, CsvLayout) {
  gen::Rng rng(25);
  const auto traj = time_parameterize(random_path(rng, 3), kVmax, kAmax);
  std::ostringstream out;
  write_trajectory_csv(out, traj);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line.rfind("t,q1,q2,q3,q4,q5,q6,qd1,", 0), 0u);
  EXPECT_EQ(std::count(line.begin(), line.end(), ','), 18);
  int rows = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 18);
    ++rows;
  }
  EXPECT_GE(rows, 3);
}
