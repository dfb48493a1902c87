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

#include <ostream>
#include <span>
#include <vector>

#include "packsim/kinematics.hpp"

namespace packsim::planner {

using kinematics::JointVector;

struct TrajectoryKnot {
  double t = 0.0;
  JointVector q{};
  JointVector qd{};
  JointVector qdd{};
};

struct TrajectoryState {
  JointVector q{};
  JointVector qd{};
  JointVector qdd{};
};

/// Piecewise-cubic joint trajectory; each segment is the Hermite cubic defined
/// by the position and velocity at its two knots.
struct TimedTrajectory {
  std::vector<TrajectoryKnot> knots;

  double duration() const { return knots.empty() ? 0.0 : knots.back().t; }
  TrajectoryState sample(double t) const;
  /// State at fraction `s` in [0, 1] of segment `k`.
  TrajectoryState sample_segment(std::size_t k, double s) const;
};

struct TimeParameterizationOptions {
  double scale_factor = 1.1;
  int samples_per_segment = 100;
  int max_rounds = 2000;
  double min_segment_duration = 1e-3;
};

/// Clamped cubic spline through `path` (zero velocity at both ends). Segment
/// durations start at the largest per-joint displacement over its velocity
/// limit and are scaled uniformly by `scale_factor` until velocity and
/// acceleration limits hold at every knot and sampled interior point.
/// Throws std::invalid_argument on an empty path.
TimedTrajectory time_parameterize(std::span<const JointVector> path, const JointVector& vmax,
                                  const JointVector& amax,
                                  const TimeParameterizationOptions& options = {});

/// Largest |qd|/vmax and |qdd|/amax over knots and `samples_per_segment`
/// interior points per segment.
struct LimitUsage {
  double velocity = 0.0;
  double acceleration = 0.0;
};
LimitUsage limit_usage(const TimedTrajectory& traj, const JointVector& vmax,
                       const JointVector& amax, int samples_per_segment = 100);

/// Header: t,q1..q6,qd1..qd6,qdd1..qdd6
void write_trajectory_csv(std::ostream& out, const TimedTrajectory& traj);

}  // namespace packsim::planner
