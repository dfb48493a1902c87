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

#include "packsim/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace packsim::planner {

namespace {

using kinematics::kDof;

struct Cubic {
  double c0, c1, c2, c3;
};

Cubic hermite(double q0, double q1, double v0, double v1, double h) {
  const double delta = q1 - q0;
  return {q0, v0, (3.0 * delta / h - 2.0 * v0 - v1) / h, (-2.0 * delta / h + v0 + v1) / (h * h)};
}

// Knot velocities of the clamped cubic spline (zero end velocities) for a
// single joint, via the tridiagonal C2-continuity system.
std::vector<double> spline_velocities(const std::vector<double>& q, const std::vector<double>& h) {
  const std::size_t n = q.size();
  std::vector<double> v(n, 0.0);
  if (n < 3) return v;
  const std::size_t m = n - 2;
  std::vector<double> lower(m), diag(m), upper(m), rhs(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t k = i + 1;
    const double hl = h[k - 1];
    const double hr = h[k];
    lower[i] = 1.0 / hl;
    upper[i] = 1.0 / hr;
    diag[i] = 2.0 * (1.0 / hl + 1.0 / hr);
    rhs[i] = 3.0 * ((q[k] - q[k - 1]) / (hl * hl) + (q[k + 1] - q[k]) / (hr * hr));
  }
  for (std::size_t i = 1; i < m; ++i) {
    const double w = lower[i] / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  v[m] = rhs[m - 1] / diag[m - 1];
  for (std::size_t i = m - 1; i-- > 0;) v[i + 1] = (rhs[i] - upper[i] * v[i + 2]) / diag[i];
  return v;
}

TimedTrajectory build(std::span<const JointVector> path, const std::vector<double>& h) {
  const std::size_t n = path.size();
  TimedTrajectory traj;
  traj.knots.resize(n);
  double t = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    traj.knots[k].t = t;
    traj.knots[k].q = path[k];
    if (k + 1 < n) t += h[k];
  }
  std::vector<double> qj(n);
  for (int j = 0; j < kDof; ++j) {
    for (std::size_t k = 0; k < n; ++k) qj[k] = path[k][j];
    const auto v = spline_velocities(qj, h);
    for (std::size_t k = 0; k < n; ++k) traj.knots[k].qd[j] = v[k];
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const Cubic c = hermite(qj[k], qj[k + 1], v[k], v[k + 1], h[k]);
      traj.knots[k].qdd[j] = 2.0 * c.c2;
      if (k + 2 == n) traj.knots[k + 1].qdd[j] = 2.0 * c.c2 + 6.0 * c.c3 * h[k];
    }
  }
  return traj;
}

// Peak |qd| of a cubic segment: endpoints and the vertex of the quadratic.
double peak_velocity(const Cubic& c, double h) {
  double peak = std::max(std::abs(c.c1), std::abs(c.c1 + 2.0 * c.c2 * h + 3.0 * c.c3 * h * h));
  if (c.c3 != 0.0) {
    const double s = -c.c2 / (3.0 * c.c3);
    if (s > 0.0 && s < h) peak = std::max(peak, std::abs(c.c1 + 2.0 * c.c2 * s + 3.0 * c.c3 * s * s));
  }
  return peak;
}

bool within_limits(const TimedTrajectory& traj, const JointVector& vmax, const JointVector& amax,
                   int samples) {
  const LimitUsage usage = limit_usage(traj, vmax, amax, samples);
  if (usage.velocity > 1.0 || usage.acceleration > 1.0) return false;
  for (std::size_t k = 0; k + 1 < traj.knots.size(); ++k) {
    const auto& a = traj.knots[k];
    const auto& b = traj.knots[k + 1];
    const double h = b.t - a.t;
    for (int j = 0; j < kDof; ++j) {
      const Cubic c = hermite(a.q[j], b.q[j], a.qd[j], b.qd[j], h);
      if (peak_velocity(c, h) > vmax[j]) return false;
      // Acceleration is linear within a segment, so its ends bound it.
      if (std::abs(2.0 * c.c2) > amax[j] || std::abs(2.0 * c.c2 + 6.0 * c.c3 * h) > amax[j]) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace

TrajectoryState TimedTrajectory::sample_segment(std::size_t k, double s) const {
  const auto& a = knots[k];
  const auto& b = knots[k + 1];
  const double h = b.t - a.t;
  const double tau = s * h;
  TrajectoryState out;
  for (int j = 0; j < kDof; ++j) {
    const Cubic c = hermite(a.q[j], b.q[j], a.qd[j], b.qd[j], h);
    out.q[j] = c.c0 + tau * (c.c1 + tau * (c.c2 + tau * c.c3));
    out.qd[j] = c.c1 + tau * (2.0 * c.c2 + tau * 3.0 * c.c3);
    out.qdd[j] = 2.0 * c.c2 + 6.0 * c.c3 * tau;
  }
  return out;
}

TrajectoryState TimedTrajectory::sample(double t) const {
  if (knots.empty()) throw std::logic_error("sampling an empty trajectory");
  if (knots.size() == 1 || t <= knots.front().t) {
    const auto& k = knots.front();
    return {k.q, k.qd, k.qdd};
  }
  if (t >= knots.back().t) {
    const auto& k = knots.back();
    return {k.q, k.qd, k.qdd};
  }
  const auto it = std::upper_bound(knots.begin(), knots.end(), t,
                                   [](double v, const TrajectoryKnot& k) { return v < k.t; });
  const std::size_t seg = static_cast<std::size_t>(it - knots.begin()) - 1;
  const double h = knots[seg + 1].t - knots[seg].t;
  return sample_segment(seg, (t - knots[seg].t) / h);
}

LimitUsage limit_usage(const TimedTrajectory& traj, const JointVector& vmax,
                       const JointVector& amax, int samples_per_segment) {
  LimitUsage usage;
  auto visit = [&](const JointVector& qd, const JointVector& qdd) {
    for (int j = 0; j < kDof; ++j) {
      usage.velocity = std::max(usage.velocity, std::abs(qd[j]) / vmax[j]);
      usage.acceleration = std::max(usage.acceleration, std::abs(qdd[j]) / amax[j]);
    }
  };
  for (const auto& k : traj.knots) visit(k.qd, k.qdd);
  for (std::size_t k = 0; k + 1 < traj.knots.size(); ++k) {
    for (int i = 1; i <= samples_per_segment; ++i) {
      const double s = static_cast<double>(i) / (samples_per_segment + 1);
      const TrajectoryState st = traj.sample_segment(k, s);
      visit(st.qd, st.qdd);
    }
  }
  return usage;
}

TimedTrajectory time_parameterize(std::span<const JointVector> path, const JointVector& vmax,
                                  const JointVector& amax,
                                  const TimeParameterizationOptions& options) {
  if (path.empty()) throw std::invalid_argument("cannot time-parameterize an empty path");
  if (path.size() == 1) {
    TimedTrajectory traj;
    traj.knots.push_back({0.0, path.front(), {}, {}});
    return traj;
  }

  std::vector<double> h(path.size() - 1);
  for (std::size_t k = 0; k + 1 < path.size(); ++k) {
    double longest = 0.0;
    for (int j = 0; j < kDof; ++j) {
      longest = std::max(longest, std::abs(path[k + 1][j] - path[k][j]) / vmax[j]);
    }
    h[k] = std::max(longest, options.min_segment_duration);
  }

  TimedTrajectory traj = build(path, h);
  for (int round = 0; round < options.max_rounds; ++round) {
    if (within_limits(traj, vmax, amax, options.samples_per_segment)) return traj;
    for (double& d : h) d *= options.scale_factor;
    traj = build(path, h);
  }
  throw std::runtime_error("time parameterization did not converge");
}

void write_trajectory_csv(std::ostream& out, const TimedTrajectory& traj) {
  out << "t";
  for (const char* prefix : {"q", "qd", "qdd"}) {
    for (int j = 1; j <= kDof; ++j) out << ',' << prefix << j;
  }
  out << '\n';
  char buf[32];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.9f", v);
    out << buf;
  };
  for (const auto& k : traj.knots) {
    put(k.t);
    for (const auto* row : {&k.q, &k.qd, &k.qdd}) {
      for (double v : *row) {
        out << ',';
        put(v);
      }
    }
    out << '\n';
  }
}

}  // namespace packsim::planner
