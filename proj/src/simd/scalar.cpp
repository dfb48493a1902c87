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

#include <cmath>
#include <limits>

#include "packsim/simd/kernels.hpp"

namespace packsim::simd::scalar {

namespace {
// Mirror the operand-selection rules of minpd/maxpd.
inline double min_sel(double a, double b) { return a < b ? a : b; }
inline double max_sel(double a, double b) { return a > b ? a : b; }

inline double dist_sq_at(const JointColumns& cols, const std::array<double, 6>& q,
                         std::size_t i) {
  double s = 0.0;
  for (int j = 0; j < 6; ++j) {
    const double d = cols.col[j][i] - q[j];
    s = s + d * d;
  }
  return s;
}

inline std::uint8_t clamp_u8(double v) {
  v = max_sel(v, 0.0);
  v = min_sel(v, 255.0);
  return static_cast<std::uint8_t>(v);
}
}  // namespace

Nearest nearest(const JointColumns& cols, const std::array<double, 6>& q) {
  Nearest best{0, std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < cols.count; ++i) {
    const double s = dist_sq_at(cols, q, i);
    if (s < best.dist_sq) best = {i, s};
  }
  return best;
}

void within_radius(const JointColumns& cols, const std::array<double, 6>& q, double radius_sq,
                   std::vector<std::size_t>& out) {
  for (std::size_t i = 0; i < cols.count; ++i) {
    if (dist_sq_at(cols, q, i) <= radius_sq) out.push_back(i);
  }
}

void ray_box_min(const std::array<double, 3>& origin, const RayBatch& rays,
                 const std::array<double, 3>& half_extents, double* depth, std::int32_t* ids,
                 std::int32_t id) {
  const double lo[3] = {-half_extents[0] - origin[0], -half_extents[1] - origin[1],
                        -half_extents[2] - origin[2]};
  const double hi[3] = {half_extents[0] - origin[0], half_extents[1] - origin[1],
                        half_extents[2] - origin[2]};
  const double* dir[3] = {rays.dx, rays.dy, rays.dz};
  for (std::size_t i = 0; i < rays.count; ++i) {
    double t_near = -std::numeric_limits<double>::infinity();
    double t_far = std::numeric_limits<double>::infinity();
    for (int a = 0; a < 3; ++a) {
      const double t1 = lo[a] / dir[a][i];
      const double t2 = hi[a] / dir[a][i];
      t_near = max_sel(t_near, min_sel(t1, t2));
      t_far = min_sel(t_far, max_sel(t1, t2));
    }
    const double t = max_sel(t_near, 0.0);
    if (t_near <= t_far && t_far >= 0.0 && t < depth[i]) {
      depth[i] = t;
      ids[i] = id;
    }
  }
}

void affine_u8(std::uint8_t* data, std::size_t n, double pivot, double scale, double bias) {
  for (std::size_t i = 0; i < n; ++i) {
    const double v = (static_cast<double>(data[i]) - pivot) * scale + bias;
    data[i] = clamp_u8(std::nearbyint(v));
  }
}

void add_clamp_u8(std::uint8_t* data, const double* offsets, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    data[i] = clamp_u8(std::nearbyint(static_cast<double>(data[i]) + offsets[i]));
  }
}

}  // namespace packsim::simd::scalar
