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

// Data-parallel inner loops used by the planner (nearest-neighbour scans),
// the depth renderer (ray/slab tests) and the imaging pixel operations.
//
// Every kernel has a scalar reference in `scalar::` and, where the target
// supports it, a vectorized twin in `avx2::`. The dispatching entry points in
// this namespace pick the variant selected at runtime. Both variants are
// required to produce bit-identical output; tests/simd_test.cpp enforces it.

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace packsim::simd {

enum class Isa { Scalar, Avx2 };

std::string_view isa_name(Isa isa);

/// Best instruction set this CPU and build support.
Isa detected_isa();

/// Variant used by the dispatching entry points. Initialized from
/// `detected_isa()`, overridable with PACKSIM_SIMD=scalar|avx2.
Isa active_isa();

/// Throws std::invalid_argument if `isa` is not supported here.
void set_active_isa(Isa isa);

bool isa_supported(Isa isa);

/// Structure-of-arrays view over `count` joint configurations.
struct JointColumns {
  std::array<const double*, 6> col{};
  std::size_t count = 0;
};

struct Nearest {
  std::size_t index = 0;
  double dist_sq = 0.0;
};

/// Argmin of squared Euclidean distance; ties go to the lowest index.
/// `cols.count` must be nonzero.
Nearest nearest(const JointColumns& cols, const std::array<double, 6>& q);

/// Appends, in ascending order, every index whose squared distance is <= radius_sq.
void within_radius(const JointColumns& cols, const std::array<double, 6>& q, double radius_sq,
                   std::vector<std::size_t>& out);

/// Slab test of rays (shared origin, per-ray direction) against an axis-aligned
/// box centered at the origin. Where a ray enters the box at t < depth[i],
/// depth[i] = t and ids[i] = id.
struct RayBatch {
  const double* dx = nullptr;
  const double* dy = nullptr;
  const double* dz = nullptr;
  std::size_t count = 0;
};
void ray_box_min(const std::array<double, 3>& origin, const RayBatch& rays,
                 const std::array<double, 3>& half_extents, double* depth, std::int32_t* ids,
                 std::int32_t id);

/// data[i] = clamp(rint((data[i] - pivot) * scale + bias), 0, 255).
void affine_u8(std::uint8_t* data, std::size_t n, double pivot, double scale, double bias);

/// data[i] = clamp(rint(data[i] + offsets[i]), 0, 255).
void add_clamp_u8(std::uint8_t* data, const double* offsets, std::size_t n);

namespace scalar {
Nearest nearest(const JointColumns& cols, const std::array<double, 6>& q);
void within_radius(const JointColumns& cols, const std::array<double, 6>& q, double radius_sq,
                   std::vector<std::size_t>& out);
void ray_box_min(const std::array<double, 3>& origin, const RayBatch& rays,
                 const std::array<double, 3>& half_extents, double* depth, std::int32_t* ids,
                 std::int32_t id);
void affine_u8(std::uint8_t* data, std::size_t n, double pivot, double scale, double bias);
void add_clamp_u8(std::uint8_t* data, const double* offsets, std::size_t n);
}  // namespace scalar

#if defined(PACKSIM_HAVE_AVX2)
namespace avx2 {
Nearest nearest(const JointColumns& cols, const std::array<double, 6>& q);
void within_radius(const JointColumns& cols, const std::array<double, 6>& q, double radius_sq,
                   std::vector<std::size_t>& out);
void ray_box_min(const std::array<double, 3>& origin, const RayBatch& rays,
                 const std::array<double, 3>& half_extents, double* depth, std::int32_t* ids,
                 std::int32_t id);
void affine_u8(std::uint8_t* data, std::size_t n, double pivot, double scale, double bias);
void add_clamp_u8(std::uint8_t* data, const double* offsets, std::size_t n);
}  // namespace avx2
#endif

}  // namespace packsim::simd
