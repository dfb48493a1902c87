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

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "packsim/simd/kernels.hpp"

namespace packsim::simd {

namespace {

Isa initial_isa() {
  Isa isa = detected_isa();
  if (const char* env = std::getenv("PACKSIM_SIMD")) {
    const std::string want(env);
    if (want == "scalar") {
      isa = Isa::Scalar;
    } else if (want == "avx2" && isa_supported(Isa::Avx2)) {
      isa = Isa::Avx2;
    }
  }
  return isa;
}

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar:
      return "scalar";
    case Isa::Avx2:
      return "avx2";
  }
  return "unknown";
}

bool isa_supported(Isa isa) {
  if (isa == Isa::Scalar) return true;
#if defined(PACKSIM_HAVE_AVX2)
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa detected_isa() { return isa_supported(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar; }

Isa active_isa() { return active().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (!isa_supported(isa)) {
    throw std::invalid_argument("instruction set not supported: " + std::string(isa_name(isa)));
  }
  active().store(isa, std::memory_order_relaxed);
}

#if defined(PACKSIM_HAVE_AVX2)
#define PACKSIM_DISPATCH(fn, ...) \
  (active_isa() == Isa::Avx2 ? avx2::fn(__VA_ARGS__) : scalar::fn(__VA_ARGS__))
#else
#define PACKSIM_DISPATCH(fn, ...) scalar::fn(__VA_ARGS__)
#endif

Nearest nearest(const JointColumns& cols, const std::array<double, 6>& q) {
  return PACKSIM_DISPATCH(nearest, cols, q);
}

void within_radius(const JointColumns& cols, const std::array<double, 6>& q, double radius_sq,
                   std::vector<std::size_t>& out) {
  PACKSIM_DISPATCH(within_radius, cols, q, radius_sq, out);
}

void ray_box_min(const std::array<double, 3>& origin, const RayBatch& rays,
                 const std::array<double, 3>& half_extents, double* depth, std::int32_t* ids,
                 std::int32_t id) {
  PACKSIM_DISPATCH(ray_box_min, origin, rays, half_extents, depth, ids, id);
}

void affine_u8(std::uint8_t* data, std::size_t n, double pivot, double scale, double bias) {
  PACKSIM_DISPATCH(affine_u8, data, n, pivot, scale, bias);
}

void add_clamp_u8(std::uint8_t* data, const double* offsets, std::size_t n) {
  PACKSIM_DISPATCH(add_clamp_u8, data, offsets, n);
}

#undef PACKSIM_DISPATCH

}  // namespace packsim::simd
