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

#include <immintrin.h>

#include <limits>

#include "packsim/simd/kernels.hpp"

namespace packsim::simd::avx2 {

namespace {

inline __m256d dist_sq4(const JointColumns& cols, const __m256d* qv, std::size_t i) {
  __m256d s = _mm256_setzero_pd();
  for (int j = 0; j < 6; ++j) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(cols.col[j] + i), qv[j]);
    s = _mm256_add_pd(s, _mm256_mul_pd(d, d));
  }
  return s;
}

inline double dist_sq1(const JointColumns& cols, const std::array<double, 6>& q, std::size_t i) {
  double s = 0.0;
  for (int j = 0; j < 6; ++j) {
    const double d = cols.col[j][i] - q[j];
    s = s + d * d;
  }
  return s;
}

// Converts four bytes to doubles, applies `op`, rounds to nearest even,
// clamps to [0, 255] and stores four bytes back.
template <typename Op>
inline void map4_u8(std::uint8_t* p, Op op) {
  std::int32_t packed;
  __builtin_memcpy(&packed, p, 4);
  const __m128i bytes = _mm_cvtsi32_si128(packed);
  __m256d v = _mm256_cvtepi32_pd(_mm_cvtepu8_epi32(bytes));
  v = op(v);
  v = _mm256_round_pd(v, _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  v = _mm256_max_pd(v, _mm256_setzero_pd());
  v = _mm256_min_pd(v, _mm256_set1_pd(255.0));
  const __m128i ints = _mm256_cvtpd_epi32(v);
  const __m128i words = _mm_packus_epi32(ints, ints);
  const __m128i out = _mm_packus_epi16(words, words);
  packed = _mm_cvtsi128_si32(out);
  __builtin_memcpy(p, &packed, 4);
}

}  // namespace

Nearest nearest(const JointColumns& cols, const std::array<double, 6>& q) {
  __m256d qv[6];
  for (int j = 0; j < 6; ++j) qv[j] = _mm256_set1_pd(q[j]);

  const std::size_t n = cols.count;
  const std::size_t vec_end = n & ~std::size_t{3};
  Nearest best{0, std::numeric_limits<double>::infinity()};

  if (vec_end > 0) {
    __m256d best_d = _mm256_set1_pd(std::numeric_limits<double>::infinity());
    __m256d best_i = _mm256_setzero_pd();
    __m256d idx = _mm256_set_pd(3.0, 2.0, 1.0, 0.0);
    const __m256d step = _mm256_set1_pd(4.0);
    for (std::size_t i = 0; i < vec_end; i += 4) {
      const __m256d s = dist_sq4(cols, qv, i);
      const __m256d lt = _mm256_cmp_pd(s, best_d, _CMP_LT_OQ);
      best_d = _mm256_blendv_pd(best_d, s, lt);
      best_i = _mm256_blendv_pd(best_i, idx, lt);
      idx = _mm256_add_pd(idx, step);
    }
    alignas(32) double d[4];
    alignas(32) double id[4];
    _mm256_store_pd(d, best_d);
    _mm256_store_pd(id, best_i);
    for (int lane = 0; lane < 4; ++lane) {
      const auto lane_idx = static_cast<std::size_t>(id[lane]);
      if (d[lane] < best.dist_sq || (d[lane] == best.dist_sq && lane_idx < best.index)) {
        best = {lane_idx, d[lane]};
      }
    }
  }
  for (std::size_t i = vec_end; i < n; ++i) {
    const double s = dist_sq1(cols, q, i);
    if (s < best.dist_sq) best = {i, s};
  }
  return best;
}

void within_radius(const JointColumns& cols, const std::array<double, 6>& q, double radius_sq,
                   std::vector<std::size_t>& out) {
  __m256d qv[6];
  for (int j = 0; j < 6; ++j) qv[j] = _mm256_set1_pd(q[j]);
  const __m256d r2 = _mm256_set1_pd(radius_sq);
  const std::size_t n = cols.count;
  const std::size_t vec_end = n & ~std::size_t{3};
  for (std::size_t i = 0; i < vec_end; i += 4) {
    const int mask = _mm256_movemask_pd(_mm256_cmp_pd(dist_sq4(cols, qv, i), r2, _CMP_LE_OQ));
    for (int lane = 0; lane < 4; ++lane) {
      if (mask & (1 << lane)) out.push_back(i + static_cast<std::size_t>(lane));
    }
  }
  for (std::size_t i = vec_end; i < n; ++i) {
    if (dist_sq1(cols, q, i) <= radius_sq) out.push_back(i);
  }
}

void ray_box_min(const std::array<double, 3>& origin, const RayBatch& rays,
                 const std::array<double, 3>& half_extents, double* depth, std::int32_t* ids,
                 std::int32_t id) {
  const double lo_s[3] = {-half_extents[0] - origin[0], -half_extents[1] - origin[1],
                          -half_extents[2] - origin[2]};
  const double hi_s[3] = {half_extents[0] - origin[0], half_extents[1] - origin[1],
                          half_extents[2] - origin[2]};
  __m256d lo[3];
  __m256d hi[3];
  for (int a = 0; a < 3; ++a) {
    lo[a] = _mm256_set1_pd(lo_s[a]);
    hi[a] = _mm256_set1_pd(hi_s[a]);
  }
  const double* dir[3] = {rays.dx, rays.dy, rays.dz};
  const __m256d zero = _mm256_setzero_pd();
  const std::size_t n = rays.count;
  const std::size_t vec_end = n & ~std::size_t{3};

  for (std::size_t i = 0; i < vec_end; i += 4) {
    __m256d t_near = _mm256_set1_pd(-std::numeric_limits<double>::infinity());
    __m256d t_far = _mm256_set1_pd(std::numeric_limits<double>::infinity());
    for (int a = 0; a < 3; ++a) {
      const __m256d d = _mm256_loadu_pd(dir[a] + i);
      const __m256d t1 = _mm256_div_pd(lo[a], d);
      const __m256d t2 = _mm256_div_pd(hi[a], d);
      t_near = _mm256_max_pd(t_near, _mm256_min_pd(t1, t2));
      t_far = _mm256_min_pd(t_far, _mm256_max_pd(t1, t2));
    }
    const __m256d t = _mm256_max_pd(t_near, zero);
    const __m256d cur = _mm256_loadu_pd(depth + i);
    const __m256d hit = _mm256_and_pd(
        _mm256_and_pd(_mm256_cmp_pd(t_near, t_far, _CMP_LE_OQ),
                      _mm256_cmp_pd(t_far, zero, _CMP_GE_OQ)),
        _mm256_cmp_pd(t, cur, _CMP_LT_OQ));
    const int mask = _mm256_movemask_pd(hit);
    if (mask == 0) continue;
    _mm256_storeu_pd(depth + i, _mm256_blendv_pd(cur, t, hit));
    for (int lane = 0; lane < 4; ++lane) {
      if (mask & (1 << lane)) ids[i + static_cast<std::size_t>(lane)] = id;
    }
  }
  if (vec_end < n) {
    RayBatch tail{rays.dx + vec_end, rays.dy + vec_end, rays.dz + vec_end, n - vec_end};
    scalar::ray_box_min(origin, tail, half_extents, depth + vec_end, ids + vec_end, id);
  }
}

void affine_u8(std::uint8_t* data, std::size_t n, double pivot, double scale, double bias) {
  const __m256d pv = _mm256_set1_pd(pivot);
  const __m256d sv = _mm256_set1_pd(scale);
  const __m256d bv = _mm256_set1_pd(bias);
  const std::size_t vec_end = n & ~std::size_t{3};
  for (std::size_t i = 0; i < vec_end; i += 4) {
    map4_u8(data + i, [&](__m256d v) {
      return _mm256_add_pd(_mm256_mul_pd(_mm256_sub_pd(v, pv), sv), bv);
    });
  }
  scalar::affine_u8(data + vec_end, n - vec_end, pivot, scale, bias);
}

void add_clamp_u8(std::uint8_t* data, const double* offsets, std::size_t n) {
  const std::size_t vec_end = n & ~std::size_t{3};
  for (std::size_t i = 0; i < vec_end; i += 4) {
    map4_u8(data + i, [&](__m256d v) { return _mm256_add_pd(v, _mm256_loadu_pd(offsets + i)); });
  }
  scalar::add_clamp_u8(data + vec_end, offsets + vec_end, n - vec_end);
}

}  // namespace packsim::simd::avx2
