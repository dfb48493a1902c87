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

#include "packsim/geometry.hpp"

namespace packsim {

/// Pinhole camera. `extrinsics` maps world coordinates into the camera frame
/// (x right, y down, z along the optical axis).
struct CameraModel {
  double fx = 0.0;
  double fy = 0.0;
  double u0 = 0.0;
  double v0 = 0.0;
  int width = 0;
  int height = 0;
  geom::Pose extrinsics;

  geom::Vec3 to_camera(const geom::Vec3& world) const { return extrinsics.apply(world); }
  geom::Vec3 to_world(const geom::Vec3& cam) const { return extrinsics.inverse().apply(cam); }
  geom::Vec3 optical_center_world() const { return extrinsics.inverse().position; }

  /// Default 640x480 sensor with a 60 degree horizontal field of view,
  /// looking straight down from `height_m` above the world origin.
  static CameraModel top_down(double height_m);
};

/// Throws std::invalid_argument when focal lengths or principal point are invalid.
void validate_camera(const CameraModel& cam);

}  // namespace packsim
