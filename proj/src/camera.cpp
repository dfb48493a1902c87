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
#include <numbers>
#include <stdexcept>

#include "packsim/camera.hpp"

namespace packsim {

CameraModel CameraModel::top_down(double height_m) {
  CameraModel cam;
  cam.width = 640;
  cam.height = 480;
  cam.fx = cam.width / (2.0 * std::tan(std::numbers::pi / 6.0));
  cam.fy = cam.fx;
  cam.u0 = cam.width / 2.0;
  cam.v0 = cam.height / 2.0;
  // Camera x = world x, camera y = -world y, optical axis = -world z.
  cam.extrinsics.orientation = geom::Quat(0.0, 1.0, 0.0, 0.0);
  cam.extrinsics.position = geom::Vec3(0.0, 0.0, height_m);
  return cam;
}

void validate_camera(const CameraModel& cam) {
  if (!(cam.fx > 0.0) || !(cam.fy > 0.0)) throw std::invalid_argument("focal lengths must be positive");
  if (cam.width <= 0 || cam.height <= 0) throw std::invalid_argument("camera resolution must be positive");
  if (!(cam.u0 >= 0.0 && cam.u0 < cam.width) || !(cam.v0 >= 0.0 && cam.v0 < cam.height)) {
    throw std::invalid_argument("principal point outside the image");
  }
  if (!geom::is_unit(cam.extrinsics.orientation)) {
    throw std::invalid_argument("camera orientation is not a unit quaternion");
  }
}

}  // namespace packsim
