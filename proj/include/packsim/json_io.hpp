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

#include <json.hpp>

#include "packsim/geometry.hpp"

namespace packsim {

using Json = nlohmann::json;

// {"xyz": [x, y, z], "quaternion": [w, x, y, z]}
geom::Pose pose_from_json(const Json& j);
Json pose_to_json(const geom::Pose& p);

geom::Vec3 vec3_from_json(const Json& j);
Json vec3_to_json(const geom::Vec3& v);

}  // namespace packsim
