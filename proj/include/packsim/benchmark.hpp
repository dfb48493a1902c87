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

#include "packsim/executive.hpp"
#include "packsim/scene.hpp"

namespace packsim {

/// Canonical disassembly scene: 6 bolts, 2 cables, 4 modules and inert pack
/// hardware, viewed by a top-down camera 1.5 m above the pack.
scene::SceneWorld benchmark_scene();

/// Options matching the benchmark mounting and home pose for a given seed.
executive::RunOptions benchmark_options(std::uint64_t seed);

}  // namespace packsim
