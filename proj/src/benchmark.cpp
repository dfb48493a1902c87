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

#include "packsim/benchmark.hpp"

#include "benchmark_scene_data.hpp"

namespace packsim {

scene::SceneWorld benchmark_scene() { return scene::parse_scene(data::kBenchmarkScene); }

executive::RunOptions benchmark_options(std::uint64_t seed) {
  executive::RunOptions o;
  o.home = executive::default_home();
  o.seed = seed;
  return o;
}

}  // namespace packsim
