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

#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "packsim/camera.hpp"
#include "packsim/raster.hpp"
#include "packsim/scene.hpp"

namespace packsim::perception {

using scene::ComponentCategory;
using Rng = std::mt19937_64;

/// Camera-frame Z per pixel; +infinity where no component is hit.
struct DepthImage {
  int width = 0;
  int height = 0;
  std::vector<double> z;
  std::vector<std::int32_t> hit;  // index into SceneWorld::components, -1 on a miss

  double at(int u, int v) const { return z[static_cast<std::size_t>(v) * width + u]; }
  std::int32_t hit_at(int u, int v) const { return hit[static_cast<std::size_t>(v) * width + u]; }
};

/// Nearest-hit ray cast through every pixel center against all non-Removed components.
DepthImage render_depth(const scene::SceneWorld& world, const CameraModel& camera);

/// Flat-shaded color snapshot from the same ray cast.
RasterImage render_color(const scene::SceneWorld& world, const CameraModel& camera);

struct Detection {
  ComponentCategory category = ComponentCategory::Bolt;
  double u_min = 0.0;
  double v_min = 0.0;
  double u_max = 0.0;
  double v_max = 0.0;
  double score = 0.0;
  double u = 0.0;  // bbox midpoint
  double v = 0.0;
  std::optional<std::string> component_id;  // filled only by the oracle
};

struct ScoreParams {
  double mean = 1.0;
  double sigma = 0.0;
};

/// Per-category detection confidence, drawn from N(mean, sigma) clamped to [0, 1].
struct ScoreModel {
  std::map<ComponentCategory, ScoreParams> by_category;

  /// Bolt 0.463 / 0.05, cable 0.50 / 0.05, module 1.0 / 0.
  static ScoreModel defaults();
  double draw(ComponentCategory c, Rng& rng) const;
};

/// Pixel coordinates of a world point, or empty when it is behind the camera.
std::optional<std::array<double, 2>> project(const CameraModel& camera, const geom::Vec3& world);

/// True when the ray from the optical center to the component center meets no
/// other component before entering this one.
bool center_visible(const scene::SceneWorld& world, const CameraModel& camera, std::size_t index);

/// Ground-truth detector: one detection per visible, disassemblable component
/// that is neither Removed nor attached, ordered by center (v, then u).
std::vector<Detection> oracle_detect(const scene::SceneWorld& world, const CameraModel& camera,
                                     const ScoreModel& model, Rng& rng);

/// Pluggable detector interface.
class Detector {
 public:
  virtual ~Detector() = default;
  virtual std::vector<Detection> detect(const scene::SceneWorld& world, const CameraModel& camera,
                                        Rng& rng) = 0;
};

class OracleDetector : public Detector {
 public:
  explicit OracleDetector(ScoreModel model = ScoreModel::defaults()) : model_(std::move(model)) {}
  std::vector<Detection> detect(const scene::SceneWorld& world, const CameraModel& camera,
                                Rng& rng) override {
    return oracle_detect(world, camera, model_, rng);
  }

 private:
  ScoreModel model_;
};

enum class StageFlag { Bolts = 1, Cables = 2, Modules = 3, Done = 4 };

std::string_view stage_name(StageFlag f);

struct StageDecision {
  StageFlag flag = StageFlag::Done;
  std::optional<Detection> target;
  std::vector<Detection> bolts;
  std::vector<Detection> cables;
  std::vector<Detection> modules;
};

/// Partitions detections by category, picks the stage from list emptiness and
/// targets the first entry of the active list.
StageDecision stage_and_target(std::span<const Detection> detections);

class NoDepthError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Back-projects (u, v) with the depth stored at that pixel into world coordinates.
geom::Vec3 pixel_to_world(const CameraModel& camera, double u, double v, const DepthImage& depth);

/// 16-bit binary PGM in millimeters; misses are written as 0.
void write_depth_pgm(std::ostream& out, const DepthImage& depth);

/// Header: category,u_min,v_min,u_max,v_max,score
void write_detections_csv(std::ostream& out, std::span<const Detection> detections);

}  // namespace packsim::perception
