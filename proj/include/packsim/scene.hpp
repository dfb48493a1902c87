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

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "packsim/camera.hpp"
#include "packsim/geometry.hpp"

namespace packsim::scene {

enum class ComponentCategory {
  Bolt,
  Cable,
  Module,
  MSD,
  PositiveBusBar,
  NegativeBusBar,
  Contactor,
  BMSController,
  PackBase,
};

std::string_view category_name(ComponentCategory c);
std::optional<ComponentCategory> parse_category(std::string_view name);

/// Bolts, cables and modules are removed; everything else is inert geometry.
bool is_disassemblable(ComponentCategory c);

/// Mobility only ever advances in declaration order.
enum class Mobility { Static, Movable, AttachedToGripper, Removed };

std::string_view mobility_name(Mobility m);

struct BoxShape {
  geom::Vec3 size = geom::Vec3::Zero();  // full edge lengths
};

struct CylinderShape {
  double radius = 0.0;
  double height = 0.0;
};

using Shape = std::variant<BoxShape, CylinderShape>;

/// Grasp tolerance between the gripper tool point and a component's grasp point.
inline constexpr double kAttachThreshold = 0.005;

struct SceneComponent {
  std::string id;
  ComponentCategory category = ComponentCategory::Bolt;
  geom::Pose pose;
  Shape shape;
  Mobility mobility = Mobility::Static;
  std::vector<std::string> locks;
  // gripper_pose^-1 * pose, recorded on attach.
  std::optional<geom::Pose> grip;

  geom::Solid solid() const;
  double half_height() const;
  /// Center of the top face (local +z).
  geom::Vec3 grasp_point() const;
  /// Capsule in the component frame that contains the whole shape.
  geom::Capsule covering_capsule() const;
};

struct DropZone {
  geom::Pose pose;
  geom::Vec3 extent = geom::Vec3::Zero();  // full edge lengths

  bool contains(const geom::Vec3& p) const;
};

struct SceneWorld {
  std::vector<SceneComponent> components;
  std::map<ComponentCategory, DropZone> drop_zones;
  CameraModel camera;
  std::uint64_t rng_seed = 0;

  const SceneComponent* find(std::string_view id) const;
  SceneComponent* find(std::string_view id);
  const SceneComponent& at(std::string_view id) const;
};

enum class SceneErrc { Parse, Validation, NotFound, WrongState, Precedence, TooFar };

class SceneError : public std::runtime_error {
 public:
  SceneError(SceneErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  SceneErrc code() const { return code_; }

 private:
  SceneErrc code_;
};

/// Throws SceneError{Validation} describing the first broken invariant.
void validate(const SceneWorld& world);

SceneWorld parse_scene(std::string_view json_text);
SceneWorld load_scene(const std::string& path);
std::string scene_to_json(const SceneWorld& world);

/// Static -> Movable. Requires every lock to be Removed.
SceneWorld make_movable(SceneWorld world, std::string_view id);

/// Movable -> AttachedToGripper when the tool point is within `threshold` of
/// the grasp point. `gripper_pose` is the tool frame in world coordinates.
SceneWorld attach(SceneWorld world, std::string_view id, const geom::Pose& gripper_pose,
                  double threshold = kAttachThreshold);

/// Moves every attached component rigidly with the gripper.
SceneWorld carry(SceneWorld world, const geom::Pose& gripper_pose);

struct DetachResult {
  SceneWorld world;
  bool in_zone = false;
};

/// AttachedToGripper -> Removed, keeping the carried pose.
DetachResult detach(SceneWorld world, std::string_view id);

/// True iff any capsule strictly intersects a component that is neither
/// Removed nor attached to the gripper.
bool collides(const SceneWorld& world, std::span<const geom::Capsule> arm_shape);

/// Id of the obstacle hit first, for diagnostics.
std::optional<std::string> first_collision(const SceneWorld& world,
                                           std::span<const geom::Capsule> arm_shape);

/// Static or Movable disassemblable component of `category` whose grasp point
/// is closest to `point`.
std::optional<std::string> nearest_graspable(const SceneWorld& world, ComponentCategory category,
                                             const geom::Vec3& point);

/// Number of disassemblable components not yet Removed.
std::size_t remaining_disassemblable(const SceneWorld& world);

}  // namespace packsim::scene
