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

#include "packsim/scene.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace packsim::scene {

namespace {

struct CategoryEntry {
  ComponentCategory category;
  std::string_view name;
};

constexpr CategoryEntry kCategories[] = {
    {ComponentCategory::Bolt, "bolt"},
    {ComponentCategory::Cable, "cable"},
    {ComponentCategory::Module, "module"},
    {ComponentCategory::MSD, "msd"},
    {ComponentCategory::PositiveBusBar, "positive_bus_bar"},
    {ComponentCategory::NegativeBusBar, "negative_bus_bar"},
    {ComponentCategory::Contactor, "contactor"},
    {ComponentCategory::BMSController, "bms_controller"},
    {ComponentCategory::PackBase, "pack_base"},
};

SceneComponent& require(SceneWorld& world, std::string_view id) {
  SceneComponent* c = world.find(id);
  if (c == nullptr) throw SceneError(SceneErrc::NotFound, "no component '" + std::string(id) + "'");
  return *c;
}

[[noreturn]] void wrong_state(const SceneComponent& c, std::string_view wanted) {
  throw SceneError(SceneErrc::WrongState, "component '" + c.id + "' is " +
                                              std::string(mobility_name(c.mobility)) +
                                              ", expected " + std::string(wanted));
}

bool is_obstacle(const SceneComponent& c) {
  return c.mobility != Mobility::Removed && c.mobility != Mobility::AttachedToGripper;
}

}  // namespace

std::string_view category_name(ComponentCategory c) {
  for (const auto& e : kCategories) {
    if (e.category == c) return e.name;
  }
  return "unknown";
}

std::optional<ComponentCategory> parse_category(std::string_view name) {
  for (const auto& e : kCategories) {
    if (e.name == name) return e.category;
  }
  return std::nullopt;
}

bool is_disassemblable(ComponentCategory c) {
  return c == ComponentCategory::Bolt || c == ComponentCategory::Cable ||
         c == ComponentCategory::Module;
}

std::string_view mobility_name(Mobility m) {
  switch (m) {
    case Mobility::Static:
      return "static";
    case Mobility::Movable:
      return "movable";
    case Mobility::AttachedToGripper:
      return "attached";
    case Mobility::Removed:
      return "removed";
  }
  return "unknown";
}

geom::Solid SceneComponent::solid() const {
  if (const auto* box = std::get_if<BoxShape>(&shape)) {
    return geom::Box{pose, 0.5 * box->size};
  }
  const auto& cyl = std::get<CylinderShape>(shape);
  return geom::Cylinder{pose, cyl.radius, 0.5 * cyl.height};
}

double SceneComponent::half_height() const {
  if (const auto* box = std::get_if<BoxShape>(&shape)) return 0.5 * box->size.z();
  return 0.5 * std::get<CylinderShape>(shape).height;
}

geom::Vec3 SceneComponent::grasp_point() const {
  return pose.apply(geom::Vec3(0.0, 0.0, half_height()));
}

geom::Capsule SceneComponent::covering_capsule() const {
  if (const auto* box = std::get_if<BoxShape>(&shape)) {
    const geom::Vec3 h = 0.5 * box->size;
    int axis = 0;
    h.maxCoeff(&axis);
    const int u = (axis + 1) % 3;
    const int v = (axis + 2) % 3;
    geom::Vec3 tip = geom::Vec3::Zero();
    tip[axis] = h[axis];
    return {-tip, tip, std::hypot(h[u], h[v])};
  }
  const auto& cyl = std::get<CylinderShape>(shape);
  const geom::Vec3 tip(0.0, 0.0, 0.5 * cyl.height);
  return {-tip, tip, cyl.radius};
}

bool DropZone::contains(const geom::Vec3& p) const {
  const geom::Vec3 local = pose.inverse().apply(p);
  for (int i = 0; i < 3; ++i) {
    if (std::abs(local[i]) > 0.5 * extent[i]) return false;
  }
  return true;
}

const SceneComponent* SceneWorld::find(std::string_view id) const {
  for (const auto& c : components) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

SceneComponent* SceneWorld::find(std::string_view id) {
  for (auto& c : components) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

const SceneComponent& SceneWorld::at(std::string_view id) const {
  const SceneComponent* c = find(id);
  if (c == nullptr) throw SceneError(SceneErrc::NotFound, "no component '" + std::string(id) + "'");
  return *c;
}

void validate(const SceneWorld& world) {
  auto fail = [](const std::string& msg) { throw SceneError(SceneErrc::Validation, msg); };

  std::set<std::string> ids;
  bool any_disassemblable = false;
  for (const auto& c : world.components) {
    if (c.id.empty()) fail("component with empty id");
    if (!ids.insert(c.id).second) fail("duplicate component id '" + c.id + "'");
    if (!geom::is_unit(c.pose.orientation)) fail("non-unit orientation on '" + c.id + "'");
    if (const auto* box = std::get_if<BoxShape>(&c.shape)) {
      if ((box->size.array() <= 0.0).any()) fail("non-positive box size on '" + c.id + "'");
    } else {
      const auto& cyl = std::get<CylinderShape>(c.shape);
      if (cyl.radius <= 0.0 || cyl.height <= 0.0) fail("non-positive cylinder on '" + c.id + "'");
    }
    any_disassemblable = any_disassemblable || is_disassemblable(c.category);
  }
  if (!any_disassemblable) fail("no disassemblable components");

  for (const auto& c : world.components) {
    for (const auto& lock : c.locks) {
      if (ids.count(lock) == 0) {
        fail("component '" + c.id + "' locked by missing component '" + lock + "'");
      }
      if (lock == c.id) fail("component '" + c.id + "' locks itself");
    }
    if (is_disassemblable(c.category) && world.drop_zones.count(c.category) == 0) {
      fail("no drop zone for category '" + std::string(category_name(c.category)) + "'");
    }
  }
  for (const auto& [cat, zone] : world.drop_zones) {
    if ((zone.extent.array() <= 0.0).any()) {
      fail("non-positive drop zone extent for '" + std::string(category_name(cat)) + "'");
    }
  }
  try {
    validate_camera(world.camera);
  } catch (const std::invalid_argument& e) {
    fail(e.what());
  }
}

SceneWorld make_movable(SceneWorld world, std::string_view id) {
  SceneComponent& c = require(world, id);
  if (c.mobility != Mobility::Static) wrong_state(c, "static");
  for (const auto& lock : c.locks) {
    const SceneComponent& blocker = world.at(lock);
    if (blocker.mobility != Mobility::Removed) {
      throw SceneError(SceneErrc::Precedence,
                       "component '" + c.id + "' still locked by '" + blocker.id + "'");
    }
  }
  c.mobility = Mobility::Movable;
  return world;
}

SceneWorld attach(SceneWorld world, std::string_view id, const geom::Pose& gripper_pose,
                  double threshold) {
  SceneComponent& c = require(world, id);
  if (c.mobility != Mobility::Movable) wrong_state(c, "movable");
  const double gap = (c.grasp_point() - gripper_pose.position).norm();
  if (gap > threshold) {
    throw SceneError(SceneErrc::TooFar, "gripper " + std::to_string(gap * 1000.0) +
                                            " mm from grasp point of '" + c.id + "'");
  }
  c.grip = gripper_pose.inverse() * c.pose;
  c.mobility = Mobility::AttachedToGripper;
  return world;
}

SceneWorld carry(SceneWorld world, const geom::Pose& gripper_pose) {
  for (auto& c : world.components) {
    if (c.mobility == Mobility::AttachedToGripper && c.grip) c.pose = gripper_pose * *c.grip;
  }
  return world;
}

DetachResult detach(SceneWorld world, std::string_view id) {
  SceneComponent& c = require(world, id);
  if (c.mobility != Mobility::AttachedToGripper) wrong_state(c, "attached");
  c.mobility = Mobility::Removed;
  c.grip.reset();
  bool in_zone = false;
  if (auto it = world.drop_zones.find(c.category); it != world.drop_zones.end()) {
    in_zone = it->second.contains(c.pose.position);
  }
  return {std::move(world), in_zone};
}

std::optional<std::string> first_collision(const SceneWorld& world,
                                           std::span<const geom::Capsule> arm_shape) {
  for (const auto& c : world.components) {
    if (!is_obstacle(c)) continue;
    const geom::Solid solid = c.solid();
    for (const auto& cap : arm_shape) {
      if (geom::capsule_intersects(cap, solid)) return c.id;
    }
  }
  return std::nullopt;
}

bool collides(const SceneWorld& world, std::span<const geom::Capsule> arm_shape) {
  return first_collision(world, arm_shape).has_value();
}

std::optional<std::string> nearest_graspable(const SceneWorld& world, ComponentCategory category,
                                             const geom::Vec3& point) {
  std::optional<std::string> best;
  double best_d = 0.0;
  for (const auto& c : world.components) {
    if (c.category != category || !is_disassemblable(c.category)) continue;
    if (c.mobility != Mobility::Static && c.mobility != Mobility::Movable) continue;
    const double d = (c.grasp_point() - point).squaredNorm();
    if (!best || d < best_d) {
      best = c.id;
      best_d = d;
    }
  }
  return best;
}

std::size_t remaining_disassemblable(const SceneWorld& world) {
  return static_cast<std::size_t>(std::count_if(
      world.components.begin(), world.components.end(), [](const SceneComponent& c) {
        return is_disassemblable(c.category) && c.mobility != Mobility::Removed;
      }));
}

}  // namespace packsim::scene
