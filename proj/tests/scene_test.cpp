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

#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <map>

#include "packsim/benchmark.hpp"
#include "packsim/json_io.hpp"
#include "packsim/scene.hpp"

using namespace packsim;
using namespace packsim::scene;
using geom::Vec3;

namespace {

Json benchmark_json() { return Json::parse(scene_to_json(benchmark_scene())); }

SceneErrc parse_error_code(const Json& doc) {
  try {
    validate(parse_scene(doc.dump()));
  } catch (const SceneError& e) {
    return e.code();
  }
  ADD_FAILURE() << "scene was accepted";
  return SceneErrc::NotFound;
}

Json& component(Json& doc, const std::string& id) {
  for (auto& c : doc["components"]) {
    if (c["id"] == id) return c;
  }
  throw std::runtime_error("no component " + id);
}

geom::Pose at(const Vec3& p) {
  geom::Pose pose;
  pose.position = p;
  return pose;
}

}  // namespace

TEST(Benchmark, LayoutCounts) {
  const SceneWorld w = benchmark_scene();
  EXPECT_NO_THROW(validate(w));
  std::map<ComponentCategory, int> n;
  for (const auto& c : w.components) ++n[c.category];
  EXPECT_EQ(n[ComponentCategory::Bolt], 6);
  EXPECT_EQ(n[ComponentCategory::Cable], 2);
  EXPECT_EQ(n[ComponentCategory::Module], 4);
  EXPECT_EQ(remaining_disassemblable(w), 12u);
  EXPECT_EQ(w.drop_zones.size(), 3u);
}

TEST(Benchmark, LocksFormBoltCableModuleChain) {
  const SceneWorld w = benchmark_scene();
  for (const auto& c : w.components) {
    for (const auto& lock : c.locks) {
      const auto blocker = w.at(lock).category;
      if (c.category == ComponentCategory::Cable) {
        EXPECT_EQ(blocker, ComponentCategory::Bolt);
      } else if (c.category == ComponentCategory::Module) {
        EXPECT_EQ(blocker, ComponentCategory::Cable);
      }
    }
    if (c.category == ComponentCategory::Cable) {
      EXPECT_EQ(c.locks.size(), 3u);
    } else if (c.category == ComponentCategory::Module) {
      EXPECT_EQ(c.locks.size(), 1u);
    }
  }
}

TEST(SceneJson, RoundTripIsStable) {
  const std::string once = scene_to_json(benchmark_scene());
  EXPECT_EQ(scene_to_json(parse_scene(once)), once);
}

TEST(SceneJson, MalformedInputIsParseError) {
  try {
    parse_scene("{ not json");
    FAIL();
  } catch (const SceneError& e) {
    EXPECT_EQ(e.code(), SceneErrc::Parse);
  }
  Json doc = benchmark_json();
  component(doc, "bolt_1")["geometry"]["type"] = "sphere";
  EXPECT_EQ(parse_error_code(doc), SceneErrc::Parse);
}

TEST(SceneJson, MissingFileIsParseError) {
  try {
    load_scene("/nonexistent/scene.json");
    FAIL();
  } catch (const SceneError& e) {
    EXPECT_EQ(e.code(), SceneErrc::Parse);
  }
}

TEST(SceneValidation, RejectsBrokenInvariants) {
  const std::vector<std::function<void(Json&)>> breakers = {
      [](Json& d) { component(d, "bolt_2")["id"] = "bolt_1"; },
      [](Json& d) { component(d, "cable_1")["locks"].push_back("bolt_99"); },
      [](Json& d) { component(d, "cable_1")["locks"].push_back("cable_1"); },
      [](Json& d) { d["drop_zones"].erase("cable"); },
      [](Json& d) { component(d, "module_1")["pose"]["quaternion"] = Json::array({1, 1, 0, 0}); },
      [](Json& d) { component(d, "module_1")["geometry"]["dims"][1] = 0.0; },
      [](Json& d) { component(d, "bolt_1")["geometry"]["dims"][0] = -0.01; },
      [](Json& d) { d["camera"]["fx"] = 0.0; },
      [](Json& d) {
        Json kept = Json::array();
        for (auto& c : d["components"]) {
          const std::string cat = c["category"];
          if (cat != "bolt" && cat != "cable" && cat != "module") kept.push_back(c);
        }
        d["components"] = kept;
      },
  };
  for (std::size_t i = 0; i < breakers.size(); ++i) {
    Json doc = benchmark_json();
    breakers[i](doc);
    EXPECT_EQ(parse_error_code(doc), SceneErrc::Validation) << "breaker " << i;
  }
}

TEST(SceneState, PrecedenceGatesMakeMovable) {
  SceneWorld w = benchmark_scene();
  try {
    make_movable(w, "cable_1");
    FAIL();
  } catch (const SceneError& e) {
    EXPECT_EQ(e.code(), SceneErrc::Precedence);
  }
  for (const char* id : {"bolt_1", "bolt_2", "bolt_3"}) w.find(id)->mobility = Mobility::Removed;
  w = make_movable(std::move(w), "cable_1");
  EXPECT_EQ(w.at("cable_1").mobility, Mobility::Movable);
  // Other cable is locked by other bolts.
  EXPECT_THROW(make_movable(w, "cable_2"), SceneError);
}

TEST(SceneState, AttachNeedsProximityAndMovable) {
  SceneWorld w = benchmark_scene();
  const Vec3 grasp = w.at("bolt_1").grasp_point();
  try {
    attach(w, "bolt_1", at(grasp));
    FAIL();
  } catch (const SceneError& e) {
    EXPECT_EQ(e.code(), SceneErrc::WrongState);
  }
  w = make_movable(std::move(w), "bolt_1");
  try {
    attach(w, "bolt_1", at(grasp + Vec3(0.0051, 0, 0)));
    FAIL();
  } catch (const SceneError& e) {
    EXPECT_EQ(e.code(), SceneErrc::TooFar);
  }
  w = attach(std::move(w), "bolt_1", at(grasp + Vec3(0.0049, 0, 0)));
  EXPECT_EQ(w.at("bolt_1").mobility, Mobility::AttachedToGripper);
  EXPECT_THROW(attach(w, "bolt_1", at(grasp)), SceneError);
}

TEST(SceneState, CarryAndDetachIntoZone) {
  SceneWorld w = benchmark_scene();
  w = make_movable(std::move(w), "bolt_1");
  const Vec3 grasp = w.at("bolt_1").grasp_point();
  w = attach(std::move(w), "bolt_1", at(grasp));
  const Vec3 offset = w.at("bolt_1").pose.position - grasp;

  const Vec3 zone = w.drop_zones.at(ComponentCategory::Bolt).pose.position;
  w = carry(std::move(w), at(zone + Vec3(0, 0, 0.1)));
  EXPECT_LT((w.at("bolt_1").pose.position - (zone + Vec3(0, 0, 0.1) + offset)).norm(), 1e-12);
  auto r = detach(std::move(w), "bolt_1");
  EXPECT_TRUE(r.in_zone);
  EXPECT_EQ(r.world.at("bolt_1").mobility, Mobility::Removed);
  EXPECT_EQ(remaining_disassemblable(r.world), 11u);
  EXPECT_THROW(detach(r.world, "bolt_1"), SceneError);
}

TEST(SceneState, DetachOutsideZone) {
  SceneWorld w = benchmark_scene();
  w = make_movable(std::move(w), "bolt_1");
  w = attach(std::move(w), "bolt_1", at(w.at("bolt_1").grasp_point()));
  auto r = detach(std::move(w), "bolt_1");
  EXPECT_FALSE(r.in_zone);
}

TEST(SceneState, UnknownIdIsNotFound) {
  try {
    make_movable(benchmark_scene(), "nope");
    FAIL();
  } catch (const SceneError& e) {
    EXPECT_EQ(e.code(), SceneErrc::NotFound);
  }
}

TEST(SceneCollision, HeldAndRemovedPartsAreNotObstacles) {
  SceneWorld w = benchmark_scene();
  const Vec3 p = w.at("module_1").pose.position;
  const std::vector<geom::Capsule> probe{{p - Vec3(0.01, 0, 0), p + Vec3(0.01, 0, 0), 0.01}};
  EXPECT_TRUE(collides(w, probe));
  EXPECT_EQ(first_collision(w, probe), std::optional<std::string>("module_1"));
  w.find("module_1")->mobility = Mobility::AttachedToGripper;
  EXPECT_FALSE(collides(w, probe));
  w.find("module_1")->mobility = Mobility::Removed;
  EXPECT_FALSE(collides(w, probe));

  const std::vector<geom::Capsule> high{{Vec3(0, 0, 1.0), Vec3(0.2, 0, 1.0), 0.05}};
  EXPECT_FALSE(collides(benchmark_scene(), high));
}

TEST(SceneQuery, NearestGraspable) {
  SceneWorld w = benchmark_scene();
  const Vec3 near_b1 = w.at("bolt_1").grasp_point() + Vec3(0.003, -0.002, 0.0);
  EXPECT_EQ(nearest_graspable(w, ComponentCategory::Bolt, near_b1), std::optional<std::string>("bolt_1"));
  w.find("bolt_1")->mobility = Mobility::Removed;
  EXPECT_NE(nearest_graspable(w, ComponentCategory::Bolt, near_b1), std::optional<std::string>("bolt_1"));
  EXPECT_FALSE(nearest_graspable(w, ComponentCategory::MSD, near_b1).has_value());
}

TEST(SceneGeometry, GraspPointAndCoveringCapsule) {
  const SceneWorld w = benchmark_scene();
  for (const auto& c : w.components) {
    const Vec3 top = c.grasp_point();
    EXPECT_NEAR(top.z(), c.pose.position.z() + c.half_height(), 1e-12);
    // Every box corner lies inside the covering capsule.
    if (!std::holds_alternative<BoxShape>(c.shape)) continue;
    const auto cap = c.covering_capsule();
    const geom::Capsule world_cap{c.pose.apply(cap.a), c.pose.apply(cap.b), cap.radius};
    for (const auto& corner : geom::solid_corners(c.solid())) {
      EXPECT_LE(std::sqrt(geom::point_segment_distance_sq(corner, world_cap.a, world_cap.b)),
                world_cap.radius + 1e-12)
          << c.id;
    }
  }
}

TEST(SceneCategory, NamesRoundTrip) {
  for (auto c : {ComponentCategory::Bolt, ComponentCategory::Cable, ComponentCategory::Module,
                 ComponentCategory::MSD, ComponentCategory::PositiveBusBar,
                 ComponentCategory::NegativeBusBar, ComponentCategory::Contactor,
                 ComponentCategory::BMSController, ComponentCategory::PackBase}) {
    EXPECT_EQ(parse_category(category_name(c)), c);
  }
  EXPECT_FALSE(parse_category("rust").has_value());
  EXPECT_TRUE(is_disassemblable(ComponentCategory::Cable));
  EXPECT_FALSE(is_disassemblable(ComponentCategory::MSD));
}
