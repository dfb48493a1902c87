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

#include <fstream>
#include <sstream>

#include "packsim/json_io.hpp"
#include "packsim/scene.hpp"

namespace packsim {

geom::Vec3 vec3_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 3) throw std::invalid_argument("expected a 3-element array");
  return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

Json vec3_to_json(const geom::Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

geom::Pose pose_from_json(const Json& j) {
  geom::Pose p;
  p.position = vec3_from_json(j.at("xyz"));
  const Json& q = j.at("quaternion");
  if (!q.is_array() || q.size() != 4) throw std::invalid_argument("quaternion must be [w, x, y, z]");
  p.orientation = geom::Quat(q.at(0).get<double>(), q.at(1).get<double>(), q.at(2).get<double>(),
                             q.at(3).get<double>());
  return p;
}

Json pose_to_json(const geom::Pose& p) {
  const auto& q = p.orientation;
  return Json{{"xyz", vec3_to_json(p.position)},
              {"quaternion", Json::array({q.w(), q.x(), q.y(), q.z()})}};
}

namespace scene {

namespace {

SceneComponent component_from_json(const Json& j) {
  SceneComponent c;
  c.id = j.at("id").get<std::string>();
  const auto name = j.at("category").get<std::string>();
  const auto cat = parse_category(name);
  if (!cat) throw std::invalid_argument("unknown category '" + name + "'");
  c.category = *cat;
  c.pose = pose_from_json(j.at("pose"));

  const Json& g = j.at("geometry");
  const auto type = g.at("type").get<std::string>();
  const Json& dims = g.at("dims");
  if (type == "box") {
    c.shape = BoxShape{vec3_from_json(dims)};
  } else if (type == "cylinder") {
    if (!dims.is_array() || dims.size() != 2) {
      throw std::invalid_argument("cylinder dims must be [radius, height]");
    }
    c.shape = CylinderShape{dims.at(0).get<double>(), dims.at(1).get<double>()};
  } else {
    throw std::invalid_argument("unknown geometry type '" + type + "'");
  }
  if (j.contains("locks")) c.locks = j.at("locks").get<std::vector<std::string>>();
  if (j.contains("mobility")) {
    const auto m = j.at("mobility").get<std::string>();
    if (m == "static") {
      c.mobility = Mobility::Static;
    } else if (m == "removed") {
      c.mobility = Mobility::Removed;
    } else {
      throw std::invalid_argument("initial mobility must be static or removed");
    }
  }
  return c;
}

Json component_to_json(const SceneComponent& c) {
  Json geometry;
  if (const auto* box = std::get_if<BoxShape>(&c.shape)) {
    geometry = {{"type", "box"}, {"dims", vec3_to_json(box->size)}};
  } else {
    const auto& cyl = std::get<CylinderShape>(c.shape);
    geometry = {{"type", "cylinder"}, {"dims", Json::array({cyl.radius, cyl.height})}};
  }
  return Json{{"id", c.id},
              {"category", category_name(c.category)},
              {"pose", pose_to_json(c.pose)},
              {"geometry", geometry},
              {"locks", c.locks},
              {"mobility", mobility_name(c.mobility)}};
}

CameraModel camera_from_json(const Json& j) {
  CameraModel cam;
  cam.width = j.at("width").get<int>();
  cam.height = j.at("height").get<int>();
  cam.fx = j.at("fx").get<double>();
  cam.fy = j.at("fy").get<double>();
  cam.u0 = j.at("u0").get<double>();
  cam.v0 = j.at("v0").get<double>();
  const Json& ext = j.at("extrinsics");
  cam.extrinsics.position = vec3_from_json(ext.at("translation"));
  const Json& q = ext.at("quaternion");
  cam.extrinsics.orientation = geom::Quat(q.at(0).get<double>(), q.at(1).get<double>(),
                                          q.at(2).get<double>(), q.at(3).get<double>());
  return cam;
}

Json camera_to_json(const CameraModel& cam) {
  const auto& q = cam.extrinsics.orientation;
  return Json{{"width", cam.width},
              {"height", cam.height},
              {"fx", cam.fx},
              {"fy", cam.fy},
              {"u0", cam.u0},
              {"v0", cam.v0},
              {"extrinsics",
               {{"quaternion", Json::array({q.w(), q.x(), q.y(), q.z()})},
                {"translation", vec3_to_json(cam.extrinsics.position)}}}};
}

}  // namespace

SceneWorld parse_scene(std::string_view json_text) {
  SceneWorld world;
  try {
    const Json doc = Json::parse(json_text);
    for (const Json& jc : doc.at("components")) world.components.push_back(component_from_json(jc));
    for (const auto& [name, jz] : doc.at("drop_zones").items()) {
      const auto cat = parse_category(name);
      if (!cat) throw std::invalid_argument("unknown drop zone category '" + name + "'");
      world.drop_zones[*cat] = DropZone{pose_from_json(jz.at("pose")), vec3_from_json(jz.at("extent"))};
    }
    world.camera = doc.contains("camera") ? camera_from_json(doc.at("camera"))
                                          : CameraModel::top_down(1.5);
    world.rng_seed = doc.value("seed", std::uint64_t{0});
  } catch (const SceneError&) {
    throw;
  } catch (const std::exception& e) {
    throw SceneError(SceneErrc::Parse, std::string("scene parse error: ") + e.what());
  }
  validate(world);
  return world;
}

SceneWorld load_scene(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SceneError(SceneErrc::Parse, "cannot open scene file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scene(buf.str());
}

std::string scene_to_json(const SceneWorld& world) {
  Json doc;
  doc["seed"] = world.rng_seed;
  doc["components"] = Json::array();
  for (const auto& c : world.components) doc["components"].push_back(component_to_json(c));
  doc["drop_zones"] = Json::object();
  for (const auto& [cat, zone] : world.drop_zones) {
    doc["drop_zones"][std::string(category_name(cat))] = {{"pose", pose_to_json(zone.pose)},
                                                          {"extent", vec3_to_json(zone.extent)}};
  }
  doc["camera"] = camera_to_json(world.camera);
  return doc.dump(2);
}

}  // namespace scene
}  // namespace packsim
