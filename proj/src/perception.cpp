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

#include "packsim/perception.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "packsim/simd/kernels.hpp"

namespace packsim::perception {

using geom::Vec3;
using scene::Mobility;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct PixelRect {
  int u0, u1, v0, v1;  // inclusive
};

// Pixels whose centers can see the solid, from its projected bounding corners.
PixelRect footprint(const CameraModel& cam, const geom::Solid& solid) {
  PixelRect full{0, cam.width - 1, 0, cam.height - 1};
  double umin = kInf, umax = -kInf, vmin = kInf, vmax = -kInf;
  for (const Vec3& c : geom::solid_corners(solid)) {
    const Vec3 p = cam.to_camera(c);
    if (p.z() <= 1e-9) return full;
    const double u = cam.fx * p.x() / p.z() + cam.u0;
    const double v = cam.fy * p.y() / p.z() + cam.v0;
    umin = std::min(umin, u);
    umax = std::max(umax, u);
    vmin = std::min(vmin, v);
    vmax = std::max(vmax, v);
  }
  PixelRect r;
  r.u0 = std::max(0, static_cast<int>(std::floor(umin - 0.5)) - 1);
  r.u1 = std::min(cam.width - 1, static_cast<int>(std::ceil(umax - 0.5)) + 1);
  r.v0 = std::max(0, static_cast<int>(std::floor(vmin - 0.5)) - 1);
  r.v1 = std::min(cam.height - 1, static_cast<int>(std::ceil(vmax - 0.5)) + 1);
  return r;
}

bool renderable(const scene::SceneComponent& c) { return c.mobility != Mobility::Removed; }

std::array<std::uint8_t, 3> category_color(ComponentCategory c) {
  switch (c) {
    case ComponentCategory::Bolt:
      return {70, 70, 78};
    case ComponentCategory::Cable:
      return {230, 120, 30};
    case ComponentCategory::Module:
      return {190, 195, 200};
    case ComponentCategory::MSD:
      return {240, 150, 40};
    case ComponentCategory::PositiveBusBar:
      return {200, 60, 40};
    case ComponentCategory::NegativeBusBar:
      return {40, 60, 170};
    case ComponentCategory::Contactor:
      return {220, 170, 60};
    case ComponentCategory::BMSController:
      return {180, 30, 30};
    case ComponentCategory::PackBase:
      return {60, 70, 85};
  }
  return {255, 0, 255};
}

}  // namespace

DepthImage render_depth(const scene::SceneWorld& world, const CameraModel& camera) {
  validate_camera(camera);
  DepthImage img;
  img.width = camera.width;
  img.height = camera.height;
  const std::size_t n = static_cast<std::size_t>(camera.width) * camera.height;
  img.z.assign(n, kInf);
  img.hit.assign(n, -1);

  const geom::Pose cam_to_world = camera.extrinsics.inverse();
  const Vec3 center = cam_to_world.position;
  const geom::Mat3 r_cw = cam_to_world.orientation.toRotationMatrix();

  std::vector<double> dx(camera.width), dy(camera.width), dz(camera.width);
  for (std::size_t idx = 0; idx < world.components.size(); ++idx) {
    const auto& comp = world.components[idx];
    if (!renderable(comp)) continue;
    const geom::Solid solid = comp.solid();
    const PixelRect rect = footprint(camera, solid);
    if (rect.u0 > rect.u1 || rect.v0 > rect.v1) continue;
    const auto id = static_cast<std::int32_t>(idx);

    if (const auto* box = std::get_if<geom::Box>(&solid)) {
      const geom::Pose inv = box->pose.inverse();
      const Vec3 o = inv.apply(center);
      // Pixel ray straight into the box frame: R_box^T * R_cw * d_cam.
      const geom::Mat3 m = inv.orientation.toRotationMatrix() * r_cw;
      const std::array<double, 3> origin{o.x(), o.y(), o.z()};
      const std::array<double, 3> half{box->half_extents.x(), box->half_extents.y(),
                                       box->half_extents.z()};
      for (int v = rect.v0; v <= rect.v1; ++v) {
        const double yc = (v + 0.5 - camera.v0) / camera.fy;
        std::size_t k = 0;
        for (int u = rect.u0; u <= rect.u1; ++u, ++k) {
          const Vec3 d = m * Vec3((u + 0.5 - camera.u0) / camera.fx, yc, 1.0);
          dx[k] = d.x();
          dy[k] = d.y();
          dz[k] = d.z();
        }
        const std::size_t row = static_cast<std::size_t>(v) * camera.width + rect.u0;
        simd::ray_box_min(origin, {dx.data(), dy.data(), dz.data(), k}, half, img.z.data() + row,
                          img.hit.data() + row, id);
      }
    } else {
      const auto& cyl = std::get<geom::Cylinder>(solid);
      const geom::Pose inv = cyl.pose.inverse();
      const Vec3 o = inv.apply(center);
      const geom::Mat3 m = inv.orientation.toRotationMatrix() * r_cw;
      for (int v = rect.v0; v <= rect.v1; ++v) {
        const double yc = (v + 0.5 - camera.v0) / camera.fy;
        for (int u = rect.u0; u <= rect.u1; ++u) {
          const Vec3 d = m * Vec3((u + 0.5 - camera.u0) / camera.fx, yc, 1.0);
          const auto t = geom::ray_z_cylinder(o, d, cyl.radius, cyl.half_height);
          const std::size_t p = static_cast<std::size_t>(v) * camera.width + u;
          if (t && *t < img.z[p]) {
            img.z[p] = *t;
            img.hit[p] = id;
          }
        }
      }
    }
  }
  return img;
}

RasterImage render_color(const scene::SceneWorld& world, const CameraModel& camera) {
  const DepthImage depth = render_depth(world, camera);
  RasterImage img(camera.width, camera.height, 0);
  for (int v = 0; v < camera.height; ++v) {
    for (int u = 0; u < camera.width; ++u) {
      std::uint8_t* px = img.px(u, v);
      const std::int32_t h = depth.hit_at(u, v);
      if (h < 0) {
        px[0] = px[1] = px[2] = 128;
        continue;
      }
      const auto rgb = category_color(world.components[static_cast<std::size_t>(h)].category);
      std::copy(rgb.begin(), rgb.end(), px);
    }
  }
  return img;
}

ScoreModel ScoreModel::defaults() {
  ScoreModel m;
  m.by_category[ComponentCategory::Bolt] = {0.463, 0.05};
  m.by_category[ComponentCategory::Cable] = {0.50, 0.05};
  m.by_category[ComponentCategory::Module] = {1.0, 0.0};
  return m;
}

double ScoreModel::draw(ComponentCategory c, Rng& rng) const {
  const auto it = by_category.find(c);
  const ScoreParams p = it == by_category.end() ? ScoreParams{} : it->second;
  double s = p.mean;
  if (p.sigma > 0.0) s = std::normal_distribution<double>(p.mean, p.sigma)(rng);
  return std::clamp(s, 0.0, 1.0);
}

std::optional<std::array<double, 2>> project(const CameraModel& camera, const Vec3& world) {
  const Vec3 p = camera.to_camera(world);
  if (!(p.z() > 0.0)) return std::nullopt;
  return std::array<double, 2>{camera.fx * p.x() / p.z() + camera.u0,
                               camera.fy * p.y() / p.z() + camera.v0};
}

bool center_visible(const scene::SceneWorld& world, const CameraModel& camera, std::size_t index) {
  const auto& target = world.components.at(index);
  const Vec3 origin = camera.optical_center_world();
  const Vec3 dir = target.pose.position - origin;
  const auto self = geom::ray_hit(origin, dir, target.solid());
  const double t_self = self ? *self : 1.0;
  for (std::size_t i = 0; i < world.components.size(); ++i) {
    if (i == index) continue;
    const auto& c = world.components[i];
    if (!renderable(c) || c.mobility == Mobility::AttachedToGripper) continue;
    const auto t = geom::ray_hit(origin, dir, c.solid());
    if (t && *t < t_self) return false;
  }
  return true;
}

std::vector<Detection> oracle_detect(const scene::SceneWorld& world, const CameraModel& camera,
                                     const ScoreModel& model, Rng& rng) {
  struct Candidate {
    double cu, cv;
    std::size_t index;
    Detection det;
  };
  std::vector<Candidate> found;
  for (std::size_t i = 0; i < world.components.size(); ++i) {
    const auto& c = world.components[i];
    if (!scene::is_disassemblable(c.category)) continue;
    if (c.mobility == Mobility::Removed || c.mobility == Mobility::AttachedToGripper) continue;
    const auto center = project(camera, c.pose.position);
    if (!center) continue;
    if ((*center)[0] < 0.0 || (*center)[0] >= camera.width || (*center)[1] < 0.0 ||
        (*center)[1] >= camera.height) {
      continue;
    }
    if (!center_visible(world, camera, i)) continue;

    Detection d;
    d.category = c.category;
    d.u_min = d.v_min = kInf;
    d.u_max = d.v_max = -kInf;
    for (const Vec3& corner : geom::solid_corners(c.solid())) {
      const auto p = project(camera, corner);
      if (!p) continue;
      d.u_min = std::min(d.u_min, (*p)[0]);
      d.u_max = std::max(d.u_max, (*p)[0]);
      d.v_min = std::min(d.v_min, (*p)[1]);
      d.v_max = std::max(d.v_max, (*p)[1]);
    }
    d.u_min = std::clamp(d.u_min, 0.0, static_cast<double>(camera.width));
    d.u_max = std::clamp(d.u_max, 0.0, static_cast<double>(camera.width));
    d.v_min = std::clamp(d.v_min, 0.0, static_cast<double>(camera.height));
    d.v_max = std::clamp(d.v_max, 0.0, static_cast<double>(camera.height));
    d.u = 0.5 * (d.u_min + d.u_max);
    d.v = 0.5 * (d.v_min + d.v_max);
    d.component_id = c.id;
    found.push_back({(*center)[0], (*center)[1], i, std::move(d)});
  }
  std::stable_sort(found.begin(), found.end(), [](const Candidate& a, const Candidate& b) {
    if (a.cv != b.cv) return a.cv < b.cv;
    return a.cu < b.cu;
  });
  std::vector<Detection> out;
  out.reserve(found.size());
  for (auto& f : found) {
    f.det.score = model.draw(f.det.category, rng);
    out.push_back(std::move(f.det));
  }
  return out;
}

std::string_view stage_name(StageFlag f) {
  switch (f) {
    case StageFlag::Bolts:
      return "bolts";
    case StageFlag::Cables:
      return "cables";
    case StageFlag::Modules:
      return "modules";
    case StageFlag::Done:
      return "done";
  }
  return "unknown";
}

StageDecision stage_and_target(std::span<const Detection> detections) {
  StageDecision out;
  for (const auto& d : detections) {
    switch (d.category) {
      case ComponentCategory::Bolt:
        out.bolts.push_back(d);
        break;
      case ComponentCategory::Cable:
        out.cables.push_back(d);
        break;
      case ComponentCategory::Module:
        out.modules.push_back(d);
        break;
      default:
        break;
    }
  }
  if (!out.bolts.empty()) {
    out.flag = StageFlag::Bolts;
    out.target = out.bolts.front();
  } else if (!out.cables.empty()) {
    out.flag = StageFlag::Cables;
    out.target = out.cables.front();
  } else if (!out.modules.empty()) {
    out.flag = StageFlag::Modules;
    out.target = out.modules.front();
  } else {
    out.flag = StageFlag::Done;
  }
  return out;
}

Vec3 pixel_to_world(const CameraModel& camera, double u, double v, const DepthImage& depth) {
  const int pu = static_cast<int>(std::floor(u));
  const int pv = static_cast<int>(std::floor(v));
  if (pu < 0 || pv < 0 || pu >= depth.width || pv >= depth.height) {
    throw std::out_of_range("pixel outside the depth image");
  }
  const double z = depth.at(pu, pv);
  if (!std::isfinite(z)) throw NoDepthError("no depth at the requested pixel");
  const Vec3 cam((u - camera.u0) * z / camera.fx, (v - camera.v0) * z / camera.fy, z);
  return camera.to_world(cam);
}

void write_depth_pgm(std::ostream& out, const DepthImage& depth) {
  out << "P5\n" << depth.width << ' ' << depth.height << "\n65535\n";
  std::vector<unsigned char> row(static_cast<std::size_t>(depth.width) * 2);
  for (int v = 0; v < depth.height; ++v) {
    for (int u = 0; u < depth.width; ++u) {
      const double z = depth.at(u, v);
      unsigned mm = 0;
      if (std::isfinite(z)) mm = static_cast<unsigned>(std::clamp(std::lround(z * 1000.0), 0L, 65535L));
      row[2 * u] = static_cast<unsigned char>(mm >> 8);
      row[2 * u + 1] = static_cast<unsigned char>(mm & 0xff);
    }
    out.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size()));
  }
}

void write_detections_csv(std::ostream& out, std::span<const Detection> detections) {
  out << "category,u_min,v_min,u_max,v_max,score\n";
  char buf[160];
  for (const auto& d : detections) {
    std::snprintf(buf, sizeof buf, "%s,%.3f,%.3f,%.3f,%.3f,%.4f\n",
                  std::string(scene::category_name(d.category)).c_str(), d.u_min, d.v_min,
                  d.u_max, d.v_max, d.score);
    out << buf;
  }
}

}  // namespace packsim::perception
