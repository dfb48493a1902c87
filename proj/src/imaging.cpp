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

#include "packsim/imaging.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "packsim/json_io.hpp"
#include "packsim/simd/kernels.hpp"

namespace packsim::imaging {

namespace {

std::uint8_t to_u8(double v) { return static_cast<std::uint8_t>(std::clamp(std::rint(v), 0.0, 255.0)); }

double smooth(double t) { return t * t * (3.0 - 2.0 * t); }

// Bilinear value noise on a coarse random lattice, values in [0, 1].
std::vector<double> value_noise(int w, int h, int cell, Rng& rng) {
  const int gw = w / cell + 2;
  const int gh = h / cell + 2;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> grid(static_cast<std::size_t>(gw) * gh);
  for (double& g : grid) g = unit(rng);
  std::vector<double> out(static_cast<std::size_t>(w) * h);
  for (int y = 0; y < h; ++y) {
    const int gy = y / cell;
    const double fy = smooth(static_cast<double>(y % cell) / cell);
    for (int x = 0; x < w; ++x) {
      const int gx = x / cell;
      const double fx = smooth(static_cast<double>(x % cell) / cell);
      const double a = grid[gy * gw + gx];
      const double b = grid[gy * gw + gx + 1];
      const double c = grid[(gy + 1) * gw + gx];
      const double d = grid[(gy + 1) * gw + gx + 1];
      out[static_cast<std::size_t>(y) * w + x] =
          (a * (1 - fx) + b * fx) * (1 - fy) + (c * (1 - fx) + d * fx) * fy;
    }
  }
  return out;
}

RasterImage deform(const RasterImage& in, double amplitude, Rng& rng) {
  if (amplitude == 0.0 || in.width == 0 || in.height == 0) return in;
  const int w = in.width;
  const int h = in.height;
  const int edge = std::uniform_int_distribution<int>(0, 3)(rng);  // right, left, bottom, top
  const bool vertical_edge = edge < 2;
  const int along_len = vertical_edge ? h : w;
  const double center = std::uniform_real_distribution<double>(0.2, 0.8)(rng) * along_len;
  const double spread = std::uniform_real_distribution<double>(0.08, 0.2)(rng) * along_len;
  const double depth = std::max(4.0, 0.12 * (vertical_edge ? w : h));

  RasterImage out = in;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double dist = 0.0, along = 0.0, sign = 1.0;
      switch (edge) {
        case 0: dist = w - 1 - x; along = y; sign = 1.0; break;
        case 1: dist = x; along = y; sign = -1.0; break;
        case 2: dist = h - 1 - y; along = x; sign = 1.0; break;
        default: dist = y; along = x; sign = -1.0; break;
      }
      const double s = amplitude * std::exp(-(dist / depth) * (dist / depth) -
                                            ((along - center) / spread) * ((along - center) / spread));
      // Sampling from inside the pack pushes content outward, a convex bulge.
      const long shift = std::lround(sign * s);
      if (shift == 0) continue;
      int sx = x, sy = y;
      if (vertical_edge) {
        sx = std::clamp(static_cast<int>(x - shift), 0, w - 1);
      } else {
        sy = std::clamp(static_cast<int>(y - shift), 0, h - 1);
      }
      std::copy_n(in.px(sx, sy), 3, out.px(x, y));
    }
  }
  return out;
}

RasterImage contaminate(const RasterImage& in, double strength, Rng& rng) {
  if (strength == 0.0 || in.width == 0 || in.height == 0) return in;
  constexpr double kThreshold = 0.55;
  constexpr double kTint[3] = {70.0, 165.0, 60.0};
  const int cell = std::max(8, std::min(in.width, in.height) / 8);
  const auto noise = value_noise(in.width, in.height, cell, rng);
  RasterImage out = in;
  for (std::size_t i = 0; i < noise.size(); ++i) {
    const double m = std::clamp((noise[i] - kThreshold) / (1.0 - kThreshold), 0.0, 1.0) * strength;
    if (m <= 0.0) continue;
    std::uint8_t* p = out.pixels.data() + i * 3;
    for (int c = 0; c < 3; ++c) p[c] = to_u8(p[c] * (1.0 - m) + kTint[c] * m);
  }
  return out;
}

RasterImage dust(const RasterImage& in, double opacity, Rng& rng) {
  if (opacity == 0.0) return in;
  RasterImage out = in;
  std::uniform_real_distribution<double> jitter(-20.0, 20.0);
  const std::size_t n = static_cast<std::size_t>(in.width) * in.height;
  for (std::size_t i = 0; i < n; ++i) {
    const double gray = 190.0 + jitter(rng);
    std::uint8_t* p = out.pixels.data() + i * 3;
    for (int c = 0; c < 3; ++c) p[c] = to_u8(p[c] * (1.0 - opacity) + gray * opacity);
  }
  return out;
}

RasterImage scratch(const RasterImage& in, int count, Rng& rng) {
  if (count <= 0 || in.width == 0 || in.height == 0) return in;
  RasterImage out = in;
  std::uniform_real_distribution<double> ux(0.0, in.width - 1.0), uy(0.0, in.height - 1.0);
  std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
  std::uniform_real_distribution<double> length(0.04, 0.25);
  std::uniform_real_distribution<double> bright(215.0, 255.0);
  const double diag = std::hypot(in.width, in.height);
  for (int s = 0; s < count; ++s) {
    const double x0 = ux(rng), y0 = uy(rng), a = angle(rng);
    const double len = length(rng) * diag;
    const double level = bright(rng);
    const int steps = std::max(1, static_cast<int>(std::ceil(len)));
    for (int k = 0; k <= steps; ++k) {
      const double t = len * k / steps;
      const long x = std::lround(x0 + t * std::cos(a));
      const long y = std::lround(y0 + t * std::sin(a));
      if (x < 0 || y < 0 || x >= in.width || y >= in.height) continue;
      std::uint8_t* p = out.px(static_cast<int>(x), static_cast<int>(y));
      for (int c = 0; c < 3; ++c) p[c] = to_u8(0.2 * p[c] + 0.8 * level);
    }
  }
  return out;
}

}  // namespace

bool labels_valid(const LabeledImage& li) {
  for (const auto& l : li.labels) {
    if (l.u_min < 0 || l.v_min < 0 || l.u_max > li.image.width || l.v_max > li.image.height) {
      return false;
    }
    if (l.u_max <= l.u_min || l.v_max <= l.v_min) return false;
  }
  return li.image.pixels.size() == static_cast<std::size_t>(li.image.width) * li.image.height * 3;
}

std::string_view condition_name(Condition c) {
  switch (c) {
    case Condition::Deformation:
      return "deformation";
    case Condition::Contamination:
      return "contamination";
    case Condition::Dust:
      return "dust";
    case Condition::Scratches:
      return "scratches";
  }
  return "unknown";
}

std::optional<Condition> parse_condition(std::string_view name) {
  for (Condition c : {Condition::Deformation, Condition::Contamination, Condition::Dust,
                      Condition::Scratches}) {
    if (condition_name(c) == name) return c;
  }
  return std::nullopt;
}

RasterImage apply_condition(const RasterImage& image, Condition condition, Rng& rng,
                            const ConditionParams& params) {
  switch (condition) {
    case Condition::Deformation:
      return deform(image, params.deformation_amplitude, rng);
    case Condition::Contamination:
      return contaminate(image, params.contamination_strength, rng);
    case Condition::Dust:
      return dust(image, params.dust_opacity, rng);
    case Condition::Scratches:
      return scratch(image, params.scratch_count, rng);
  }
  return image;
}

void validate_spec(const AugmentSpec& s) {
  if (!(s.brightness >= -1.0 && s.brightness <= 1.0)) throw std::invalid_argument("brightness outside [-1, 1]");
  if (!(s.contrast > 0.0)) throw std::invalid_argument("contrast must be positive");
  if (!(s.crop > 0.0 && s.crop <= 1.0)) throw std::invalid_argument("crop outside (0, 1]");
  if (!(s.noise_sigma >= 0.0)) throw std::invalid_argument("noise sigma must be >= 0");
  if (s.rotation != 0 && s.rotation != 90 && s.rotation != 180 && s.rotation != 270) {
    throw std::invalid_argument("rotation must be a multiple of 90 degrees");
  }
}

LabeledImage crop(const LabeledImage& in, int x0, int y0, int w, int h) {
  if (x0 < 0 || y0 < 0 || w < 1 || h < 1 || x0 + w > in.image.width || y0 + h > in.image.height) {
    throw std::invalid_argument("crop window outside the image");
  }
  LabeledImage out;
  out.image = RasterImage(w, h);
  for (int y = 0; y < h; ++y) {
    std::copy_n(in.image.px(x0, y0 + y), static_cast<std::size_t>(w) * 3, out.image.px(0, y));
  }
  for (const auto& l : in.labels) {
    Label c = l;
    c.u_min = std::clamp(l.u_min - x0, 0, w);
    c.u_max = std::clamp(l.u_max - x0, 0, w);
    c.v_min = std::clamp(l.v_min - y0, 0, h);
    c.v_max = std::clamp(l.v_max - y0, 0, h);
    if (c.u_max > c.u_min && c.v_max > c.v_min) out.labels.push_back(c);
  }
  out.labels_cropped_out = in.labels_cropped_out || (!in.labels.empty() && out.labels.empty());
  return out;
}

LabeledImage flip(const LabeledImage& in, Flip f) {
  if (f == Flip::None) return in;
  const int w = in.image.width;
  const int h = in.image.height;
  LabeledImage out;
  out.labels_cropped_out = in.labels_cropped_out;
  out.image = RasterImage(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int sx = f == Flip::Horizontal ? w - 1 - x : x;
      const int sy = f == Flip::Vertical ? h - 1 - y : y;
      std::copy_n(in.image.px(sx, sy), 3, out.image.px(x, y));
    }
  }
  for (const auto& l : in.labels) {
    Label m = l;
    if (f == Flip::Horizontal) {
      m.u_min = w - l.u_max;
      m.u_max = w - l.u_min;
    } else {
      m.v_min = h - l.v_max;
      m.v_max = h - l.v_min;
    }
    out.labels.push_back(m);
  }
  return out;
}

LabeledImage rotate90(const LabeledImage& in) {
  // (x, y) -> (y, w - 1 - x): a quarter turn counter-clockwise on screen.
  const int w = in.image.width;
  const int h = in.image.height;
  LabeledImage out;
  out.labels_cropped_out = in.labels_cropped_out;
  out.image = RasterImage(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) std::copy_n(in.image.px(x, y), 3, out.image.px(y, w - 1 - x));
  }
  for (const auto& l : in.labels) {
    out.labels.push_back({l.category, l.v_min, w - l.u_max, l.v_max, w - l.u_min});
  }
  return out;
}

LabeledImage augment(const LabeledImage& labeled, const AugmentSpec& spec) {
  validate_spec(spec);
  Rng rng(spec.rng_seed);
  LabeledImage cur = labeled;

  if (spec.crop < 1.0) {
    const int w = std::max(1, static_cast<int>(std::lround(spec.crop * cur.image.width)));
    const int h = std::max(1, static_cast<int>(std::lround(spec.crop * cur.image.height)));
    const int x0 = std::uniform_int_distribution<int>(0, cur.image.width - w)(rng);
    const int y0 = std::uniform_int_distribution<int>(0, cur.image.height - h)(rng);
    cur = crop(cur, x0, y0, w, h);
  }
  cur = flip(cur, spec.flip);
  for (int r = 0; r < spec.rotation / 90; ++r) cur = rotate90(cur);

  auto& px = cur.image.pixels;
  if (spec.brightness != 0.0) simd::affine_u8(px.data(), px.size(), 0.0, 1.0, spec.brightness * 255.0);
  if (spec.contrast != 1.0) simd::affine_u8(px.data(), px.size(), 128.0, spec.contrast, 128.0);
  if (spec.noise_sigma > 0.0) {
    std::normal_distribution<double> noise(0.0, spec.noise_sigma);
    std::vector<double> offsets(px.size());
    for (double& o : offsets) o = noise(rng);
    simd::add_clamp_u8(px.data(), offsets.data(), px.size());
  }
  return cur;
}

AugmentSpec sample_spec(Rng& rng) {
  AugmentSpec s;
  s.brightness = std::uniform_real_distribution<double>(-0.25, 0.25)(rng);
  s.contrast = std::uniform_real_distribution<double>(0.7, 1.3)(rng);
  s.crop = std::uniform_real_distribution<double>(0.7, 1.0)(rng);
  s.flip = static_cast<Flip>(std::uniform_int_distribution<int>(0, 2)(rng));
  s.noise_sigma = std::uniform_real_distribution<double>(0.0, 12.0)(rng);
  s.rotation = 90 * std::uniform_int_distribution<int>(0, 3)(rng);
  s.rng_seed = rng();
  return s;
}

std::vector<LabeledImage> expand_dataset(const LabeledImage& labeled, int n_variants, Rng& rng) {
  if (n_variants < 1) throw std::invalid_argument("n_variants must be >= 1");
  std::vector<LabeledImage> out;
  out.reserve(static_cast<std::size_t>(n_variants));
  for (int i = 0; i < n_variants; ++i) out.push_back(augment(labeled, sample_spec(rng)));
  return out;
}

// --- I/O -------------------------------------------------------------------

RasterImage read_png(const std::filesystem::path& path) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&img, path.c_str())) {
    throw std::runtime_error("cannot read PNG '" + path.string() + "': " + img.message);
  }
  img.format = PNG_FORMAT_RGB;
  RasterImage out(static_cast<int>(img.width), static_cast<int>(img.height));
  if (!png_image_finish_read(&img, nullptr, out.pixels.data(), 0, nullptr)) {
    const std::string msg = img.message;
    png_image_free(&img);
    throw std::runtime_error("cannot decode PNG '" + path.string() + "': " + msg);
  }
  return out;
}

void write_png(const std::filesystem::path& path, const RasterImage& image) {
  png_image img{};
  img.version = PNG_IMAGE_VERSION;
  img.width = static_cast<png_uint_32>(image.width);
  img.height = static_cast<png_uint_32>(image.height);
  img.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&img, path.c_str(), 0, image.pixels.data(), 0, nullptr)) {
    throw std::runtime_error("cannot write PNG '" + path.string() + "': " + img.message);
  }
}

RasterImage read_ppm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  auto token = [&]() {
    std::string t;
    while (in >> t) {
      if (t[0] != '#') return t;
      std::string rest;
      std::getline(in, rest);
    }
    throw std::runtime_error("truncated PPM header in '" + path.string() + "'");
  };
  if (token() != "P6") throw std::runtime_error("'" + path.string() + "' is not a binary PPM");
  const int w = std::stoi(token());
  const int h = std::stoi(token());
  if (std::stoi(token()) != 255) throw std::runtime_error("only 8-bit PPM is supported");
  in.get();
  RasterImage out(w, h);
  in.read(reinterpret_cast<char*>(out.pixels.data()), static_cast<std::streamsize>(out.pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(out.pixels.size())) {
    throw std::runtime_error("truncated PPM data in '" + path.string() + "'");
  }
  return out;
}

void write_ppm(const std::filesystem::path& path, const RasterImage& image) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << "P6\n" << image.width << ' ' << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.pixels.data()),
            static_cast<std::streamsize>(image.pixels.size()));
}

RasterImage read_image(const std::filesystem::path& path) {
  const auto ext = path.extension();
  if (ext == ".png") return read_png(path);
  if (ext == ".ppm") return read_ppm(path);
  throw std::runtime_error("unsupported image format '" + ext.string() + "'");
}

void write_image(const std::filesystem::path& path, const RasterImage& image) {
  const auto ext = path.extension();
  if (ext == ".png") return write_png(path, image);
  if (ext == ".ppm") return write_ppm(path, image);
  throw std::runtime_error("unsupported image format '" + ext.string() + "'");
}

std::vector<Label> read_labels_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::string line;
  std::getline(in, line);
  if (line.rfind("category,u_min,v_min,u_max,v_max", 0) != 0) {
    throw std::runtime_error("unexpected label header in '" + path.string() + "'");
  }
  std::vector<Label> labels;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> f;
    while (std::getline(ss, field, ',')) f.push_back(field);
    if (f.size() != 5) throw std::runtime_error("malformed label row '" + line + "'");
    const auto cat = scene::parse_category(f[0]);
    if (!cat) throw std::runtime_error("unknown label category '" + f[0] + "'");
    labels.push_back({*cat, std::stoi(f[1]), std::stoi(f[2]), std::stoi(f[3]), std::stoi(f[4])});
  }
  return labels;
}

void write_labels_csv(const std::filesystem::path& path, const std::vector<Label>& labels) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << "category,u_min,v_min,u_max,v_max\n";
  for (const auto& l : labels) {
    out << scene::category_name(l.category) << ',' << l.u_min << ',' << l.v_min << ',' << l.u_max
        << ',' << l.v_max << '\n';
  }
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open manifest '" + path.string() + "'");
  try {
    const Json doc = Json::parse(in);
    std::vector<ManifestEntry> out;
    for (const auto& e : doc.at("images")) {
      out.push_back({e.at("image").get<std::string>(), e.at("labels").get<std::string>()});
    }
    return out;
  } catch (const Json::exception& e) {
    throw std::runtime_error("malformed manifest '" + path.string() + "': " + e.what());
  }
}

void write_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries) {
  Json images = Json::array();
  for (const auto& e : entries) images.push_back({{"image", e.image}, {"labels", e.labels}});
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << Json{{"images", images}}.dump(2) << '\n';
}

}  // namespace packsim::imaging
