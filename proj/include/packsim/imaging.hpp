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

#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "packsim/raster.hpp"
#include "packsim/scene.hpp"

namespace packsim::imaging {

using scene::ComponentCategory;
using Rng = std::mt19937_64;

/// Pixel box covering columns [u_min, u_max) and rows [v_min, v_max).
struct Label {
  ComponentCategory category = ComponentCategory::Bolt;
  int u_min = 0;
  int v_min = 0;
  int u_max = 0;
  int v_max = 0;

  int area() const { return (u_max - u_min) * (v_max - v_min); }
  bool operator==(const Label&) const = default;
};

struct LabeledImage {
  RasterImage image;
  std::vector<Label> labels;
  // Set when a crop removed every label the input carried.
  bool labels_cropped_out = false;
};

/// True when every label lies inside the image and covers at least one pixel.
bool labels_valid(const LabeledImage& li);

enum class Condition { Deformation, Contamination, Dust, Scratches };

std::string_view condition_name(Condition c);
std::optional<Condition> parse_condition(std::string_view name);

struct ConditionParams {
  double deformation_amplitude = 8.0;  // px
  double contamination_strength = 0.7;
  double dust_opacity = 0.18;
  int scratch_count = 12;
};

RasterImage apply_condition(const RasterImage& image, Condition condition, Rng& rng,
                            const ConditionParams& params = {});

enum class Flip { None, Horizontal, Vertical };

struct AugmentSpec {
  double brightness = 0.0;  // fraction of full scale, in [-1, 1]
  double contrast = 1.0;    // > 0, around mid-gray 128
  double crop = 1.0;        // kept fraction of each side, in (0, 1]
  Flip flip = Flip::None;
  double noise_sigma = 0.0;  // channel units
  int rotation = 0;          // degrees counter-clockwise: 0, 90, 180, 270
  std::uint64_t rng_seed = 0;
};

/// Throws std::invalid_argument when a field is out of range.
void validate_spec(const AugmentSpec& spec);

/// crop -> flip -> rotation -> brightness -> contrast -> noise.
LabeledImage augment(const LabeledImage& labeled, const AugmentSpec& spec);

// Individual geometric steps, exposed for testing.
LabeledImage crop(const LabeledImage& in, int x0, int y0, int w, int h);
LabeledImage flip(const LabeledImage& in, Flip f);
LabeledImage rotate90(const LabeledImage& in);

/// Brightness U[-0.25, 0.25], contrast U[0.7, 1.3], crop U[0.7, 1], flip and
/// rotation uniform over their options, sigma U[0, 12].
AugmentSpec sample_spec(Rng& rng);

inline constexpr int kDefaultVariants = 6;

std::vector<LabeledImage> expand_dataset(const LabeledImage& labeled, int n_variants, Rng& rng);

// --- I/O -------------------------------------------------------------------

RasterImage read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const RasterImage& image);
RasterImage read_ppm(const std::filesystem::path& path);
void write_ppm(const std::filesystem::path& path, const RasterImage& image);

/// Dispatches on the extension (.png, .ppm).
RasterImage read_image(const std::filesystem::path& path);
void write_image(const std::filesystem::path& path, const RasterImage& image);

/// Header: category,u_min,v_min,u_max,v_max
std::vector<Label> read_labels_csv(const std::filesystem::path& path);
void write_labels_csv(const std::filesystem::path& path, const std::vector<Label>& labels);

struct ManifestEntry {
  std::string image;
  std::string labels;
};

/// {"images": [{"image": "...", "labels": "..."}]} with paths relative to the manifest.
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const std::vector<ManifestEntry>& entries);

}  // namespace packsim::imaging
