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

#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>

#include "packsim/imaging.hpp"
#include "test_support.hpp"

using namespace packsim;
using namespace packsim::imaging;
namespace fs = std::filesystem;

namespace {

using Pixel = std::array<std::uint8_t, 3>;

RasterImage random_image(gen::Rng& rng, int w, int h) {
  RasterImage img(w, h);
  for (auto& p : img.pixels) p = std::uint8_t(gen::uniform(rng, 0, 255.999));
  return img;
}

LabeledImage random_labeled(gen::Rng& rng, int w, int h, int n_labels) {
  LabeledImage li;
  li.image = random_image(rng, w, h);
  const ComponentCategory cats[] = {ComponentCategory::Bolt, ComponentCategory::Cable,
                                    ComponentCategory::Module};
  for (int i = 0; i < n_labels; ++i) {
    Label l;
    l.category = cats[i % 3];
    l.u_min = int(gen::uniform(rng, 0, w - 2));
    l.v_min = int(gen::uniform(rng, 0, h - 2));
    l.u_max = l.u_min + 1 + int(gen::uniform(rng, 0, w - l.u_min - 1));
    l.v_max = l.v_min + 1 + int(gen::uniform(rng, 0, h - l.v_min - 1));
    li.labels.push_back(l);
  }
  return li;
}

std::vector<Pixel> pixels_in(const RasterImage& img, const Label& l) {
  std::vector<Pixel> out;
  for (int y = l.v_min; y < l.v_max; ++y) {
    for (int x = l.u_min; x < l.u_max; ++x) {
      const auto* p = img.px(x, y);
      out.push_back({p[0], p[1], p[2]});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

void expect_label_content_preserved(const LabeledImage& in, const LabeledImage& out) {
  ASSERT_EQ(in.labels.size(), out.labels.size());
  for (std::size_t i = 0; i < in.labels.size(); ++i) {
    EXPECT_EQ(in.labels[i].category, out.labels[i].category);
    EXPECT_EQ(in.labels[i].area(), out.labels[i].area());
    EXPECT_EQ(pixels_in(in.image, in.labels[i]), pixels_in(out.image, out.labels[i]));
  }
}

double green_excess(const RasterImage& img) {
  double s = 0.0;
  for (std::size_t i = 0; i < img.pixels.size(); i += 3) {
    s += img.pixels[i + 1] - 0.5 * (img.pixels[i] + img.pixels[i + 2]);
  }
  return s / double(img.width * img.height);
}

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("packsim_imaging_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST(Augment, IdentitySpecIsBitExact) {
  gen::Rng rng(41);
  const auto li = random_labeled(rng, 37, 23, 4);
  const auto out = augment(li, AugmentSpec{});
  EXPECT_EQ(out.image, li.image);
  EXPECT_EQ(out.labels, li.labels);
  EXPECT_FALSE(out.labels_cropped_out);
}

TEST(Augment, FlipsAndHalfTurnAreInvolutions) {
  gen::Rng rng(42);
  const auto li = random_labeled(rng, 31, 17, 5);
  for (Flip f : {Flip::Horizontal, Flip::Vertical}) {
    const auto once = flip(li, f);
    EXPECT_NE(once.image, li.image);
    const auto twice = flip(once, f);
    EXPECT_EQ(twice.image, li.image);
    EXPECT_EQ(twice.labels, li.labels);
  }
  AugmentSpec half;
  half.rotation = 180;
  const auto r = augment(augment(li, half), half);
  EXPECT_EQ(r.image, li.image);
  EXPECT_EQ(r.labels, li.labels);
}

TEST(Augment, QuarterTurnIsPixelPermutation) {
  gen::Rng rng(43);
  const auto li = random_labeled(rng, 13, 7, 3);
  const auto r = rotate90(li);
  ASSERT_EQ(r.image.width, 7);
  ASSERT_EQ(r.image.height, 13);
  const int w = li.image.width;
  for (int y = 0; y < li.image.height; ++y) {
    for (int x = 0; x < w; ++x) {
      // Counter-clockwise: (x, y) -> (y, w - 1 - x).
      EXPECT_TRUE(std::equal(li.image.px(x, y), li.image.px(x, y) + 3, r.image.px(y, w - 1 - x)));
    }
  }
  auto four = li;
  for (int i = 0; i < 4; ++i) four = rotate90(four);
  EXPECT_EQ(four.image, li.image);
  EXPECT_EQ(four.labels, li.labels);
}

TEST(Augment, GeometricStepsKeepLabelContent) {
  gen::Rng rng(44);
  for (int trial = 0; trial < 200; ++trial) {
    const auto li = random_labeled(rng, 20 + trial % 17, 12 + trial % 9, 1 + trial % 4);
    AugmentSpec spec;
    spec.flip = Flip(trial % 3);
    spec.rotation = 90 * (trial % 4);
    spec.rng_seed = std::uint64_t(trial);
    const auto out = augment(li, spec);
    EXPECT_TRUE(labels_valid(out));
    expect_label_content_preserved(li, out);
  }
}

TEST(Augment, CropClipsLabels) {
  gen::Rng rng(45);
  for (int trial = 0; trial < 200; ++trial) {
    const auto li = random_labeled(rng, 40, 30, 4);
    const int x0 = int(gen::uniform(rng, 0, 20)), y0 = int(gen::uniform(rng, 0, 15));
    const int w = 1 + int(gen::uniform(rng, 0, 40 - x0 - 1)), h = 1 + int(gen::uniform(rng, 0, 30 - y0 - 1));
    const auto out = crop(li, x0, y0, w, h);
    EXPECT_TRUE(labels_valid(out));
    std::size_t kept = 0;
    for (const auto& l : li.labels) {
      Label c = l;
      c.u_min = std::max(l.u_min, x0) - x0;
      c.v_min = std::max(l.v_min, y0) - y0;
      c.u_max = std::min(l.u_max, x0 + w) - x0;
      c.v_max = std::min(l.v_max, y0 + h) - y0;
      if (c.u_max <= c.u_min || c.v_max <= c.v_min) continue;
      ASSERT_LT(kept, out.labels.size());
      EXPECT_EQ(out.labels[kept], c);
      Label src = c;
      src.u_min += x0;
      src.u_max += x0;
      src.v_min += y0;
      src.v_max += y0;
      EXPECT_EQ(pixels_in(li.image, src), pixels_in(out.image, c));
      ++kept;
    }
    EXPECT_EQ(kept, out.labels.size());
    EXPECT_EQ(out.labels_cropped_out, kept == 0);
  }
  EXPECT_THROW(crop(random_labeled(rng, 10, 10, 1), 5, 5, 6, 2), std::invalid_argument);
}

TEST(Augment, PhotometricStepsLeaveGeometryAlone) {
  gen::Rng rng(46);
  const auto li = random_labeled(rng, 50, 40, 3);
  AugmentSpec spec;
  spec.brightness = 0.1;
  spec.contrast = 1.2;
  spec.noise_sigma = 5.0;
  spec.rng_seed = 3;
  const auto out = augment(li, spec);
  EXPECT_EQ(out.labels, li.labels);
  EXPECT_EQ(out.image.width, li.image.width);
  EXPECT_NE(out.image, li.image);
  EXPECT_EQ(augment(li, spec).image, out.image);

  // Brightness alone on mid-gray: +0.1 * 255 = 25.5 rounds to even.
  LabeledImage gray;
  gray.image = RasterImage(4, 4, 100);
  AugmentSpec b;
  b.brightness = 0.1;
  for (auto v : augment(gray, b).image.pixels) EXPECT_EQ(v, 126);
}

TEST(Augment, SpecValidation) {
  auto bad = [](auto edit) {
    AugmentSpec s;
    edit(s);
    EXPECT_THROW(validate_spec(s), std::invalid_argument);
  };
  bad([](AugmentSpec& s) { s.brightness = 1.5; });
  bad([](AugmentSpec& s) { s.contrast = 0.0; });
  bad([](AugmentSpec& s) { s.crop = 0.0; });
  bad([](AugmentSpec& s) { s.crop = 1.2; });
  bad([](AugmentSpec& s) { s.noise_sigma = -1.0; });
  bad([](AugmentSpec& s) { s.rotation = 45; });
  gen::Rng rng(47);
  for (int i = 0; i < 1000; ++i) EXPECT_NO_THROW(validate_spec(sample_spec(rng)));
}

TEST(Dataset, DefaultExpansionAndSweep) {
  EXPECT_EQ(kDefaultVariants, 6);
  gen::Rng rng(48);
  std::size_t produced = 0;
  for (int i = 0; i < 120; ++i) {
    const auto li = random_labeled(rng, 48, 36, 1 + i % 3);
    const auto out = expand_dataset(li, kDefaultVariants, rng);
    ASSERT_EQ(out.size(), 6u);
    for (const auto& o : out) {
      EXPECT_TRUE(labels_valid(o));
      if (!o.labels_cropped_out) {
        EXPECT_FALSE(o.labels.empty());
      }
    }
    produced += out.size();
  }
  EXPECT_EQ(produced, 720u);
  EXPECT_THROW(expand_dataset(random_labeled(rng, 8, 8, 1), 0, rng), std::invalid_argument);
}

TEST(Dataset, DeterministicForSeed) {
  gen::Rng rng(49);
  const auto li = random_labeled(rng, 30, 20, 2);
  Rng a(5), b(5);
  const auto x = expand_dataset(li, 6, a);
  const auto y = expand_dataset(li, 6, b);
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_EQ(x[i].image, y[i].image);
    EXPECT_EQ(x[i].labels, y[i].labels);
  }
}

TEST(Conditions, ZeroParametersAreIdentity) {
  gen::Rng g(50);
  const auto img = random_image(g, 40, 30);
  ConditionParams zero{0.0, 0.0, 0.0, 0};
  for (Condition c : {Condition::Deformation, Condition::Contamination, Condition::Dust, Condition::Scratches}) {
    Rng rng(1);
    EXPECT_EQ(apply_condition(img, c, rng, zero), img) << condition_name(c);
  }
}

TEST(Conditions, DeterministicAndVisible) {
  gen::Rng g(51);
  const auto img = random_image(g, 64, 48);
  for (Condition c : {Condition::Deformation, Condition::Contamination, Condition::Dust, Condition::Scratches}) {
    Rng a(9), b(9);
    const auto x = apply_condition(img, c, a);
    EXPECT_EQ(x, apply_condition(img, c, b));
    EXPECT_NE(x, img) << condition_name(c);
    EXPECT_EQ(x.width, img.width);
    EXPECT_EQ(x.height, img.height);
    EXPECT_EQ(parse_condition(condition_name(c)), c);
  }
  EXPECT_FALSE(parse_condition("rust").has_value());
}

TEST(Conditions, ContaminationTintsGreen) {
  const RasterImage gray(80, 60, 128);
  Rng rng(2);
  const auto out = apply_condition(gray, Condition::Contamination, rng);
  EXPECT_NEAR(green_excess(gray), 0.0, 1e-12);
  EXPECT_GT(green_excess(out), 5.0);
}

TEST(Conditions, DustBrightensDarkImage) {
  const RasterImage dark(40, 30, 20);
  Rng rng(3);
  const auto out = apply_condition(dark, Condition::Dust, rng);
  double mean = 0.0;
  for (auto v : out.pixels) mean += v;
  EXPECT_GT(mean / double(out.pixels.size()), 40.0);
}

TEST(Io, PngAndPpmRoundTrip) {
  const fs::path dir = scratch_dir("io");
  gen::Rng rng(52);
  const auto img = random_image(rng, 33, 21);
  write_image(dir / "a.png", img);
  write_image(dir / "a.ppm", img);
  EXPECT_EQ(read_image(dir / "a.png"), img);
  EXPECT_EQ(read_image(dir / "a.ppm"), img);
  EXPECT_THROW(write_image(dir / "a.bmp", img), std::runtime_error);
  EXPECT_ANY_THROW(read_image(dir / "missing.png"));
  fs::remove_all(dir);
}

TEST(Io, LabelsAndManifestRoundTrip) {
  const fs::path dir = scratch_dir("labels");
  gen::Rng rng(53);
  const auto li = random_labeled(rng, 50, 50, 6);
  write_labels_csv(dir / "l.csv", li.labels);
  EXPECT_EQ(read_labels_csv(dir / "l.csv"), li.labels);
  std::ifstream in(dir / "l.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "category,u_min,v_min,u_max,v_max");

  const std::vector<ManifestEntry> entries{{"a.png", "a.csv"}, {"b_v1.png", "b_v1.csv"}};
  write_manifest(dir / "manifest.json", entries);
  const auto back = read_manifest(dir / "manifest.json");
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[1].image, "b_v1.png");
  EXPECT_EQ(back[1].labels, "b_v1.csv");
  fs::remove_all(dir);
}
