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
#include <stdexcept>
#include <vector>

namespace packsim {

/// Row-major interleaved RGB, 8 bits per channel.
struct RasterImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  RasterImage() = default;
  RasterImage(int w, int h, std::uint8_t fill = 0)
      : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3, fill) {
    if (w < 0 || h < 0) throw std::invalid_argument("negative image size");
  }

  std::size_t index(int x, int y) const {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
            static_cast<std::size_t>(x)) * 3;
  }
  std::uint8_t* px(int x, int y) { return pixels.data() + index(x, y); }
  const std::uint8_t* px(int x, int y) const { return pixels.data() + index(x, y); }

  bool operator==(const RasterImage&) const = default;
};

}  // namespace packsim
