// Copyright 2026 The Privsynth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "privsynth/mock/world.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <deque>
#include <numbers>
#include <set>

#include "privsynth/common/seed.h"

namespace privsynth::mock {

using imaging::BitMask;
using imaging::PixelFormat;
using imaging::RasterImage;

namespace {

const std::set<std::string, std::less<>>& Stopwords() {
  static const auto* words = new std::set<std::string, std::less<>>{
      "a",  "an",   "the", "is",   "are", "of",    "in",      "on",
      "at", "with", "and", "to",   "by",  "for",   "photo",   "image",
      "picture", "some", "its", "their", "his", "her"};
  return *words;
}

Rgb HsvToRgb(double h, double s, double v) {
  const double c = v * s;
  const double hp = std::fmod(h, 360.0) / 60.0;
  const double x = c * (1.0 - std::fabs(std::fmod(hp, 2.0) - 1.0));
  Rgb rgb{0, 0, 0};
  switch (static_cast<int>(hp)) {
    case 0: rgb = {c, x, 0}; break;
    case 1: rgb = {x, c, 0}; break;
    case 2: rgb = {0, c, x}; break;
    case 3: rgb = {0, x, c}; break;
    case 4: rgb = {x, 0, c}; break;
    default: rgb = {c, 0, x}; break;
  }
  const double m = v - c;
  for (double& ch : rgb) ch = 255.0 * (ch + m);
  return rgb;
}

double UnitHash(uint64_t seed, int64_t x, int64_t y) {
  const uint64_t h = DeriveSeed(seed, {static_cast<uint64_t>(x),
                                       static_cast<uint64_t>(y)});
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double Smooth(double t) { return t * t * (3.0 - 2.0 * t); }

// Hashed lattice values covering a width x height field at one octave.
class LatticeTable {
 public:
  LatticeTable(uint64_t seed, int width, int height, double scale)
      : cols_(static_cast<int>(std::floor((width - 1) / scale)) + 2),
        rows_(static_cast<int>(std::floor((height - 1) / scale)) + 2),
        values_(static_cast<size_t>(cols_) * rows_) {
    for (int y = 0; y < rows_; ++y) {
      for (int x = 0; x < cols_; ++x) {
        values_[static_cast<size_t>(y) * cols_ + x] = UnitHash(seed, x, y);
      }
    }
  }

  double Sample(double x, double y) const {
    const double fx = std::floor(x);
    const double fy = std::floor(y);
    const int ix = static_cast<int>(fx);
    const int iy = static_cast<int>(fy);
    const double tx = Smooth(x - fx);
    const double ty = Smooth(y - fy);
    const double a = At(ix, iy);
    const double b = At(ix + 1, iy);
    const double c = At(ix, iy + 1);
    const double d = At(ix + 1, iy + 1);
    const double top = a + (b - a) * tx;
    const double bottom = c + (d - c) * tx;
    return top + (bottom - top) * ty;
  }

 private:
  double At(int x, int y) const {
    return values_[static_cast<size_t>(y) * cols_ + x];
  }

  int cols_;
  int rows_;
  std::vector<double> values_;
};

}  // namespace

uint8_t ClampByte(double v) {
  return static_cast<uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

std::vector<std::string> ContentWords(std::string_view text) {
  std::vector<std::string> words;
  std::string current;
  auto flush = [&] {
    if (!current.empty() && !Stopwords().contains(current)) {
      words.push_back(current);
    }
    current.clear();
  };
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      current.push_back(
          static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    } else {
      flush();
    }
  }
  flush();
  return words;
}

Rgb WordColor(std::string_view word) {
  const uint64_t h = MixBits(StableHash(word));
  const double hue = static_cast<double>(h % 3600) / 10.0;
  const double sat = 0.55 + 0.35 * static_cast<double>((h >> 16) % 100) / 100;
  const double val = 0.6 + 0.35 * static_cast<double>((h >> 32) % 100) / 100;
  return HsvToRgb(hue, sat, val);
}

Rgb ConceptColor(std::string_view text) {
  const auto words = ContentWords(text);
  if (words.empty()) return {128, 128, 128};
  Rgb sum{0, 0, 0};
  for (const auto& w : words) {
    const Rgb c = WordColor(w);
    for (int i = 0; i < 3; ++i) sum[i] += c[i];
  }
  for (double& v : sum) v /= static_cast<double>(words.size());
  return sum;
}

Rgb Mix(const Rgb& a, const Rgb& b, double t) {
  return {a[0] + (b[0] - a[0]) * t, a[1] + (b[1] - a[1]) * t,
          a[2] + (b[2] - a[2]) * t};
}

std::vector<double> ValueNoise(int width, int height, uint64_t seed,
                               double cell) {
  constexpr int kOctaves = 3;
  std::vector<LatticeTable> tables;
  std::vector<double> scales;
  double scale = cell;
  for (int octave = 0; octave < kOctaves; ++octave) {
    tables.emplace_back(DeriveSeed(seed, {static_cast<uint64_t>(octave)}),
                        width, height, scale);
    scales.push_back(scale);
    scale *= 0.5;
  }
  std::vector<double> out(static_cast<size_t>(width) * height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double v = 0.0;
      double amplitude = 0.5;
      double norm = 0.0;
      for (int octave = 0; octave < kOctaves; ++octave) {
        v += amplitude * tables[octave].Sample(x / scales[octave],
                                               y / scales[octave]);
        norm += amplitude;
        amplitude *= 0.5;
      }
      out[static_cast<size_t>(y) * width + x] = v / norm;
    }
  }
  return out;
}

RasterImage Texture(int width, int height, uint64_t seed, const Rgb& base,
                    double contrast) {
  const auto luma = ValueNoise(width, height, DeriveSeed(seed, {0}));
  std::array<std::vector<double>, 3> wobble;
  for (int c = 0; c < 3; ++c) {
    wobble[c] = ValueNoise(width, height,
                           DeriveSeed(seed, {static_cast<uint64_t>(c + 1)}), 8.0);
  }
  RasterImage image(width, height, PixelFormat::kRgb8);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const size_t i = static_cast<size_t>(y) * width + x;
      const double gain = 1.0 + contrast * (2.0 * luma[i] - 1.0);
      bool any = false;
      for (int c = 0; c < 3; ++c) {
        const double v =
            base[c] * gain + 24.0 * contrast * (2.0 * wobble[c][i] - 1.0);
        const uint8_t b = ClampByte(v);
        any = any || b != 0;
        image.set(x, y, c, b);
      }
      if (!any) image.set(x, y, 0, 1);
    }
  }
  return image;
}

BitMask BlobMask(int width, int height, uint64_t seed) {
  auto u = [seed](uint64_t k) {
    return static_cast<double>(DeriveSeed(seed, {k}) >> 11) * 0x1.0p-53;
  };
  const double cx = width * (0.42 + 0.16 * u(1));
  const double cy = height * (0.42 + 0.16 * u(2));
  const double rx = width * (0.26 + 0.1 * u(3));
  const double ry = height * (0.26 + 0.1 * u(4));
  const double power = 2.0 + 2.0 * u(5);
  const double phase1 = 2.0 * std::numbers::pi * u(6);
  const double phase2 = 2.0 * std::numbers::pi * u(7);
  BitMask mask(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double dx = (x + 0.5 - cx) / rx;
      const double dy = (y + 0.5 - cy) / ry;
      const double theta = std::atan2(dy, dx);
      const double radius = 1.0 + 0.12 * std::sin(3 * theta + phase1) +
                            0.06 * std::sin(5 * theta + phase2);
      const double r = std::pow(std::pow(std::fabs(dx), power) +
                                    std::pow(std::fabs(dy), power),
                                1.0 / power);
      mask.set(x, y, r <= radius);
    }
  }
  return mask;
}

BitMask EnclosedRegion(const BitMask& walls) {
  const int w = walls.width();
  const int h = walls.height();
  BitMask outside(w, h);
  std::deque<std::pair<int, int>> queue;
  auto seed = [&](int x, int y) {
    if (!walls.at(x, y) && !outside.at(x, y)) {
      outside.set(x, y, true);
      queue.emplace_back(x, y);
    }
  };
  for (int x = 0; x < w; ++x) {
    seed(x, 0);
    seed(x, h - 1);
  }
  for (int y = 0; y < h; ++y) {
    seed(0, y);
    seed(w - 1, y);
  }
  while (!queue.empty()) {
    auto [x, y] = queue.front();
    queue.pop_front();
    if (x > 0) seed(x - 1, y);
    if (x + 1 < w) seed(x + 1, y);
    if (y > 0) seed(x, y - 1);
    if (y + 1 < h) seed(x, y + 1);
  }
  return outside.Complement();
}

std::vector<BitMask> Components(const BitMask& mask) {
  const int w = mask.width();
  const int h = mask.height();
  BitMask seen(w, h);
  std::vector<BitMask> out;
  for (int sy = 0; sy < h; ++sy) {
    for (int sx = 0; sx < w; ++sx) {
      if (!mask.at(sx, sy) || seen.at(sx, sy)) continue;
      BitMask component(w, h);
      std::deque<std::pair<int, int>> queue{{sx, sy}};
      seen.set(sx, sy, true);
      while (!queue.empty()) {
        auto [x, y] = queue.front();
        queue.pop_front();
        component.set(x, y, true);
        const std::pair<int, int> next[] = {
            {x - 1, y}, {x + 1, y}, {x, y - 1}, {x, y + 1}};
        for (auto [nx, ny] : next) {
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          if (mask.at(nx, ny) && !seen.at(nx, ny)) {
            seen.set(nx, ny, true);
            queue.emplace_back(nx, ny);
          }
        }
      }
      out.push_back(std::move(component));
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const BitMask& a, const BitMask& b) {
                     return a.CountSet() > b.CountSet();
                   });
  return out;
}

}  // namespace privsynth::mock
