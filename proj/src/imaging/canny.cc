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

#include "privsynth/imaging/canny.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "absl/strings/str_cat.h"
#include "privsynth/common/status.h"
#include "privsynth/imaging/ops.h"

namespace privsynth::imaging {
namespace {

// Float plane with replicate-border reads.
class Plane {
 public:
  Plane(int width, int height)
      : width_(width),
        height_(height),
        values_(static_cast<size_t>(width) * static_cast<size_t>(height)) {}

  int width() const { return width_; }
  int height() const { return height_; }

  float& operator()(int x, int y) {
    return values_[static_cast<size_t>(y) * static_cast<size_t>(width_) +
                   static_cast<size_t>(x)];
  }
  float operator()(int x, int y) const {
    return values_[static_cast<size_t>(y) * static_cast<size_t>(width_) +
                   static_cast<size_t>(x)];
  }
  float Clamped(int x, int y) const {
    return (*this)(std::clamp(x, 0, width_ - 1), std::clamp(y, 0, height_ - 1));
  }
  // Zero outside the plane.
  float OrZero(int x, int y) const {
    if (x < 0 || y < 0 || x >= width_ || y >= height_) return 0.0f;
    return (*this)(x, y);
  }

 private:
  int width_;
  int height_;
  std::vector<float> values_;
};

std::vector<float> GaussianKernel(int size, double sigma) {
  std::vector<float> kernel(static_cast<size_t>(size));
  const int half = size / 2;
  double sum = 0.0;
  for (int i = 0; i < size; ++i) {
    const double d = i - half;
    const double v = std::exp(-(d * d) / (2.0 * sigma * sigma));
    kernel[static_cast<size_t>(i)] = static_cast<float>(v);
    sum += v;
  }
  for (auto& v : kernel) v = static_cast<float>(v / sum);
  return kernel;
}

Plane Blur(const Plane& in, int size, double sigma) {
  if (size <= 1) return in;
  const auto kernel = GaussianKernel(size, sigma);
  const int half = size / 2;
  Plane tmp(in.width(), in.height());
  for (int y = 0; y < in.height(); ++y) {
    for (int x = 0; x < in.width(); ++x) {
      float acc = 0.0f;
      for (int k = -half; k <= half; ++k) {
        acc += kernel[static_cast<size_t>(k + half)] * in.Clamped(x + k, y);
      }
      tmp(x, y) = acc;
    }
  }
  Plane out(in.width(), in.height());
  for (int y = 0; y < in.height(); ++y) {
    for (int x = 0; x < in.width(); ++x) {
      float acc = 0.0f;
      for (int k = -half; k <= half; ++k) {
        acc += kernel[static_cast<size_t>(k + half)] * tmp.Clamped(x, y + k);
      }
      out(x, y) = acc;
    }
  }
  return out;
}

// 0: horizontal gradient, 1: 45 deg, 2: vertical, 3: 135 deg (y down).
int QuantizeDirection(float gx, float gy) {
  double angle = std::atan2(gy, gx) * 180.0 / std::numbers::pi;
  if (angle < 0) angle += 180.0;
  if (angle < 22.5 || angle >= 157.5) return 0;
  if (angle < 67.5) return 1;
  if (angle < 112.5) return 2;
  return 3;
}

}  // namespace

absl::StatusOr<RasterImage> CannyEdges(const RasterImage& image,
                                       const CannyOptions& options) {
  if (options.low_threshold < 0 ||
      options.low_threshold > options.high_threshold) {
    return MakeError(ErrorKind::kInvalidArgument,
                     absl::StrCat("canny thresholds must satisfy 0 <= low <= "
                                  "high, got low=",
                                  options.low_threshold,
                                  " high=", options.high_threshold));
  }
  if (options.blur_size < 1 || options.blur_size % 2 == 0 ||
      options.blur_sigma <= 0) {
    return MakeError(ErrorKind::kInvalidArgument,
                     absl::StrCat("canny blur must be an odd size >= 1 with "
                                  "positive sigma, got size=",
                                  options.blur_size,
                                  " sigma=", options.blur_sigma));
  }

  const RasterImage gray = ToGrayscale(image);
  const int w = gray.width();
  const int h = gray.height();
  Plane source(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) source(x, y) = gray.at(x, y);
  }
  const Plane blurred = Blur(source, options.blur_size, options.blur_sigma);

  Plane magnitude(w, h);
  std::vector<uint8_t> direction(static_cast<size_t>(w) *
                                 static_cast<size_t>(h));
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const float gx = (blurred.Clamped(x + 1, y - 1) +
                        2 * blurred.Clamped(x + 1, y) +
                        blurred.Clamped(x + 1, y + 1)) -
                       (blurred.Clamped(x - 1, y - 1) +
                        2 * blurred.Clamped(x - 1, y) +
                        blurred.Clamped(x - 1, y + 1));
      const float gy = (blurred.Clamped(x - 1, y + 1) +
                        2 * blurred.Clamped(x, y + 1) +
                        blurred.Clamped(x + 1, y + 1)) -
                       (blurred.Clamped(x - 1, y - 1) +
                        2 * blurred.Clamped(x, y - 1) +
                        blurred.Clamped(x + 1, y - 1));
      magnitude(x, y) = std::sqrt(gx * gx + gy * gy);
      direction[static_cast<size_t>(y) * static_cast<size_t>(w) +
                static_cast<size_t>(x)] =
          static_cast<uint8_t>(QuantizeDirection(gx, gy));
    }
  }

  // Non-maximum suppression; strict on the leading neighbour so plateaus
  // two pixels wide keep exactly one pixel.
  constexpr int kOffsets[4][2] = {{1, 0}, {1, 1}, {0, 1}, {-1, 1}};
  const auto low = static_cast<float>(options.low_threshold);
  const auto high = static_cast<float>(options.high_threshold);
  // 0 = none, 1 = weak, 2 = strong.
  std::vector<uint8_t> klass(static_cast<size_t>(w) * static_cast<size_t>(h),
                             0);
  std::vector<int> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const float m = magnitude(x, y);
      if (m <= low) continue;
      const size_t idx =
          static_cast<size_t>(y) * static_cast<size_t>(w) +
          static_cast<size_t>(x);
      const int* d = kOffsets[direction[idx]];
      const float ahead = magnitude.OrZero(x + d[0], y + d[1]);
      const float behind = magnitude.OrZero(x - d[0], y - d[1]);
      if (!(m > behind && m >= ahead)) continue;
      if (m > high) {
        klass[idx] = 2;
        stack.push_back(static_cast<int>(idx));
      } else {
        klass[idx] = 1;
      }
    }
  }

  while (!stack.empty()) {
    const int idx = stack.back();
    stack.pop_back();
    const int x = idx % w;
    const int y = idx / w;
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dx = -1; dx <= 1; ++dx) {
        const int nx = x + dx;
        const int ny = y + dy;
        if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
        const size_t n = static_cast<size_t>(ny) * static_cast<size_t>(w) +
                         static_cast<size_t>(nx);
        if (klass[n] == 1) {
          klass[n] = 2;
          stack.push_back(static_cast<int>(n));
        }
      }
    }
  }

  RasterImage edges(w, h, PixelFormat::kGray8);
  auto dst = edges.mutable_samples();
  for (size_t i = 0; i < klass.size(); ++i) dst[i] = klass[i] == 2 ? 255 : 0;
  return edges;
}

}  // namespace privsynth::imaging
