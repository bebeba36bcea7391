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

#include <algorithm>
#include <array>
#include <cmath>

#include "absl/strings/str_cat.h"
#include "privsynth/common/seed.h"
#include "privsynth/common/status.h"
#include "privsynth/imaging/ops.h"
#include "privsynth/mock/backends.h"

namespace privsynth::mock {

using imaging::BitMask;
using imaging::PixelFormat;
using imaging::RasterImage;

namespace {

constexpr double kEpsilon = 1e-3;

void DrawLine(RasterImage& image, int x0, int y0, int x1, int y1) {
  const int dx = std::abs(x1 - x0);
  const int dy = -std::abs(y1 - y0);
  const int sx = x0 < x1 ? 1 : -1;
  const int sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  while (true) {
    if (x0 >= 0 && y0 >= 0 && x0 < image.width() && y0 < image.height()) {
      image.set(x0, y0, 0, 255);
    }
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

// Otsu threshold of a 256-bin histogram.
int OtsuThreshold(const std::array<size_t, 256>& hist) {
  size_t total = 0;
  double sum = 0.0;
  for (int i = 0; i < 256; ++i) {
    total += hist[i];
    sum += static_cast<double>(i) * hist[i];
  }
  double sum_b = 0.0;
  size_t w_b = 0;
  double best = -1.0;
  int threshold = 0;
  for (int t = 0; t < 256; ++t) {
    w_b += hist[t];
    if (w_b == 0) continue;
    const size_t w_f = total - w_b;
    if (w_f == 0) break;
    sum_b += static_cast<double>(t) * hist[t];
    const double m_b = sum_b / w_b;
    const double m_f = (sum - sum_b) / w_f;
    const double between = static_cast<double>(w_b) * w_f * (m_b - m_f) * (m_b - m_f);
    if (between > best) {
      best = between;
      threshold = t;
    }
  }
  return threshold;
}

}  // namespace

std::vector<double> ColorHistogram(const RasterImage& image) {
  std::vector<double> hist(kHistogramBins, 0.0);
  const RasterImage rgb = ConvertFormat(image, PixelFormat::kRgb8);
  size_t n = 0;
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      if (!image.IsNonZero(x, y)) continue;
      const int bin = (rgb.at(x, y, 0) >> 6) * 16 + (rgb.at(x, y, 1) >> 6) * 4 +
                      (rgb.at(x, y, 2) >> 6);
      hist[bin] += 1.0;
      ++n;
    }
  }
  if (n > 0) {
    for (double& v : hist) v /= static_cast<double>(n);
  }
  return hist;
}

absl::StatusOr<metrics::EmbeddingVector> MockEmbeddingProvider::EmbedImage(
    const RasterImage& image) {
  std::vector<double> values = ColorHistogram(image);
  for (double& v : values) v += kEpsilon;
  return metrics::EmbeddingVector::Of(std::move(values), kEmbeddingProvider);
}

absl::StatusOr<metrics::EmbeddingVector> MockEmbeddingProvider::EmbedText(
    const std::string& text) {
  if (ContentWords(text).empty()) {
    return metrics::EmbeddingVector::Of(
        std::vector<double>(kHistogramBins, 1.0 / kHistogramBins),
        kEmbeddingProvider);
  }
  return EmbedImage(Texture(32, 32, StableHash(text), ConceptColor(text)));
}

absl::StatusOr<RasterImage> MockFeatureService::ExtractFeature(
    const RasterImage& segment, sanitizer::FeatureKind kind) {
  RasterImage out(segment.width(), segment.height(), PixelFormat::kGray8);
  const imaging::PixelBox box = imaging::TightBox(imaging::NonZeroMask(segment));
  if (box.empty()) return out;
  const int x0 = box.x;
  const int y0 = box.y;
  const int x1 = box.x + box.w - 1;
  const int y1 = box.y + box.h - 1;
  auto at = [&](double fx, double fy) {
    return std::pair<int, int>{x0 + static_cast<int>(std::lround(fx * (x1 - x0))),
                               y0 + static_cast<int>(std::lround(fy * (y1 - y0)))};
  };
  auto line = [&](std::pair<int, int> a, std::pair<int, int> b) {
    DrawLine(out, a.first, a.second, b.first, b.second);
  };
  switch (kind) {
    case sanitizer::FeatureKind::kLayoutBox:
      line({x0, y0}, {x1, y0});
      line({x1, y0}, {x1, y1});
      line({x1, y1}, {x0, y1});
      line({x0, y1}, {x0, y0});
      return out;
    case sanitizer::FeatureKind::kPose:
      line(at(0.5, 0.1), at(0.5, 0.6));    // spine
      line(at(0.15, 0.35), at(0.85, 0.35));  // arms
      line(at(0.5, 0.6), at(0.25, 1.0));   // legs
      line(at(0.5, 0.6), at(0.75, 1.0));
      line(at(0.4, 0.0), at(0.6, 0.0));    // head
      line(at(0.4, 0.0), at(0.5, 0.1));
      line(at(0.6, 0.0), at(0.5, 0.1));
      return out;
    case sanitizer::FeatureKind::kCanny:
      break;
  }
  return MakeError(ErrorKind::kUnsupportedFeature,
                   "canny edges are computed locally, not by the backend");
}

absl::StatusOr<sanitizer::ManifestEntry> MockSegmentationService::Segment(
    const RasterImage& image,
    const std::vector<std::string>& target_descriptions) {
  if (target_descriptions.empty()) {
    return MakeError(ErrorKind::kInvalidArgument,
                     "segment needs at least one target description");
  }
  const RasterImage rgb = ConvertFormat(image, PixelFormat::kRgb8);
  const int w = rgb.width();
  const int h = rgb.height();
  Rgb border{0, 0, 0};
  size_t border_n = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (x != 0 && y != 0 && x != w - 1 && y != h - 1) continue;
      for (int c = 0; c < 3; ++c) border[c] += rgb.at(x, y, c);
      ++border_n;
    }
  }
  for (double& v : border) v /= static_cast<double>(border_n);
  std::vector<uint8_t> distance(static_cast<size_t>(w) * h);
  std::array<size_t, 256> hist{};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double d2 = 0.0;
      for (int c = 0; c < 3; ++c) {
        const double d = rgb.at(x, y, c) - border[c];
        d2 += d * d;
      }
      const uint8_t q = ClampByte(std::sqrt(d2) * 255.0 / 441.7);
      distance[static_cast<size_t>(y) * w + x] = q;
      ++hist[q];
    }
  }
  const int threshold = OtsuThreshold(hist);
  BitMask foreground(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      foreground.set(x, y, distance[static_cast<size_t>(y) * w + x] > threshold);
    }
  }
  const std::vector<BitMask> components = Components(foreground);
  sanitizer::ManifestEntry entry;
  BitMask covered(w, h);
  for (size_t i = 0; i < target_descriptions.size() && i < components.size(); ++i) {
    entry.segments.push_back({sanitizer::SegmentRole::Target(static_cast<int>(i)),
                              components[i], 0.9});
    PRIVSYNTH_ASSIGN_OR_RETURN(covered, covered.Union(components[i]));
  }
  entry.segments.push_back(
      {sanitizer::SegmentRole::Background(), covered.Complement(), 0.9});
  return entry;
}

}  // namespace privsynth::mock
