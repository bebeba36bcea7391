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

#include "privsynth/imaging/ops.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"
#include "privsynth/common/status.h"

namespace privsynth::imaging {
namespace {

absl::Status CheckSameSize(const RasterImage& image, const BitMask& mask,
                           std::string_view what) {
  if (mask.SameSize(image.width(), image.height())) return absl::OkStatus();
  return MakeError(
      ErrorKind::kInvalidArgument,
      absl::StrCat(ToStd(absl::string_view(what.data(), what.size())),
                   ": image is ", image.width(), "x", image.height(),
                   " but mask is ", mask.width(), "x", mask.height()));
}

uint8_t Luma(uint8_t r, uint8_t g, uint8_t b) {
  const double y = 0.299 * r + 0.587 * g + 0.114 * b;
  return static_cast<uint8_t>(std::clamp(std::lround(y), 0L, 255L));
}

}  // namespace

RasterImage ToGrayscale(const RasterImage& image) {
  if (image.format() == PixelFormat::kGray8) return image;
  RasterImage out(image.width(), image.height(), PixelFormat::kGray8);
  const auto src = image.samples();
  auto dst = out.mutable_samples();
  const size_t stride = static_cast<size_t>(image.channels());
  for (size_t i = 0; i < image.pixel_count(); ++i) {
    const size_t o = i * stride;
    dst[i] = Luma(src[o], src[o + 1], src[o + 2]);
  }
  return out;
}

RasterImage ConvertFormat(const RasterImage& image, PixelFormat format) {
  if (image.format() == format) return image;
  if (format == PixelFormat::kGray8) return ToGrayscale(image);
  RasterImage out(image.width(), image.height(), format);
  const auto src = image.samples();
  auto dst = out.mutable_samples();
  const size_t in_c = static_cast<size_t>(image.channels());
  const size_t out_c = static_cast<size_t>(out.channels());
  for (size_t i = 0; i < image.pixel_count(); ++i) {
    for (size_t c = 0; c < 3; ++c) {
      dst[i * out_c + c] = in_c == 1 ? src[i] : src[i * in_c + c];
    }
    if (out_c == 4) dst[i * out_c + 3] = in_c == 4 ? src[i * in_c + 3] : 255;
  }
  return out;
}

absl::StatusOr<RasterImage> ApplyMask(const RasterImage& image,
                                      const BitMask& mask) {
  PRIVSYNTH_RETURN_IF_ERROR(CheckSameSize(image, mask, "apply_mask"));
  RasterImage out = image;
  auto dst = out.mutable_samples();
  const size_t c = static_cast<size_t>(image.channels());
  for (size_t i = 0; i < image.pixel_count(); ++i) {
    if (!mask.at_index(i)) std::fill_n(dst.begin() + i * c, c, 0);
  }
  return out;
}

absl::StatusOr<RasterImage> Composite(const RasterImage& fg,
                                      const BitMask& fg_mask,
                                      const RasterImage& bg) {
  PRIVSYNTH_RETURN_IF_ERROR(CheckSameSize(fg, fg_mask, "composite"));
  if (!bg.SameSize(fg.width(), fg.height()) || bg.format() != fg.format()) {
    return MakeError(ErrorKind::kInvalidArgument,
                     absl::StrCat("composite: foreground ", fg.width(), "x",
                                  fg.height(), "/", fg.channels(),
                                  "ch vs background ", bg.width(), "x",
                                  bg.height(), "/", bg.channels(), "ch"));
  }
  RasterImage out = bg;
  auto dst = out.mutable_samples();
  const auto src = fg.samples();
  const size_t c = static_cast<size_t>(fg.channels());
  for (size_t i = 0; i < fg.pixel_count(); ++i) {
    if (fg_mask.at_index(i)) {
      std::copy_n(src.begin() + i * c, c, dst.begin() + i * c);
    }
  }
  return out;
}

RasterImage ResizeNearest(const RasterImage& image, int width, int height) {
  RasterImage out(width, height, image.format());
  const int c = image.channels();
  for (int y = 0; y < out.height(); ++y) {
    const int sy = static_cast<int>(static_cast<int64_t>(y) * image.height() /
                                    out.height());
    for (int x = 0; x < out.width(); ++x) {
      const int sx = static_cast<int>(static_cast<int64_t>(x) * image.width() /
                                      out.width());
      for (int k = 0; k < c; ++k) out.set(x, y, k, image.at(sx, sy, k));
    }
  }
  return out;
}

BitMask ResizeNearest(const BitMask& mask, int width, int height) {
  BitMask out(width, height);
  for (int y = 0; y < out.height(); ++y) {
    const int sy = static_cast<int>(static_cast<int64_t>(y) * mask.height() /
                                    out.height());
    for (int x = 0; x < out.width(); ++x) {
      const int sx = static_cast<int>(static_cast<int64_t>(x) * mask.width() /
                                      out.width());
      out.set(x, y, mask.at(sx, sy));
    }
  }
  return out;
}

PixelBox TightBox(const BitMask& mask) {
  int min_x = mask.width(), min_y = mask.height(), max_x = -1, max_y = -1;
  for (int y = 0; y < mask.height(); ++y) {
    for (int x = 0; x < mask.width(); ++x) {
      if (!mask.at(x, y)) continue;
      min_x = std::min(min_x, x);
      max_x = std::max(max_x, x);
      min_y = std::min(min_y, y);
      max_y = std::max(max_y, y);
    }
  }
  if (max_x < 0) return PixelBox{};
  return PixelBox{min_x, min_y, max_x - min_x + 1, max_y - min_y + 1};
}

RasterImage Crop(const RasterImage& image, const PixelBox& box) {
  RasterImage out(box.w, box.h, image.format());
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      for (int k = 0; k < image.channels(); ++k) {
        out.set(x, y, k, image.at(box.x + x, box.y + y, k));
      }
    }
  }
  return out;
}

BitMask Crop(const BitMask& mask, const PixelBox& box) {
  BitMask out(box.w, box.h);
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      out.set(x, y, mask.at(box.x + x, box.y + y));
    }
  }
  return out;
}

}  // namespace privsynth::imaging
