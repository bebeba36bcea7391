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

#include "privsynth/imaging/raster.h"

#include <algorithm>
#include <utility>

#include "absl/strings/str_cat.h"
#include "privsynth/common/status.h"

namespace privsynth::imaging {

RasterImage::RasterImage(int width, int height, PixelFormat format,
                         uint8_t fill)
    : width_(std::max(width, 1)),
      height_(std::max(height, 1)),
      format_(format),
      samples_(pixel_count() * static_cast<size_t>(ChannelCount(format)),
               fill) {}

absl::StatusOr<RasterImage> RasterImage::Create(int width, int height,
                                                PixelFormat format,
                                                std::vector<uint8_t> samples) {
  if (width < 1 || height < 1) {
    return MakeError(ErrorKind::kInvalidArgument,
                     absl::StrCat("image dimensions must be >= 1, got ", width,
                                  "x", height));
  }
  const size_t expected = static_cast<size_t>(width) *
                          static_cast<size_t>(height) *
                          static_cast<size_t>(ChannelCount(format));
  if (samples.size() != expected) {
    return MakeError(ErrorKind::kInvalidArgument,
                     absl::StrCat("sample buffer holds ", samples.size(),
                                  " bytes, expected ", expected));
  }
  RasterImage image(width, height, format);
  image.samples_ = std::move(samples);
  return image;
}

bool RasterImage::IsNonZero(int x, int y) const {
  const size_t offset = Offset(x, y);
  for (int c = 0; c < channels(); ++c) {
    if (samples_[offset + static_cast<size_t>(c)] != 0) return true;
  }
  return false;
}

BitMask::BitMask(int width, int height, bool fill)
    : width_(std::max(width, 1)),
      height_(std::max(height, 1)),
      bits_(static_cast<size_t>(width_) * static_cast<size_t>(height_),
            fill ? 1 : 0) {}

absl::StatusOr<BitMask> BitMask::Create(int width, int height,
                                        std::vector<uint8_t> bits) {
  if (width < 1 || height < 1) {
    return MakeError(ErrorKind::kInvalidArgument,
                     absl::StrCat("mask dimensions must be >= 1, got ", width,
                                  "x", height));
  }
  if (bits.size() != static_cast<size_t>(width) * static_cast<size_t>(height)) {
    return MakeError(ErrorKind::kInvalidArgument,
                     absl::StrCat("mask holds ", bits.size(), " bits, expected ",
                                  width * height));
  }
  BitMask mask(width, height);
  for (auto& b : bits) b = b ? 1 : 0;
  mask.bits_ = std::move(bits);
  return mask;
}

size_t BitMask::CountSet() const {
  return static_cast<size_t>(std::count(bits_.begin(), bits_.end(), 1));
}

BitMask BitMask::Complement() const {
  BitMask out = *this;
  for (auto& b : out.bits_) b = b ? 0 : 1;
  return out;
}

absl::StatusOr<BitMask> BitMask::Union(const BitMask& other) const {
  if (!other.SameSize(width_, height_)) {
    return MakeError(ErrorKind::kInvalidArgument,
                     absl::StrCat("mask union of ", width_, "x", height_,
                                  " with ", other.width_, "x", other.height_));
  }
  BitMask out = *this;
  for (size_t i = 0; i < bits_.size(); ++i) out.bits_[i] |= other.bits_[i];
  return out;
}

BitMask NonZeroMask(const RasterImage& image) {
  BitMask mask(image.width(), image.height());
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      mask.set(x, y, image.IsNonZero(x, y));
    }
  }
  return mask;
}

}  // namespace privsynth::imaging
