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

#ifndef PRIVSYNTH_IMAGING_RASTER_H_
#define PRIVSYNTH_IMAGING_RASTER_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"

namespace privsynth::imaging {

enum class PixelFormat { kGray8, kRgb8, kRgba8 };

constexpr int ChannelCount(PixelFormat format) {
  switch (format) {
    case PixelFormat::kGray8:
      return 1;
    case PixelFormat::kRgb8:
      return 3;
    case PixelFormat::kRgba8:
      return 4;
  }
  return 1;
}

// Row-major 8-bit raster. Width and height are always >= 1 and the sample
// buffer always holds width * height * channels bytes.
class RasterImage {
 public:
  // Zero-filled 1x1 gray image.
  RasterImage() : RasterImage(1, 1, PixelFormat::kGray8) {}

  // Constant-filled image. Dimensions below 1 are clamped to 1.
  RasterImage(int width, int height, PixelFormat format, uint8_t fill = 0);

  static absl::StatusOr<RasterImage> Create(int width, int height,
                                            PixelFormat format,
                                            std::vector<uint8_t> samples);

  int width() const { return width_; }
  int height() const { return height_; }
  PixelFormat format() const { return format_; }
  int channels() const { return ChannelCount(format_); }
  size_t pixel_count() const {
    return static_cast<size_t>(width_) * static_cast<size_t>(height_);
  }

  std::span<const uint8_t> samples() const { return samples_; }
  std::span<uint8_t> mutable_samples() { return samples_; }

  uint8_t at(int x, int y, int c = 0) const {
    return samples_[Offset(x, y) + static_cast<size_t>(c)];
  }
  void set(int x, int y, int c, uint8_t value) {
    samples_[Offset(x, y) + static_cast<size_t>(c)] = value;
  }
  // True when any channel of (x, y) is nonzero.
  bool IsNonZero(int x, int y) const;

  size_t Offset(int x, int y) const {
    return (static_cast<size_t>(y) * static_cast<size_t>(width_) +
            static_cast<size_t>(x)) *
           static_cast<size_t>(channels());
  }

  bool SameSize(int width, int height) const {
    return width_ == width && height_ == height;
  }

  friend bool operator==(const RasterImage&, const RasterImage&) = default;

 private:
  int width_;
  int height_;
  PixelFormat format_;
  std::vector<uint8_t> samples_;
};

// Per-pixel boolean mask, row-major.
class BitMask {
 public:
  BitMask() : BitMask(1, 1) {}
  BitMask(int width, int height, bool fill = false);

  static absl::StatusOr<BitMask> Create(int width, int height,
                                        std::vector<uint8_t> bits);

  int width() const { return width_; }
  int height() const { return height_; }
  size_t size() const { return bits_.size(); }

  bool at(int x, int y) const { return bits_[Index(x, y)] != 0; }
  void set(int x, int y, bool value) { bits_[Index(x, y)] = value ? 1 : 0; }
  bool at_index(size_t i) const { return bits_[i] != 0; }
  std::span<const uint8_t> bits() const { return bits_; }

  size_t CountSet() const;
  BitMask Complement() const;
  // Union with a mask of identical dimensions.
  absl::StatusOr<BitMask> Union(const BitMask& other) const;

  bool SameSize(int width, int height) const {
    return width_ == width && height_ == height;
  }

  friend bool operator==(const BitMask&, const BitMask&) = default;

 private:
  size_t Index(int x, int y) const {
    return static_cast<size_t>(y) * static_cast<size_t>(width_) +
           static_cast<size_t>(x);
  }

  int width_;
  int height_;
  std::vector<uint8_t> bits_;
};

// Mask of the nonzero pixels of an image.
BitMask NonZeroMask(const RasterImage& image);

}  // namespace privsynth::imaging

#endif  // PRIVSYNTH_IMAGING_RASTER_H_
