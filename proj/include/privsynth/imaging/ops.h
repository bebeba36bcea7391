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

#ifndef PRIVSYNTH_IMAGING_OPS_H_
#define PRIVSYNTH_IMAGING_OPS_H_

#include "absl/status/statusor.h"
#include "privsynth/imaging/raster.h"

namespace privsynth::imaging {

// BT.601 luma, round(0.299 R + 0.587 G + 0.114 B). Alpha is ignored and gray
// input is returned unchanged.
RasterImage ToGrayscale(const RasterImage& image);

// Converts between formats. Gray expands to equal RGB channels; alpha is
// dropped or set opaque.
RasterImage ConvertFormat(const RasterImage& image, PixelFormat format);

// Keeps pixels where the mask is set and zeroes every channel elsewhere.
absl::StatusOr<RasterImage> ApplyMask(const RasterImage& image,
                                      const BitMask& mask);

// fg where fg_mask is set, bg elsewhere. fg and bg must share format.
absl::StatusOr<RasterImage> Composite(const RasterImage& fg,
                                      const BitMask& fg_mask,
                                      const RasterImage& bg);

// Nearest-neighbour resampling.
RasterImage ResizeNearest(const RasterImage& image, int width, int height);
BitMask ResizeNearest(const BitMask& mask, int width, int height);

// Tight bounding box of set bits, {x, y, w, h}; w == 0 when empty.
struct PixelBox {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;
  bool empty() const { return w == 0 || h == 0; }
  friend bool operator==(const PixelBox&, const PixelBox&) = default;
};
PixelBox TightBox(const BitMask& mask);

RasterImage Crop(const RasterImage& image, const PixelBox& box);
BitMask Crop(const BitMask& mask, const PixelBox& box);

}  // namespace privsynth::imaging

#endif  // PRIVSYNTH_IMAGING_OPS_H_
