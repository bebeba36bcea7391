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

#ifndef PRIVSYNTH_IMAGING_CANNY_H_
#define PRIVSYNTH_IMAGING_CANNY_H_

#include "absl/status/statusor.h"
#include "privsynth/imaging/raster.h"

namespace privsynth::imaging {

struct CannyOptions {
  double low_threshold = 50.0;
  double high_threshold = 150.0;
  // Odd Gaussian kernel size; 1 disables blurring.
  int blur_size = 5;
  double blur_sigma = 1.4;
};

// Classical Canny edge map: Gaussian blur, 3x3 Sobel gradient (L2
// magnitude), non-maximum suppression along the quantized gradient
// direction, double threshold and 8-connected hysteresis. Thresholds apply
// to the unnormalized Sobel magnitude. Output is Gray8 with values in
// {0, 255}. Color input is converted to luma first.
absl::StatusOr<RasterImage> CannyEdges(const RasterImage& image,
                                       const CannyOptions& options = {});

inline absl::StatusOr<RasterImage> CannyEdges(const RasterImage& image,
                                              double low, double high) {
  CannyOptions options;
  options.low_threshold = low;
  options.high_threshold = high;
  return CannyEdges(image, options);
}

}  // namespace privsynth::imaging

#endif  // PRIVSYNTH_IMAGING_CANNY_H_
