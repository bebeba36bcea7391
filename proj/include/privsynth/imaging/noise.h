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

#ifndef PRIVSYNTH_IMAGING_NOISE_H_
#define PRIVSYNTH_IMAGING_NOISE_H_

#include <cstdint>

#include "absl/status/statusor.h"
#include "privsynth/imaging/raster.h"

namespace privsynth::imaging {

struct NoiseParams {
  // Standard deviation in 8-bit intensity units.
  double sigma = 0.0;
  uint64_t seed = 0;
  friend bool operator==(const NoiseParams&, const NoiseParams&) = default;
};

// Adds round(N(0, sigma^2)) to each color channel of every masked pixel and
// clamps to [0, 255]. Draws come from a generator seeded with params.seed and
// are consumed in row-major pixel order, channel order within a pixel, for
// masked pixels only. Alpha is left untouched. sigma == 0 is the identity.
absl::StatusOr<RasterImage> AddGaussianNoise(const RasterImage& image,
                                             const BitMask& mask,
                                             const NoiseParams& params);

}  // namespace privsynth::imaging

#endif  // PRIVSYNTH_IMAGING_NOISE_H_
