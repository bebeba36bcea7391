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

#include "privsynth/imaging/noise.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "absl/strings/str_cat.h"
#include "privsynth/common/status.h"

namespace privsynth::imaging {

absl::StatusOr<RasterImage> AddGaussianNoise(const RasterImage& image,
                                             const BitMask& mask,
                                             const NoiseParams& params) {
  if (!mask.SameSize(image.width(), image.height())) {
    return MakeError(ErrorKind::kInvalidArgument,
                     absl::StrCat("add_gaussian_noise: image is ",
                                  image.width(), "x", image.height(),
                                  " but mask is ", mask.width(), "x",
                                  mask.height()));
  }
  if (!(params.sigma >= 0.0) || !std::isfinite(params.sigma)) {
    return MakeError(ErrorKind::kInvalidArgument,
                     absl::StrCat("noise sigma must be finite and >= 0, got ",
                                  params.sigma));
  }
  if (params.sigma == 0.0) return image;

  RasterImage out = image;
  auto samples = out.mutable_samples();
  const int channels = image.channels();
  const int color_channels = channels == 4 ? 3 : channels;
  std::mt19937_64 engine(params.seed);
  std::normal_distribution<double> normal(0.0, params.sigma);
  for (size_t i = 0; i < image.pixel_count(); ++i) {
    if (!mask.at_index(i)) continue;
    for (int c = 0; c < color_channels; ++c) {
      const size_t o = i * static_cast<size_t>(channels) + static_cast<size_t>(c);
      const long noisy = static_cast<long>(samples[o]) + std::lround(normal(engine));
      samples[o] = static_cast<uint8_t>(std::clamp(noisy, 0L, 255L));
    }
  }
  return out;
}

}  // namespace privsynth::imaging
