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

#include "privsynth/orchestrator/placement.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "absl/strings/str_cat.h"
#include "privsynth/common/status.h"

namespace privsynth::orchestrator {

using imaging::BitMask;
using imaging::PixelBox;
using imaging::RasterImage;

namespace {

std::pair<int, int> ScaledSize(double scale, double aspect, int canvas_height) {
  const int h = std::max(1, static_cast<int>(std::lround(scale * canvas_height)));
  const int w = std::max(1, static_cast<int>(std::lround(aspect * h)));
  return {w, h};
}

}  // namespace

absl::StatusOr<Placement> SamplePlacement(int canvas_width, int canvas_height,
                                          const BitMask& target_alpha,
                                          uint64_t seed,
                                          const PlacementOptions& options) {
  if (!(options.min_scale > 0 && options.min_scale <= options.max_scale)) {
    return MakeError(ErrorKind::kInvalidArgument,
                     absl::StrCat("bad scale range [", options.min_scale, ", ",
                                  options.max_scale, "]"));
  }
  const PixelBox box = imaging::TightBox(target_alpha);
  if (box.empty()) {
    return MakeError(ErrorKind::kPlacementInfeasible, "target alpha is empty");
  }
  const double aspect = static_cast<double>(box.w) / box.h;
  std::mt19937_64 rng(seed);

  double scale = 0.0;
  if (options.forced_scale.has_value()) {
    scale = *options.forced_scale;
  } else {
    const double fit = std::min(
        1.0, static_cast<double>(canvas_width) / (aspect * canvas_height));
    const double hi = std::min(options.max_scale, fit);
    if (hi < options.min_scale) {
      return MakeError(
          ErrorKind::kPlacementInfeasible,
          absl::StrCat("target with aspect ", aspect, " does not fit a ",
                       canvas_width, "x", canvas_height, " canvas at scale ",
                       options.min_scale));
    }
    scale = std::uniform_real_distribution<double>(options.min_scale, hi)(rng);
  }
  auto [w, h] = ScaledSize(scale, aspect, canvas_height);
  // Rounding can overshoot the cap by a pixel.
  if (!options.forced_scale.has_value()) w = std::min(w, canvas_width);
  if (w > canvas_width || h > canvas_height) {
    return MakeError(ErrorKind::kPlacementInfeasible,
                     absl::StrCat("scaled target ", w, "x", h,
                                  " exceeds the canvas ", canvas_width, "x",
                                  canvas_height));
  }

  int x = 0;
  int y = 0;
  if (options.forced_position.has_value()) {
    std::tie(x, y) = *options.forced_position;
    if (x < 0 || y < 0 || x + w > canvas_width || y + h > canvas_height) {
      return MakeError(ErrorKind::kPlacementInfeasible,
                       absl::StrCat("forced position (", x, ", ", y,
                                    ") leaves the canvas"));
    }
  } else {
    x = std::uniform_int_distribution<int>(0, canvas_width - w)(rng);
    y = std::uniform_int_distribution<int>(0, canvas_height - h)(rng);
  }

  Placement placement;
  placement.scale = scale;
  placement.slot = {x, y, w, h};
  placement.target_mask = BitMask(canvas_width, canvas_height);
  const BitMask scaled =
      imaging::ResizeNearest(imaging::Crop(target_alpha, box), w, h);
  for (int dy = 0; dy < h; ++dy) {
    for (int dx = 0; dx < w; ++dx) {
      if (scaled.at(dx, dy)) placement.target_mask.set(x + dx, y + dy, true);
    }
  }
  placement.bbox = imaging::TightBox(placement.target_mask);
  if (placement.bbox.empty()) {
    return MakeError(ErrorKind::kPlacementInfeasible,
                     "target vanished when scaled");
  }
  placement.background_mask = placement.target_mask.Complement();
  return placement;
}

RasterImage PlaceTarget(const RasterImage& target, const BitMask& target_alpha,
                        const Placement& placement, int canvas_width,
                        int canvas_height) {
  RasterImage canvas(canvas_width, canvas_height, target.format());
  const PixelBox box = imaging::TightBox(target_alpha);
  if (box.empty()) return canvas;
  const RasterImage scaled = imaging::ResizeNearest(
      imaging::Crop(target, box), placement.slot.w, placement.slot.h);
  for (int dy = 0; dy < placement.slot.h; ++dy) {
    for (int dx = 0; dx < placement.slot.w; ++dx) {
      const int cx = placement.slot.x + dx;
      const int cy = placement.slot.y + dy;
      if (!placement.target_mask.at(cx, cy)) continue;
      for (int c = 0; c < canvas.channels(); ++c) {
        canvas.set(cx, cy, c, scaled.at(dx, dy, c));
      }
    }
  }
  return canvas;
}

}  // namespace privsynth::orchestrator
