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

#ifndef PRIVSYNTH_ORCHESTRATOR_PLACEMENT_H_
#define PRIVSYNTH_ORCHESTRATOR_PLACEMENT_H_

#include <cstdint>
#include <optional>
#include <utility>

#include "absl/status/statusor.h"
#include "privsynth/imaging/ops.h"
#include "privsynth/imaging/raster.h"

namespace privsynth::orchestrator {

struct PlacementOptions {
  // Target height as a fraction of canvas height.
  double min_scale = 0.2;
  double max_scale = 0.6;
  // Overrides for tests and fixed layouts.
  std::optional<double> forced_scale;
  std::optional<std::pair<int, int>> forced_position;
};

struct Placement {
  // Tight box of the placed alpha, in canvas pixels.
  imaging::PixelBox bbox;
  double scale = 0.0;
  // Where the scaled target's crop lands (top-left) and its size.
  imaging::PixelBox slot;
  // Placed target alpha on the canvas, and its complement.
  imaging::BitMask target_mask;
  imaging::BitMask background_mask;
};

// Crops the alpha to its tight box, scales it (nearest) to a uniformly drawn
// fraction of the canvas height, capped so it fits, and drops it at a
// uniform position that keeps it fully inside the canvas.
absl::StatusOr<Placement> SamplePlacement(int canvas_width, int canvas_height,
                                          const imaging::BitMask& target_alpha,
                                          uint64_t seed,
                                          const PlacementOptions& options = {});

// Pastes the target's alpha region into the placement slot of a zero canvas
// of the target's pixel format.
imaging::RasterImage PlaceTarget(const imaging::RasterImage& target,
                                 const imaging::BitMask& target_alpha,
                                 const Placement& placement, int canvas_width,
                                 int canvas_height);

}  // namespace privsynth::orchestrator

#endif  // PRIVSYNTH_ORCHESTRATOR_PLACEMENT_H_
