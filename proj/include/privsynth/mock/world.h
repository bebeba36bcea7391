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

#ifndef PRIVSYNTH_MOCK_WORLD_H_
#define PRIVSYNTH_MOCK_WORLD_H_

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "privsynth/imaging/raster.h"

// Procedural building blocks shared by the mock backends and the synthetic
// corpus: word colors, value-noise textures and blob shapes.
namespace privsynth::mock {

using Rgb = std::array<double, 3>;

// Lower-cased alphanumeric words minus stopwords ("a", "is", "the", ...).
std::vector<std::string> ContentWords(std::string_view text);

// A saturated color picked by hashing the word.
Rgb WordColor(std::string_view word);

// Mean color of the content words; mid gray when there are none.
Rgb ConceptColor(std::string_view text);

// Linear mix, weight `t` on `b`.
Rgb Mix(const Rgb& a, const Rgb& b, double t);

// Fractal value noise in [0, 1], three octaves starting at `cell` pixels.
std::vector<double> ValueNoise(int width, int height, uint64_t seed,
                               double cell = 16.0);

// RGB texture around `base`: brightness follows the noise, with a weaker
// independent wobble per channel. Every pixel has a nonzero channel.
imaging::RasterImage Texture(int width, int height, uint64_t seed,
                             const Rgb& base, double contrast = 0.5);

// A noisy superellipse roughly centered in the frame and covering about a
// third of it.
imaging::BitMask BlobMask(int width, int height, uint64_t seed);

// Pixels that no path of unmarked pixels connects to the border.
imaging::BitMask EnclosedRegion(const imaging::BitMask& walls);

// 4-connected components of a mask, largest first.
std::vector<imaging::BitMask> Components(const imaging::BitMask& mask);

uint8_t ClampByte(double v);

}  // namespace privsynth::mock

#endif  // PRIVSYNTH_MOCK_WORLD_H_
