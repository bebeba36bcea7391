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

#ifndef PRIVSYNTH_IMAGING_PNG_IO_H_
#define PRIVSYNTH_IMAGING_PNG_IO_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "privsynth/imaging/raster.h"

namespace privsynth::imaging {

// Lossless 8-bit PNG. Gray/gray+alpha/RGB/RGBA/palette inputs decode to the
// nearest of Gray8, RGB8, RGBA8 (gray+alpha becomes RGBA8).
absl::StatusOr<std::vector<uint8_t>> EncodePng(const RasterImage& image);
absl::StatusOr<RasterImage> DecodePng(std::span<const uint8_t> bytes);

absl::Status WritePng(const std::filesystem::path& path,
                      const RasterImage& image);
absl::StatusOr<RasterImage> ReadPng(const std::filesystem::path& path);

// Masks are single-channel PNGs: 0 = false, 255 = true. On read any value
// >= 128 is true.
absl::Status WriteMaskPng(const std::filesystem::path& path,
                          const BitMask& mask);
absl::StatusOr<BitMask> ReadMaskPng(const std::filesystem::path& path);
RasterImage MaskToImage(const BitMask& mask);
BitMask ImageToMask(const RasterImage& image);

// Base64 of the PNG encoding, the wire form of image payloads.
absl::StatusOr<std::string> EncodePngBase64(const RasterImage& image);
absl::StatusOr<RasterImage> DecodePngBase64(std::string_view text);

absl::StatusOr<std::vector<uint8_t>> ReadFileBytes(
    const std::filesystem::path& path);
absl::Status WriteFileBytes(const std::filesystem::path& path,
                            std::span<const uint8_t> bytes);

}  // namespace privsynth::imaging

#endif  // PRIVSYNTH_IMAGING_PNG_IO_H_
