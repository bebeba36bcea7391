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

#include "privsynth/imaging/png_io.h"

#include <png.h>

#include <cstring>
#include <fstream>
#include <iterator>

#include "absl/strings/escaping.h"
#include "absl/strings/str_cat.h"
#include "privsynth/common/status.h"
#include "privsynth/imaging/ops.h"

namespace privsynth::imaging {
namespace {

png_uint_32 PngFormatFor(PixelFormat format) {
  switch (format) {
    case PixelFormat::kGray8:
      return PNG_FORMAT_GRAY;
    case PixelFormat::kRgb8:
      return PNG_FORMAT_RGB;
    case PixelFormat::kRgba8:
      return PNG_FORMAT_RGBA;
  }
  return PNG_FORMAT_GRAY;
}

}  // namespace

absl::StatusOr<std::vector<uint8_t>> EncodePng(const RasterImage& image) {
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(image.width());
  png.height = static_cast<png_uint_32>(image.height());
  png.format = PngFormatFor(image.format());

  png_alloc_size_t size = 0;
  const auto* buffer = image.samples().data();
  if (!png_image_write_to_memory(&png, nullptr, &size, 0, buffer, 0,
                                 nullptr)) {
    std::string message = png.message;
    png_image_free(&png);
    return MakeError(ErrorKind::kIo, absl::StrCat("png encode: ", message));
  }
  std::vector<uint8_t> out(size);
  if (!png_image_write_to_memory(&png, out.data(), &size, 0, buffer, 0,
                                 nullptr)) {
    std::string message = png.message;
    png_image_free(&png);
    return MakeError(ErrorKind::kIo, absl::StrCat("png encode: ", message));
  }
  out.resize(size);
  return out;
}

absl::StatusOr<RasterImage> DecodePng(std::span<const uint8_t> bytes) {
  png_image png;
  std::memset(&png, 0, sizeof(png));
  png.version = PNG_IMAGE_VERSION;
  if (bytes.empty() ||
      !png_image_begin_read_from_memory(&png, bytes.data(), bytes.size())) {
    std::string message = bytes.empty() ? "empty buffer" : png.message;
    png_image_free(&png);
    return MakeError(ErrorKind::kInvalidArgument,
                     absl::StrCat("png decode: ", message));
  }
  PixelFormat format = PixelFormat::kGray8;
  if (png.format & PNG_FORMAT_FLAG_ALPHA) {
    format = PixelFormat::kRgba8;
  } else if (png.format & PNG_FORMAT_FLAG_COLOR) {
    format = PixelFormat::kRgb8;
  }
  png.format = PngFormatFor(format);
  const int width = static_cast<int>(png.width);
  const int height = static_cast<int>(png.height);
  std::vector<uint8_t> samples(PNG_IMAGE_SIZE(png));
  if (!png_image_finish_read(&png, nullptr, samples.data(), 0, nullptr)) {
    std::string message = png.message;
    png_image_free(&png);
    return MakeError(ErrorKind::kInvalidArgument,
                     absl::StrCat("png decode: ", message));
  }
  return RasterImage::Create(width, height, format, std::move(samples));
}

absl::StatusOr<std::vector<uint8_t>> ReadFileBytes(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return MakeError(ErrorKind::kIo,
                     absl::StrCat("cannot open ", path.string()));
  }
  return std::vector<uint8_t>(std::istreambuf_iterator<char>(in),
                              std::istreambuf_iterator<char>());
}

absl::Status WriteFileBytes(const std::filesystem::path& path,
                            std::span<const uint8_t> bytes) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    return MakeError(ErrorKind::kIo,
                     absl::StrCat("cannot write ", path.string()));
  }
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    return MakeError(ErrorKind::kIo,
                     absl::StrCat("short write to ", path.string()));
  }
  return absl::OkStatus();
}

absl::Status WritePng(const std::filesystem::path& path,
                      const RasterImage& image) {
  PRIVSYNTH_ASSIGN_OR_RETURN(auto bytes, EncodePng(image));
  return WriteFileBytes(path, bytes);
}

absl::StatusOr<RasterImage> ReadPng(const std::filesystem::path& path) {
  PRIVSYNTH_ASSIGN_OR_RETURN(auto bytes, ReadFileBytes(path));
  auto image = DecodePng(bytes);
  if (!image.ok()) return Annotate(image.status(), path.string());
  return image;
}

RasterImage MaskToImage(const BitMask& mask) {
  RasterImage image(mask.width(), mask.height(), PixelFormat::kGray8);
  auto dst = image.mutable_samples();
  for (size_t i = 0; i < mask.size(); ++i) dst[i] = mask.at_index(i) ? 255 : 0;
  return image;
}

BitMask ImageToMask(const RasterImage& image) {
  const RasterImage gray = ToGrayscale(image);
  BitMask mask(gray.width(), gray.height());
  for (int y = 0; y < gray.height(); ++y) {
    for (int x = 0; x < gray.width(); ++x) mask.set(x, y, gray.at(x, y) >= 128);
  }
  return mask;
}

absl::Status WriteMaskPng(const std::filesystem::path& path,
                          const BitMask& mask) {
  return WritePng(path, MaskToImage(mask));
}

absl::StatusOr<BitMask> ReadMaskPng(const std::filesystem::path& path) {
  PRIVSYNTH_ASSIGN_OR_RETURN(RasterImage image, ReadPng(path));
  return ImageToMask(image);
}

absl::StatusOr<std::string> EncodePngBase64(const RasterImage& image) {
  PRIVSYNTH_ASSIGN_OR_RETURN(auto bytes, EncodePng(image));
  std::string out;
  absl::Base64Escape(
      absl::string_view(reinterpret_cast<const char*>(bytes.data()),
                        bytes.size()),
      &out);
  return out;
}

absl::StatusOr<RasterImage> DecodePngBase64(std::string_view text) {
  std::string raw;
  if (!absl::Base64Unescape(absl::string_view(text.data(), text.size()),
                            &raw)) {
    return MakeError(ErrorKind::kInvalidArgument, "corrupt base64 payload");
  }
  return DecodePng(std::span<const uint8_t>(
      reinterpret_cast<const uint8_t*>(raw.data()), raw.size()));
}

}  // namespace privsynth::imaging
