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

#include "privsynth/service/audit.h"

#include <set>
#include <string_view>
#include <utility>

#include "absl/container/flat_hash_set.h"
#include "absl/strings/escaping.h"
#include "absl/strings/str_cat.h"
#include "privsynth/common/json_util.h"
#include "privsynth/common/status.h"
#include "privsynth/imaging/png_io.h"

namespace privsynth::service {
namespace {

using imaging::RasterImage;

constexpr std::string_view kPngSignature("\x89PNG\r\n\x1a\n", 8);
constexpr size_t kMinBase64 = 64;

bool IsBase64Char(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') ||
         (c >= '0' && c <= '9') || c == '+' || c == '/' || c == '-' ||
         c == '_' || c == '=';
}

// Interleaved RGB bytes of one row.
std::string RgbRow(const RasterImage& image, int y) {
  std::string row;
  row.reserve(static_cast<size_t>(image.width()) * 3);
  for (int x = 0; x < image.width(); ++x) {
    for (int c = 0; c < 3; ++c) {
      const int source = image.channels() >= 3 ? c : 0;
      row.push_back(static_cast<char>(image.at(x, y, source)));
    }
  }
  return row;
}

class Scanner {
 public:
  Scanner(const std::vector<RasterImage>& private_images,
          const AuditOptions& options)
      : options_(options), window_(static_cast<size_t>(options.run_length) * 3) {
    for (const RasterImage& image : private_images) {
      for (int y = 0; y < image.height(); ++y) {
        const std::string row = RgbRow(image, y);
        for (size_t x = 0; x + window_ <= row.size(); x += 3) {
          std::string_view run(row.data() + x, window_);
          if (Identifying(run)) runs_.insert(std::string(run));
        }
      }
    }
  }

  size_t run_count() const { return runs_.size(); }

  void Scan(std::string_view bytes, int depth, const std::string& where,
            AuditReport& report, std::vector<std::string>& hits) {
    if (ContainsRun(bytes)) {
      hits.push_back(absl::StrCat(where, "raw private pixel run"));
    }
    for (size_t at = bytes.find(kPngSignature); at != std::string_view::npos;
         at = bytes.find(kPngSignature, at + 1)) {
      std::string_view tail = bytes.substr(at);
      auto image = imaging::DecodePng(std::span<const uint8_t>(
          reinterpret_cast<const uint8_t*>(tail.data()), tail.size()));
      if (!image.ok()) continue;
      ++report.embedded_images;
      if (ImageContainsRun(*image)) {
        hits.push_back(absl::StrCat(where, "embedded PNG at byte ", at,
                                    " carries private pixels"));
      }
    }
    if (depth >= options_.max_depth) return;
    size_t i = 0;
    while (i < bytes.size()) {
      if (!IsBase64Char(bytes[i])) {
        ++i;
        continue;
      }
      size_t end = i;
      while (end < bytes.size() && IsBase64Char(bytes[end])) ++end;
      if (end - i >= kMinBase64) {
        const absl::string_view blob(bytes.data() + i, end - i);
        std::string decoded;
        if (absl::Base64Unescape(blob, &decoded) ||
            absl::WebSafeBase64Unescape(blob, &decoded)) {
          Scan(decoded, depth + 1,
               absl::StrCat(where, "base64 at byte ", i, ": "), report, hits);
        }
      }
      i = end;
    }
  }

 private:
  bool Identifying(std::string_view run) const {
    std::set<std::string_view> distinct;
    for (size_t p = 0; p < run.size(); p += 3) {
      std::string_view pixel = run.substr(p, 3);
      if (pixel == std::string_view("\0\0\0", 3)) return false;
      distinct.insert(pixel);
    }
    return static_cast<int>(distinct.size()) >= options_.min_distinct;
  }

  bool ContainsRun(std::string_view bytes) const {
    if (runs_.empty()) return false;
    for (size_t i = 0; i + window_ <= bytes.size(); ++i) {
      if (runs_.contains(absl::string_view(bytes.data() + i, window_))) {
        return true;
      }
    }
    return false;
  }

  bool ImageContainsRun(const RasterImage& image) const {
    for (int y = 0; y < image.height(); ++y) {
      const std::string row = RgbRow(image, y);
      for (size_t x = 0; x + window_ <= row.size(); x += 3) {
        if (runs_.contains(absl::string_view(row.data() + x, window_))) {
          return true;
        }
      }
    }
    return false;
  }

  AuditOptions options_;
  size_t window_;
  absl::flat_hash_set<std::string> runs_;
};

}  // namespace

absl::StatusOr<AuditReport> AuditPrivatePixels(
    const std::filesystem::path& dir,
    const std::vector<RasterImage>& private_images,
    const AuditOptions& options) {
  if (options.run_length < 2 || options.min_distinct < 1) {
    return MakeError(ErrorKind::kInvalidArgument, "bad audit options");
  }
  Scanner scanner(private_images, options);
  if (scanner.run_count() == 0) {
    return MakeError(ErrorKind::kInvalidArgument,
                     "private images have no identifying pixel runs");
  }
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    return MakeError(ErrorKind::kNotFound,
                     absl::StrCat("no directory ", dir.string()));
  }
  AuditReport report;
  for (const auto& entry :
       std::filesystem::recursive_directory_iterator(dir, ec)) {
    if (!entry.is_regular_file()) continue;
    PRIVSYNTH_ASSIGN_OR_RETURN(std::string bytes, ReadTextFile(entry.path()));
    ++report.files_scanned;
    std::vector<std::string> hits;
    scanner.Scan(bytes, 0, "", report, hits);
    for (std::string& hit : hits) {
      report.findings.push_back({entry.path(), std::move(hit)});
    }
  }
  if (ec) {
    return MakeError(ErrorKind::kIo,
                     absl::StrCat("cannot walk ", dir.string(), ": ",
                                  ec.message()));
  }
  return report;
}

}  // namespace privsynth::service
