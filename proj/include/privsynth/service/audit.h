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

#ifndef PRIVSYNTH_SERVICE_AUDIT_H_
#define PRIVSYNTH_SERVICE_AUDIT_H_

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "privsynth/imaging/raster.h"

namespace privsynth::service {

struct AuditOptions {
  // Pixels per fingerprint run taken from the private rows.
  int run_length = 8;
  // Runs with fewer distinct pixels are skipped; flat regions are not
  // identifying and would match by chance.
  int min_distinct = 4;
  // Nesting depth for base64 blobs inside base64 blobs.
  int max_depth = 2;
};

struct AuditFinding {
  std::filesystem::path file;
  std::string what;
};

struct AuditReport {
  size_t files_scanned = 0;
  // PNGs found inside the files, raw or base64 encoded.
  size_t embedded_images = 0;
  std::vector<AuditFinding> findings;

  bool clean() const { return findings.empty(); }
};

// Looks for pixels of `private_images` in every file under `dir`: runs of
// consecutive private row pixels are searched in the raw file bytes and in
// every PNG embedded in them, directly or as base64 (either alphabet,
// nested up to max_depth). Images are compared as RGB.
absl::StatusOr<AuditReport> AuditPrivatePixels(
    const std::filesystem::path& dir,
    const std::vector<imaging::RasterImage>& private_images,
    const AuditOptions& options = {});

}  // namespace privsynth::service

#endif  // PRIVSYNTH_SERVICE_AUDIT_H_
