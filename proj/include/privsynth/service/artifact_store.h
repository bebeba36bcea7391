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

#ifndef PRIVSYNTH_SERVICE_ARTIFACT_STORE_H_
#define PRIVSYNTH_SERVICE_ARTIFACT_STORE_H_

#include <filesystem>
#include <string>
#include <string_view>

#include "absl/status/statusor.h"

namespace privsynth::service {

// Lowercase hex sha256.
std::string Sha256Hex(std::string_view bytes);

bool IsContentAddress(std::string_view address);

// Immutable blobs on local disk, keyed by their sha256. Writing the same
// bytes twice is a no-op; existing blobs are never rewritten.
class ArtifactStore {
 public:
  explicit ArtifactStore(std::filesystem::path root);

  // Returns the content address.
  absl::StatusOr<std::string> Put(std::string_view bytes,
                                  std::string_view media_type =
                                      "application/octet-stream");
  absl::StatusOr<std::string> Get(std::string_view address) const;
  // The media type recorded by the first Put of the blob.
  absl::StatusOr<std::string> MediaType(std::string_view address) const;
  bool Contains(std::string_view address) const;

  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path BlobPath(std::string_view address) const;

  std::filesystem::path root_;
};

}  // namespace privsynth::service

#endif  // PRIVSYNTH_SERVICE_ARTIFACT_STORE_H_
