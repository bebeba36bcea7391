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

#include "privsynth/service/artifact_store.h"

#include <openssl/evp.h>

#include <array>
#include <atomic>
#include <cstdio>
#include <system_error>
#include <utility>

#include "absl/strings/escaping.h"
#include "absl/strings/str_cat.h"
#include "privsynth/common/json_util.h"
#include "privsynth/common/status.h"

namespace privsynth::service {
namespace {

constexpr char kTypeSuffix[] = ".type";

// Unique temp names so concurrent writers of one blob never share a file.
std::string TempSuffix() {
  static std::atomic<uint64_t> counter{0};
  return absl::StrCat(".tmp", counter.fetch_add(1));
}

absl::Status WriteAtomically(const std::filesystem::path& path,
                             std::string_view bytes) {
  std::filesystem::path temp = path;
  temp += TempSuffix();
  PRIVSYNTH_RETURN_IF_ERROR(WriteTextFile(temp, bytes));
  std::error_code ec;
  // A concurrent writer may have won; the content is identical either way.
  if (std::filesystem::exists(path, ec)) {
    std::filesystem::remove(temp, ec);
    return absl::OkStatus();
  }
  std::filesystem::rename(temp, path, ec);
  if (ec) {
    return MakeError(ErrorKind::kIo, absl::StrCat("cannot store ",
                                                  path.string(), ": ",
                                                  ec.message()));
  }
  return absl::OkStatus();
}

}  // namespace

std::string Sha256Hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int length = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest.data(), &length, EVP_sha256(),
             nullptr);
  return ToStd(absl::BytesToHexString(absl::string_view(
      reinterpret_cast<const char*>(digest.data()), length)));
}

bool IsContentAddress(std::string_view address) {
  if (address.size() != 64) return false;
  for (char c : address) {
    const bool hex = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
    if (!hex) return false;
  }
  return true;
}

ArtifactStore::ArtifactStore(std::filesystem::path root)
    : root_(std::move(root)) {}

std::filesystem::path ArtifactStore::BlobPath(std::string_view address) const {
  return root_ / std::string(address.substr(0, 2)) / std::string(address);
}

absl::StatusOr<std::string> ArtifactStore::Put(std::string_view bytes,
                                               std::string_view media_type) {
  std::string address = Sha256Hex(bytes);
  const std::filesystem::path path = BlobPath(address);
  std::error_code ec;
  if (std::filesystem::exists(path, ec)) return address;
  std::filesystem::path type_path = path;
  type_path += kTypeSuffix;
  PRIVSYNTH_RETURN_IF_ERROR(WriteAtomically(type_path, media_type));
  PRIVSYNTH_RETURN_IF_ERROR(WriteAtomically(path, bytes));
  return address;
}

absl::StatusOr<std::string> ArtifactStore::Get(std::string_view address) const {
  if (!Contains(address)) {
    return MakeError(ErrorKind::kNotFound,
                     absl::StrCat("no artifact ", ToStd(address)));
  }
  return ReadTextFile(BlobPath(address));
}

absl::StatusOr<std::string> ArtifactStore::MediaType(
    std::string_view address) const {
  if (!Contains(address)) {
    return MakeError(ErrorKind::kNotFound,
                     absl::StrCat("no artifact ", ToStd(address)));
  }
  std::filesystem::path type_path = BlobPath(address);
  type_path += kTypeSuffix;
  return ReadTextFile(type_path);
}

bool ArtifactStore::Contains(std::string_view address) const {
  if (!IsContentAddress(address)) return false;
  std::error_code ec;
  return std::filesystem::is_regular_file(BlobPath(address), ec);
}

}  // namespace privsynth::service
