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

#ifndef PRIVSYNTH_METRICS_EMBEDDING_H_
#define PRIVSYNTH_METRICS_EMBEDDING_H_

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "privsynth/common/json_util.h"

namespace privsynth::metrics {

// An opaque semantic embedding produced by some provider.
struct EmbeddingVector {
  std::vector<double> values;
  std::string provider_id;
  int dimension = 0;

  static EmbeddingVector Of(std::vector<double> values,
                            std::string provider_id) {
    const int dimension = static_cast<int>(values.size());
    return {std::move(values), std::move(provider_id), dimension};
  }
  friend bool operator==(const EmbeddingVector&,
                         const EmbeddingVector&) = default;
};

absl::StatusOr<double> Cosine(const EmbeddingVector& a,
                              const EmbeddingVector& b);

enum class SimMode {
  // Mean over all |P| x |Q| pairs.
  kAllPairs,
  // Mean over (P[i], Q[i]); needs |P| == |Q|.
  kMatched,
};

absl::StatusOr<double> Sim(const std::vector<EmbeddingVector>& p,
                           const std::vector<EmbeddingVector>& q,
                           SimMode mode = SimMode::kAllPairs);

struct PromptSimilarity {
  double value = 0.0;
  double baseline = 0.0;
};

// Text-prompt leakage: mean cosine of the prompt embedding against the
// private images, next to the same figure for the empty prompt.
absl::StatusOr<PromptSimilarity> PromptSim(
    const EmbeddingVector& prompt,
    const std::vector<EmbeddingVector>& private_images,
    const EmbeddingVector& baseline);

// Named embeddings, as stored in an embedding file:
//   {"private/t/img0.png": {"provider_id": "...", "dimension": 3,
//                           "values": [0.1, 0.2, 0.3]}, ...}
using EmbeddingTable = std::map<std::string, EmbeddingVector>;

Json EmbeddingTableToJson(const EmbeddingTable& table);
absl::StatusOr<EmbeddingTable> EmbeddingTableFromJson(const Json& doc);
absl::Status WriteEmbeddingFile(const std::filesystem::path& path,
                                const EmbeddingTable& table);
absl::StatusOr<EmbeddingTable> ReadEmbeddingFile(
    const std::filesystem::path& path);

// Entries whose name starts with `prefix`, in name order.
std::vector<EmbeddingVector> SelectByPrefix(const EmbeddingTable& table,
                                            std::string_view prefix);

}  // namespace privsynth::metrics

#endif  // PRIVSYNTH_METRICS_EMBEDDING_H_
