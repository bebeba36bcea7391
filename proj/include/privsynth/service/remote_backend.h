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

#ifndef PRIVSYNTH_SERVICE_REMOTE_BACKEND_H_
#define PRIVSYNTH_SERVICE_REMOTE_BACKEND_H_

#include <atomic>
#include <memory>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "privsynth/common/json_util.h"
#include "privsynth/metrics/embedding_provider.h"
#include "privsynth/orchestrator/generation_backend.h"
#include "privsynth/sanitizer/services.h"
#include "privsynth/utility/evaluate.h"

namespace privsynth::service {

struct RemoteOptions {
  // Calls allowed in flight at once across all threads using the client.
  int max_in_flight = 4;
  int connect_timeout_seconds = 5;
  int read_timeout_seconds = 600;
};

// Client for a backend-protocol server. Transport failures surface as
// backend-unavailable; error envelopes map back onto their error kinds.
class RemoteBackend : public orchestrator::GenerationBackend,
                      public metrics::EmbeddingProvider,
                      public utility::TrainingBackend,
                      public sanitizer::FeatureService,
                      public sanitizer::SegmentationService {
 public:
  // `url` is "http://host:port" with an optional path prefix.
  static absl::StatusOr<std::unique_ptr<RemoteBackend>> Create(
      std::string_view url, const RemoteOptions& options = {});

  // POST <prefix>/v1/backend/<endpoint>. Adds a fresh request id and checks
  // that the response echoes it.
  absl::StatusOr<Json> Call(std::string_view endpoint, Json request);

  absl::StatusOr<orchestrator::BackendCapabilities> Capabilities() override;
  absl::StatusOr<std::string> FineTune(
      const std::string& role, const std::string& description,
      const std::vector<imaging::RasterImage>& references,
      const Json& config) override;
  absl::StatusOr<orchestrator::GeneratedImage> Generate(
      const std::string& model_ref, const std::string& prompt, uint64_t seed,
      bool want_alpha, int width, int height) override;
  absl::StatusOr<std::vector<imaging::RasterImage>> ConditionGenerate(
      const std::vector<imaging::RasterImage>& features,
      const std::string& prompt, uint64_t seed, int count) override;
  absl::StatusOr<imaging::RasterImage> Inpaint(
      const std::string& model_ref, const imaging::RasterImage& canvas,
      const imaging::BitMask& mask, const std::string& prompt,
      uint64_t seed) override;

  absl::StatusOr<metrics::EmbeddingVector> EmbedImage(
      const imaging::RasterImage& image) override;
  absl::StatusOr<metrics::EmbeddingVector> EmbedText(
      const std::string& text) override;
  absl::StatusOr<std::vector<metrics::EmbeddingVector>> EmbedImages(
      const std::vector<imaging::RasterImage>& images);

  absl::StatusOr<utility::TrainingRun> Train(
      const orchestrator::SyntheticDataset& train,
      const orchestrator::SyntheticDataset& validation,
      const Json& config) override;
  absl::StatusOr<std::vector<utility::Prediction>> Predict(
      const std::string& model_ref,
      const std::vector<imaging::RasterImage>& images) override;

  absl::StatusOr<imaging::RasterImage> ExtractFeature(
      const imaging::RasterImage& segment,
      sanitizer::FeatureKind kind) override;
  absl::StatusOr<sanitizer::ManifestEntry> Segment(
      const imaging::RasterImage& image,
      const std::vector<std::string>& target_descriptions) override;

  const std::string& host() const { return host_; }

 private:
  RemoteBackend(std::string host, std::string prefix,
                const RemoteOptions& options);

  std::string host_;
  std::string prefix_;
  RemoteOptions options_;
  std::counting_semaphore<> in_flight_;
  std::atomic<uint64_t> next_request_{0};
  std::string client_tag_;
};

}  // namespace privsynth::service

#endif  // PRIVSYNTH_SERVICE_REMOTE_BACKEND_H_
