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

#ifndef PRIVSYNTH_SERVICE_BACKEND_PROTOCOL_H_
#define PRIVSYNTH_SERVICE_BACKEND_PROTOCOL_H_

#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "privsynth/common/json_util.h"
#include "privsynth/imaging/raster.h"
#include "privsynth/metrics/embedding_provider.h"
#include "privsynth/orchestrator/generation_backend.h"
#include "privsynth/sanitizer/services.h"
#include "privsynth/utility/evaluate.h"

namespace httplib {
class Server;
}  // namespace httplib

namespace privsynth::service {

inline constexpr char kBackendPath[] = "/v1/backend";

// Every endpoint of the backend protocol. Each is POST /v1/backend/<name>
// with a JSON body carrying "request_id"; capabilities also answers GET.
//
//   capabilities        {} -> {provider, deterministic, endpoints}
//   fine_tune           {role, description, references[], config}
//                          -> {model_ref}
//   generate            {model_ref, prompt, seed, want_alpha, width, height}
//                          -> {image, alpha?}
//   condition_generate  {features[], prompt, seed, count} -> {images[]}
//   inpaint             {model_ref, canvas, mask, prompt, seed} -> {image}
//   embed               {images[]} | {texts[]} -> {embeddings[]}
//   segment             {image, targets[]} -> {segments[{role, mask,
//                                                          confidence}]}
//   feature             {image, kind} -> {image}
//   train               {train, validation, config}
//                          -> {initial_model_ref, epochs[]}
//   predict             {model_ref, images[]} -> {predictions[]}
//
// Images and masks are base64 PNG strings; masks use 0/255 gray. Datasets
// travel inline in their self-contained JSON form. Responses echo the
// request id; failures answer {"error": {code, message, retryable}} where
// code is an error kind name.
const std::vector<std::string>& BackendEndpoints();

// Implementations a server exposes. Not owned. A null member makes its
// endpoints answer unsupported-feature.
struct LocalBackends {
  orchestrator::GenerationBackend* generation = nullptr;
  metrics::EmbeddingProvider* embedding = nullptr;
  utility::TrainingBackend* training = nullptr;
  sanitizer::FeatureService* features = nullptr;
  sanitizer::SegmentationService* segmentation = nullptr;
};

// Runs one call on decoded request fields; the result lacks the request id.
absl::StatusOr<Json> HandleBackendCall(std::string_view endpoint,
                                       const Json& request,
                                       const LocalBackends& backends);

// Registers the backend routes on `server`. `backends` must outlive it.
void MountBackend(httplib::Server& server, const LocalBackends& backends);

int HttpStatusFor(const absl::Status& status);
bool IsRetryable(const absl::Status& status);
Json ErrorEnvelope(const absl::Status& status);
// Rebuilds a status from an error response. Unknown codes fall back on the
// HTTP status.
absl::Status StatusFromEnvelope(const Json& doc, int http_status);

// Wire codecs shared by server and client.
absl::StatusOr<std::string> ImageToWire(const imaging::RasterImage& image);
absl::StatusOr<imaging::RasterImage> ImageFromWire(const Json& object,
                                                   std::string_view key,
                                                   std::string_view path);
absl::StatusOr<std::string> MaskToWire(const imaging::BitMask& mask);
absl::StatusOr<imaging::BitMask> MaskFromWire(const Json& object,
                                              std::string_view key,
                                              std::string_view path);
absl::StatusOr<Json> ImagesToWire(
    const std::vector<imaging::RasterImage>& images);
absl::StatusOr<std::vector<imaging::RasterImage>> ImagesFromWire(
    const Json& object, std::string_view key, std::string_view path);

Json CapabilitiesToJson(const orchestrator::BackendCapabilities& caps);
absl::StatusOr<orchestrator::BackendCapabilities> CapabilitiesFromJson(
    const Json& doc);
Json TrainingRunToJson(const utility::TrainingRun& run);
absl::StatusOr<utility::TrainingRun> TrainingRunFromJson(const Json& doc);

}  // namespace privsynth::service

#endif  // PRIVSYNTH_SERVICE_BACKEND_PROTOCOL_H_
