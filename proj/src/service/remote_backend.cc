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

#include "privsynth/service/remote_backend.h"

#include <random>
#include <utility>

#include "absl/strings/match.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "httplib.h"
#include "privsynth/common/status.h"
#include "privsynth/orchestrator/dataset.h"
#include "privsynth/service/backend_protocol.h"

namespace privsynth::service {
namespace {

using imaging::RasterImage;

absl::StatusOr<metrics::EmbeddingVector> EmbeddingFromJson(
    const Json& doc, std::string_view path) {
  PRIVSYNTH_ASSIGN_OR_RETURN(std::string provider,
                             GetString(doc, "provider_id", path));
  PRIVSYNTH_ASSIGN_OR_RETURN(const Json* values, GetArray(doc, "values", path));
  std::vector<double> v;
  v.reserve(values->size());
  for (size_t i = 0; i < values->size(); ++i) {
    if (!(*values)[i].is_number()) {
      return MakeError(ErrorKind::kSchemaViolation,
                       absl::StrCat(IndexPath(JoinPath(path, "values"), i),
                                    ": expected a number"));
    }
    v.push_back((*values)[i].get<double>());
  }
  PRIVSYNTH_ASSIGN_OR_RETURN(int64_t dimension,
                             GetInt(doc, "dimension", path));
  if (dimension != static_cast<int64_t>(v.size())) {
    return MakeError(ErrorKind::kSchemaViolation,
                     absl::StrCat(JoinPath(path, "dimension"),
                                  ": does not match the value count"));
  }
  return metrics::EmbeddingVector::Of(std::move(v), std::move(provider));
}

absl::StatusOr<std::vector<metrics::EmbeddingVector>> EmbeddingsFromResponse(
    const Json& response, size_t expected) {
  PRIVSYNTH_ASSIGN_OR_RETURN(const Json* array,
                             GetArray(response, "embeddings", ""));
  if (array->size() != expected) {
    return MakeError(ErrorKind::kSchemaViolation,
                     absl::StrCat("embeddings: expected ", expected,
                                  " vectors, got ", array->size()));
  }
  std::vector<metrics::EmbeddingVector> out;
  for (size_t i = 0; i < array->size(); ++i) {
    PRIVSYNTH_ASSIGN_OR_RETURN(
        metrics::EmbeddingVector v,
        EmbeddingFromJson((*array)[i], IndexPath("embeddings", i)));
    out.push_back(std::move(v));
  }
  return out;
}

// Releases a semaphore slot on scope exit.
class SlotGuard {
 public:
  explicit SlotGuard(std::counting_semaphore<>& sem) : sem_(sem) {
    sem_.acquire();
  }
  ~SlotGuard() { sem_.release(); }
  SlotGuard(const SlotGuard&) = delete;
  SlotGuard& operator=(const SlotGuard&) = delete;

 private:
  std::counting_semaphore<>& sem_;
};

}  // namespace

absl::StatusOr<std::unique_ptr<RemoteBackend>> RemoteBackend::Create(
    std::string_view url, const RemoteOptions& options) {
  std::string text(url);
  if (absl::StartsWith(text, "https://")) {
    return MakeError(ErrorKind::kInvalidArgument,
                     "https backends are not supported; terminate TLS at a "
                     "proxy and use http");
  }
  if (!absl::StartsWith(text, "http://")) {
    return MakeError(ErrorKind::kInvalidArgument,
                     absl::StrCat("backend url must start with http://: ",
                                  text));
  }
  const size_t slash = text.find('/', 7);
  std::string host = text.substr(0, slash);
  std::string prefix = slash == std::string::npos ? "" : text.substr(slash);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  if (host.size() <= 7) {
    return MakeError(ErrorKind::kInvalidArgument,
                     absl::StrCat("backend url has no host: ", text));
  }
  if (options.max_in_flight < 1) {
    return MakeError(ErrorKind::kInvalidArgument, "max_in_flight must be >= 1");
  }
  return std::unique_ptr<RemoteBackend>(
      new RemoteBackend(std::move(host), std::move(prefix), options));
}

RemoteBackend::RemoteBackend(std::string host, std::string prefix,
                             const RemoteOptions& options)
    : host_(std::move(host)),
      prefix_(std::move(prefix)),
      options_(options),
      in_flight_(options.max_in_flight) {
  std::random_device rd;
  client_tag_ = absl::StrFormat("%08x", rd());
}

absl::StatusOr<Json> RemoteBackend::Call(std::string_view endpoint,
                                         Json request) {
  const std::string id =
      absl::StrCat(client_tag_, "-", next_request_.fetch_add(1));
  request["request_id"] = id;
  const std::string path =
      absl::StrCat(prefix_, kBackendPath, "/", ToStd(endpoint));
  const std::string body = request.dump();

  httplib::Result result;
  {
    SlotGuard slot(in_flight_);
    httplib::Client client(host_);
    client.set_connection_timeout(options_.connect_timeout_seconds, 0);
    client.set_read_timeout(options_.read_timeout_seconds, 0);
    client.set_write_timeout(options_.read_timeout_seconds, 0);
    result = client.Post(path, body, "application/json");
  }
  if (!result) {
    return MakeError(ErrorKind::kBackendUnavailable,
                     absl::StrCat("backend ", host_, " ", ToStd(endpoint),
                                  ": ", httplib::to_string(result.error())));
  }
  auto parsed = ParseJson(result->body, "backend response");
  if (result->status != 200) {
    absl::Status status = StatusFromEnvelope(
        parsed.ok() ? *parsed : Json::object(), result->status);
    return Annotate(status, absl::StrCat("backend ", ToStd(endpoint)));
  }
  if (!parsed.ok()) return parsed.status();
  if (!parsed->is_object() || !parsed->contains("request_id") ||
      (*parsed)["request_id"] != id) {
    return MakeError(ErrorKind::kSchemaViolation,
                     absl::StrCat("backend ", ToStd(endpoint),
                                  ": response does not echo request_id"));
  }
  return parsed;
}

absl::StatusOr<orchestrator::BackendCapabilities>
RemoteBackend::Capabilities() {
  PRIVSYNTH_ASSIGN_OR_RETURN(Json response,
                             Call("capabilities", Json::object()));
  return CapabilitiesFromJson(response);
}

absl::StatusOr<std::string> RemoteBackend::FineTune(
    const std::string& role, const std::string& description,
    const std::vector<RasterImage>& references, const Json& config) {
  PRIVSYNTH_ASSIGN_OR_RETURN(Json refs, ImagesToWire(references));
  Json request = {{"role", role},
                  {"description", description},
                  {"references", std::move(refs)},
                  {"config", config}};
  PRIVSYNTH_ASSIGN_OR_RETURN(Json response,
                             Call("fine_tune", std::move(request)));
  return GetString(response, "model_ref", "");
}

absl::StatusOr<orchestrator::GeneratedImage> RemoteBackend::Generate(
    const std::string& model_ref, const std::string& prompt, uint64_t seed,
    bool want_alpha, int width, int height) {
  Json request = {{"model_ref", model_ref}, {"prompt", prompt},
                  {"seed", seed},           {"want_alpha", want_alpha},
                  {"width", width},         {"height", height}};
  PRIVSYNTH_ASSIGN_OR_RETURN(Json response,
                             Call("generate", std::move(request)));
  orchestrator::GeneratedImage out;
  PRIVSYNTH_ASSIGN_OR_RETURN(out.image, ImageFromWire(response, "image", ""));
  if (want_alpha) {
    PRIVSYNTH_ASSIGN_OR_RETURN(out.alpha, MaskFromWire(response, "alpha", ""));
  }
  return out;
}

absl::StatusOr<std::vector<RasterImage>> RemoteBackend::ConditionGenerate(
    const std::vector<RasterImage>& features, const std::string& prompt,
    uint64_t seed, int count) {
  PRIVSYNTH_ASSIGN_OR_RETURN(Json wire, ImagesToWire(features));
  Json request = {{"features", std::move(wire)},
                  {"prompt", prompt},
                  {"seed", seed},
                  {"count", count}};
  PRIVSYNTH_ASSIGN_OR_RETURN(Json response,
                             Call("condition_generate", std::move(request)));
  return ImagesFromWire(response, "images", "");
}

absl::StatusOr<RasterImage> RemoteBackend::Inpaint(
    const std::string& model_ref, const RasterImage& canvas,
    const imaging::BitMask& mask, const std::string& prompt, uint64_t seed) {
  PRIVSYNTH_ASSIGN_OR_RETURN(std::string canvas_wire, ImageToWire(canvas));
  PRIVSYNTH_ASSIGN_OR_RETURN(std::string mask_wire, MaskToWire(mask));
  Json request = {{"model_ref", model_ref},
                  {"canvas", std::move(canvas_wire)},
                  {"mask", std::move(mask_wire)},
                  {"prompt", prompt},
                  {"seed", seed}};
  PRIVSYNTH_ASSIGN_OR_RETURN(Json response,
                             Call("inpaint", std::move(request)));
  return ImageFromWire(response, "image", "");
}

absl::StatusOr<std::vector<metrics::EmbeddingVector>>
RemoteBackend::EmbedImages(const std::vector<RasterImage>& images) {
  PRIVSYNTH_ASSIGN_OR_RETURN(Json wire, ImagesToWire(images));
  Json request = {{"images", std::move(wire)}};
  PRIVSYNTH_ASSIGN_OR_RETURN(Json response, Call("embed", std::move(request)));
  return EmbeddingsFromResponse(response, images.size());
}

absl::StatusOr<metrics::EmbeddingVector> RemoteBackend::EmbedImage(
    const RasterImage& image) {
  PRIVSYNTH_ASSIGN_OR_RETURN(std::vector<metrics::EmbeddingVector> out,
                             EmbedImages({image}));
  return std::move(out[0]);
}

absl::StatusOr<metrics::EmbeddingVector> RemoteBackend::EmbedText(
    const std::string& text) {
  Json request = {{"texts", Json::array({text})}};
  PRIVSYNTH_ASSIGN_OR_RETURN(Json response, Call("embed", std::move(request)));
  PRIVSYNTH_ASSIGN_OR_RETURN(std::vector<metrics::EmbeddingVector> out,
                             EmbeddingsFromResponse(response, 1));
  return std::move(out[0]);
}

absl::StatusOr<utility::TrainingRun> RemoteBackend::Train(
    const orchestrator::SyntheticDataset& train,
    const orchestrator::SyntheticDataset& validation, const Json& config) {
  PRIVSYNTH_ASSIGN_OR_RETURN(Json train_doc,
                             orchestrator::DatasetToJson(train));
  PRIVSYNTH_ASSIGN_OR_RETURN(Json validation_doc,
                             orchestrator::DatasetToJson(validation));
  Json request = {{"train", std::move(train_doc)},
                  {"validation", std::move(validation_doc)},
                  {"config", config}};
  PRIVSYNTH_ASSIGN_OR_RETURN(Json response, Call("train", std::move(request)));
  return TrainingRunFromJson(response);
}

absl::StatusOr<std::vector<utility::Prediction>> RemoteBackend::Predict(
    const std::string& model_ref, const std::vector<RasterImage>& images) {
  PRIVSYNTH_ASSIGN_OR_RETURN(Json wire, ImagesToWire(images));
  Json request = {{"model_ref", model_ref}, {"images", std::move(wire)}};
  PRIVSYNTH_ASSIGN_OR_RETURN(Json response,
                             Call("predict", std::move(request)));
  PRIVSYNTH_ASSIGN_OR_RETURN(std::vector<utility::Prediction> predictions,
                             utility::PredictionsFromJson(response));
  if (predictions.size() != images.size()) {
    return MakeError(ErrorKind::kSchemaViolation,
                     absl::StrCat("predictions: expected ", images.size(),
                                  ", got ", predictions.size()));
  }
  return predictions;
}

absl::StatusOr<RasterImage> RemoteBackend::ExtractFeature(
    const RasterImage& segment, sanitizer::FeatureKind kind) {
  PRIVSYNTH_ASSIGN_OR_RETURN(std::string wire, ImageToWire(segment));
  Json request = {{"image", std::move(wire)},
                  {"kind", std::string(sanitizer::FeatureKindName(kind))}};
  PRIVSYNTH_ASSIGN_OR_RETURN(Json response,
                             Call("feature", std::move(request)));
  return ImageFromWire(response, "image", "");
}

absl::StatusOr<sanitizer::ManifestEntry> RemoteBackend::Segment(
    const RasterImage& image,
    const std::vector<std::string>& target_descriptions) {
  PRIVSYNTH_ASSIGN_OR_RETURN(std::string wire, ImageToWire(image));
  Json request = {{"image", std::move(wire)},
                  {"targets", target_descriptions}};
  PRIVSYNTH_ASSIGN_OR_RETURN(Json response,
                             Call("segment", std::move(request)));
  PRIVSYNTH_ASSIGN_OR_RETURN(const Json* segments,
                             GetArray(response, "segments", ""));
  sanitizer::ManifestEntry entry;
  for (size_t i = 0; i < segments->size(); ++i) {
    const Json& item = (*segments)[i];
    const std::string path = IndexPath("segments", i);
    sanitizer::ManifestSegment segment;
    PRIVSYNTH_ASSIGN_OR_RETURN(std::string role, GetString(item, "role", path));
    PRIVSYNTH_ASSIGN_OR_RETURN(segment.role, sanitizer::ParseRoleKey(role));
    PRIVSYNTH_ASSIGN_OR_RETURN(segment.mask, MaskFromWire(item, "mask", path));
    PRIVSYNTH_ASSIGN_OR_RETURN(segment.confidence,
                               GetNumber(item, "confidence", path));
    entry.segments.push_back(std::move(segment));
  }
  return entry;
}

}  // namespace privsynth::service
