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

#include "privsynth/service/backend_protocol.h"

#include <utility>

#include "absl/strings/str_cat.h"
#include "httplib.h"
#include "privsynth/common/status.h"
#include "privsynth/imaging/png_io.h"
#include "privsynth/orchestrator/dataset.h"
#include "privsynth/sanitizer/preference.h"

namespace privsynth::service {
namespace {

using imaging::RasterImage;

absl::Status Violation(std::string_view path, std::string_view message) {
  return MakeError(ErrorKind::kSchemaViolation,
                   absl::StrCat(ToStd(path), ": ", ToStd(message)));
}

absl::StatusOr<bool> GetBool(const Json& object, std::string_view key,
                             std::string_view path) {
  PRIVSYNTH_ASSIGN_OR_RETURN(const Json* field,
                             RequireField(object, key, path));
  if (!field->is_boolean()) {
    return Violation(JoinPath(path, key), "expected a boolean");
  }
  return field->get<bool>();
}

absl::StatusOr<int> GetDimension(const Json& object, std::string_view key,
                                 std::string_view path) {
  PRIVSYNTH_ASSIGN_OR_RETURN(int64_t value, GetInt(object, key, path));
  if (value < 1 || value > 16384) {
    return Violation(JoinPath(path, key), "out of range");
  }
  return static_cast<int>(value);
}

absl::Status Unsupported(std::string_view endpoint) {
  return MakeError(ErrorKind::kUnsupportedFeature,
                   absl::StrCat("endpoint ", ToStd(endpoint),
                                " is not provided by this backend"));
}

Json EmbeddingToJson(const metrics::EmbeddingVector& v) {
  return {{"provider_id", v.provider_id},
          {"dimension", v.dimension},
          {"values", v.values}};
}

absl::StatusOr<Json> EmbedCall(const Json& request,
                               metrics::EmbeddingProvider& embedder) {
  Json out = Json::array();
  const bool has_images = request.contains("images");
  const bool has_texts = request.contains("texts");
  if (has_images == has_texts) {
    return Violation("embed", "exactly one of images and texts is required");
  }
  if (has_images) {
    PRIVSYNTH_ASSIGN_OR_RETURN(std::vector<RasterImage> images,
                               ImagesFromWire(request, "images", ""));
    for (const RasterImage& image : images) {
      PRIVSYNTH_ASSIGN_OR_RETURN(metrics::EmbeddingVector v,
                                 embedder.EmbedImage(image));
      out.push_back(EmbeddingToJson(v));
    }
  } else {
    PRIVSYNTH_ASSIGN_OR_RETURN(std::vector<std::string> texts,
                               GetStringArray(request, "texts", ""));
    for (const std::string& text : texts) {
      PRIVSYNTH_ASSIGN_OR_RETURN(metrics::EmbeddingVector v,
                                 embedder.EmbedText(text));
      out.push_back(EmbeddingToJson(v));
    }
  }
  return Json{{"embeddings", std::move(out)}};
}

absl::StatusOr<Json> SegmentCall(const Json& request,
                                 sanitizer::SegmentationService& segmenter) {
  PRIVSYNTH_ASSIGN_OR_RETURN(RasterImage image,
                             ImageFromWire(request, "image", ""));
  PRIVSYNTH_ASSIGN_OR_RETURN(std::vector<std::string> targets,
                             GetStringArray(request, "targets", ""));
  PRIVSYNTH_ASSIGN_OR_RETURN(sanitizer::ManifestEntry entry,
                             segmenter.Segment(image, targets));
  Json segments = Json::array();
  for (const sanitizer::ManifestSegment& segment : entry.segments) {
    PRIVSYNTH_ASSIGN_OR_RETURN(std::string mask, MaskToWire(segment.mask));
    segments.push_back(
        {{"role", sanitizer::RoleKey(segment.role,
                                     static_cast<int>(targets.size()))},
         {"mask", std::move(mask)},
         {"confidence", segment.confidence}});
  }
  return Json{{"segments", std::move(segments)}};
}

absl::StatusOr<Json> TrainCall(const Json& request,
                               utility::TrainingBackend& trainer) {
  PRIVSYNTH_ASSIGN_OR_RETURN(const Json* train_doc,
                             GetObject(request, "train", ""));
  PRIVSYNTH_ASSIGN_OR_RETURN(const Json* validation_doc,
                             GetObject(request, "validation", ""));
  PRIVSYNTH_ASSIGN_OR_RETURN(const Json* config,
                             GetObject(request, "config", ""));
  auto train = orchestrator::DatasetFromJson(*train_doc);
  if (!train.ok()) return Annotate(train.status(), "train");
  auto validation = orchestrator::DatasetFromJson(*validation_doc);
  if (!validation.ok()) return Annotate(validation.status(), "validation");
  PRIVSYNTH_ASSIGN_OR_RETURN(utility::TrainingRun run,
                             trainer.Train(*train, *validation, *config));
  return TrainingRunToJson(run);
}

absl::StatusOr<Json> Dispatch(std::string_view endpoint, const Json& request,
                              const LocalBackends& backends) {
  if (endpoint == "capabilities") {
    orchestrator::BackendCapabilities caps;
    if (backends.generation != nullptr) {
      PRIVSYNTH_ASSIGN_OR_RETURN(caps, backends.generation->Capabilities());
    } else {
      caps.provider = "privsynth";
    }
    caps.endpoints = {"capabilities"};
    if (backends.generation != nullptr) {
      for (const char* name :
           {"fine_tune", "generate", "condition_generate", "inpaint"}) {
        caps.endpoints.push_back(name);
      }
    }
    if (backends.embedding != nullptr) caps.endpoints.push_back("embed");
    if (backends.segmentation != nullptr) caps.endpoints.push_back("segment");
    if (backends.features != nullptr) caps.endpoints.push_back("feature");
    if (backends.training != nullptr) {
      caps.endpoints.push_back("train");
      caps.endpoints.push_back("predict");
    }
    return CapabilitiesToJson(caps);
  }
  if (endpoint == "fine_tune" || endpoint == "generate" ||
      endpoint == "condition_generate" || endpoint == "inpaint") {
    if (backends.generation == nullptr) return Unsupported(endpoint);
    orchestrator::GenerationBackend& gen = *backends.generation;
    if (endpoint == "fine_tune") {
      PRIVSYNTH_ASSIGN_OR_RETURN(std::string role,
                                 GetString(request, "role", ""));
      PRIVSYNTH_ASSIGN_OR_RETURN(std::string description,
                                 GetString(request, "description", ""));
      PRIVSYNTH_ASSIGN_OR_RETURN(std::vector<RasterImage> references,
                                 ImagesFromWire(request, "references", ""));
      PRIVSYNTH_ASSIGN_OR_RETURN(const Json* config,
                                 GetObject(request, "config", ""));
      PRIVSYNTH_ASSIGN_OR_RETURN(
          std::string model_ref,
          gen.FineTune(role, description, references, *config));
      return Json{{"model_ref", model_ref}};
    }
    PRIVSYNTH_ASSIGN_OR_RETURN(std::string prompt,
                               GetString(request, "prompt", ""));
    PRIVSYNTH_ASSIGN_OR_RETURN(uint64_t seed, GetUint(request, "seed", ""));
    if (endpoint == "generate") {
      PRIVSYNTH_ASSIGN_OR_RETURN(std::string model_ref,
                                 GetString(request, "model_ref", ""));
      PRIVSYNTH_ASSIGN_OR_RETURN(bool want_alpha,
                                 GetBool(request, "want_alpha", ""));
      PRIVSYNTH_ASSIGN_OR_RETURN(int width, GetDimension(request, "width", ""));
      PRIVSYNTH_ASSIGN_OR_RETURN(int height,
                                 GetDimension(request, "height", ""));
      PRIVSYNTH_ASSIGN_OR_RETURN(
          orchestrator::GeneratedImage generated,
          gen.Generate(model_ref, prompt, seed, want_alpha, width, height));
      PRIVSYNTH_ASSIGN_OR_RETURN(std::string image,
                                 ImageToWire(generated.image));
      Json out = {{"image", std::move(image)}};
      if (generated.alpha.has_value()) {
        PRIVSYNTH_ASSIGN_OR_RETURN(out["alpha"], MaskToWire(*generated.alpha));
      }
      return out;
    }
    if (endpoint == "condition_generate") {
      PRIVSYNTH_ASSIGN_OR_RETURN(std::vector<RasterImage> features,
                                 ImagesFromWire(request, "features", ""));
      PRIVSYNTH_ASSIGN_OR_RETURN(int64_t count, GetInt(request, "count", ""));
      if (count < 0 || count > 4096) return Violation("count", "out of range");
      PRIVSYNTH_ASSIGN_OR_RETURN(
          std::vector<RasterImage> images,
          gen.ConditionGenerate(features, prompt, seed,
                                static_cast<int>(count)));
      PRIVSYNTH_ASSIGN_OR_RETURN(Json wire, ImagesToWire(images));
      return Json{{"images", std::move(wire)}};
    }
    PRIVSYNTH_ASSIGN_OR_RETURN(std::string model_ref,
                               GetString(request, "model_ref", ""));
    PRIVSYNTH_ASSIGN_OR_RETURN(RasterImage canvas,
                               ImageFromWire(request, "canvas", ""));
    PRIVSYNTH_ASSIGN_OR_RETURN(imaging::BitMask mask,
                               MaskFromWire(request, "mask", ""));
    PRIVSYNTH_ASSIGN_OR_RETURN(
        RasterImage image, gen.Inpaint(model_ref, canvas, mask, prompt, seed));
    PRIVSYNTH_ASSIGN_OR_RETURN(std::string wire, ImageToWire(image));
    return Json{{"image", std::move(wire)}};
  }
  if (endpoint == "embed") {
    if (backends.embedding == nullptr) return Unsupported(endpoint);
    return EmbedCall(request, *backends.embedding);
  }
  if (endpoint == "segment") {
    if (backends.segmentation == nullptr) return Unsupported(endpoint);
    return SegmentCall(request, *backends.segmentation);
  }
  if (endpoint == "feature") {
    if (backends.features == nullptr) return Unsupported(endpoint);
    PRIVSYNTH_ASSIGN_OR_RETURN(RasterImage image,
                               ImageFromWire(request, "image", ""));
    PRIVSYNTH_ASSIGN_OR_RETURN(std::string kind_name,
                               GetString(request, "kind", ""));
    PRIVSYNTH_ASSIGN_OR_RETURN(sanitizer::FeatureKind kind,
                               sanitizer::ParseFeatureKind(kind_name));
    PRIVSYNTH_ASSIGN_OR_RETURN(RasterImage feature,
                               backends.features->ExtractFeature(image, kind));
    PRIVSYNTH_ASSIGN_OR_RETURN(std::string wire, ImageToWire(feature));
    return Json{{"image", std::move(wire)}};
  }
  if (endpoint == "train" || endpoint == "predict") {
    if (backends.training == nullptr) return Unsupported(endpoint);
    if (endpoint == "train") return TrainCall(request, *backends.training);
    PRIVSYNTH_ASSIGN_OR_RETURN(std::string model_ref,
                               GetString(request, "model_ref", ""));
    PRIVSYNTH_ASSIGN_OR_RETURN(std::vector<RasterImage> images,
                               ImagesFromWire(request, "images", ""));
    PRIVSYNTH_ASSIGN_OR_RETURN(std::vector<utility::Prediction> predictions,
                               backends.training->Predict(model_ref, images));
    return utility::PredictionsToJson(predictions);
  }
  return MakeError(ErrorKind::kNotFound,
                   absl::StrCat("unknown backend endpoint '", ToStd(endpoint),
                                "'"));
}

void Respond(httplib::Response& res, const Json& body, int status) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void ServeCall(const std::string& endpoint, const std::string& body,
               const LocalBackends& backends, httplib::Response& res) {
  Json request = Json::object();
  if (!body.empty()) {
    auto parsed = ParseJson(body, "request body");
    if (!parsed.ok()) {
      Respond(res, ErrorEnvelope(parsed.status()),
              HttpStatusFor(parsed.status()));
      return;
    }
    request = *std::move(parsed);
  }
  if (!request.is_object()) {
    absl::Status status = Violation("request body", "expected an object");
    Respond(res, ErrorEnvelope(status), HttpStatusFor(status));
    return;
  }
  auto id = GetString(request, "request_id", "");
  if (!id.ok() || id->empty()) {
    absl::Status status = id.ok() ? Violation("request_id", "empty")
                                  : id.status();
    Respond(res, ErrorEnvelope(status), HttpStatusFor(status));
    return;
  }
  absl::StatusOr<Json> result = HandleBackendCall(endpoint, request, backends);
  if (!result.ok()) {
    Json envelope = ErrorEnvelope(result.status());
    envelope["request_id"] = *id;
    Respond(res, envelope, HttpStatusFor(result.status()));
    return;
  }
  (*result)["request_id"] = *id;
  Respond(res, *result, 200);
}

}  // namespace

const std::vector<std::string>& BackendEndpoints() {
  static const auto* endpoints = new std::vector<std::string>{
      "capabilities", "fine_tune", "generate", "condition_generate",
      "inpaint",      "embed",     "segment",  "feature",
      "train",        "predict"};
  return *endpoints;
}

absl::StatusOr<Json> HandleBackendCall(std::string_view endpoint,
                                       const Json& request,
                                       const LocalBackends& backends) {
  if (!request.is_object()) {
    return Violation("request body", "expected an object");
  }
  return Dispatch(endpoint, request, backends);
}

void MountBackend(httplib::Server& server, const LocalBackends& backends) {
  const std::string pattern = absl::StrCat(kBackendPath, "/([a-z_]+)");
  server.Post(pattern, [&backends](const httplib::Request& req,
                                   httplib::Response& res) {
    ServeCall(req.matches[1], req.body, backends, res);
  });
  // GET carries the request id as a query parameter.
  server.Get(absl::StrCat(kBackendPath, "/capabilities"),
             [&backends](const httplib::Request& req, httplib::Response& res) {
               Json request = Json::object();
               if (req.has_param("request_id")) {
                 request["request_id"] = req.get_param_value("request_id");
               } else {
                 request["request_id"] = "get";
               }
               ServeCall("capabilities", request.dump(), backends, res);
             });
}

int HttpStatusFor(const absl::Status& status) {
  const std::optional<ErrorKind> kind = ErrorKindOf(status);
  if (!kind.has_value()) {
    switch (status.code()) {
      case absl::StatusCode::kInvalidArgument:
        return 400;
      case absl::StatusCode::kNotFound:
        return 404;
      case absl::StatusCode::kUnavailable:
        return 503;
      default:
        return 500;
    }
  }
  switch (*kind) {
    case ErrorKind::kInvalidArgument:
    case ErrorKind::kSchemaViolation:
    case ErrorKind::kInconsistentBundle:
    case ErrorKind::kIncompatibleEmbeddings:
    case ErrorKind::kIncompatibleDatasets:
      return 400;
    case ErrorKind::kNotFound:
      return 404;
    case ErrorKind::kConflict:
      return 409;
    case ErrorKind::kPayloadTooLarge:
      return 413;
    case ErrorKind::kIncompleteSegmentation:
    case ErrorKind::kDegenerateReference:
    case ErrorKind::kUnsplittableClass:
    case ErrorKind::kUndefinedMetric:
    case ErrorKind::kPlacementInfeasible:
      return 422;
    case ErrorKind::kUnsupportedFeature:
      return 501;
    case ErrorKind::kBackendUnavailable:
      return 503;
    case ErrorKind::kGenerationFailed:
    case ErrorKind::kTrainingFailed:
    case ErrorKind::kIo:
      return 500;
  }
  return 500;
}

bool IsRetryable(const absl::Status& status) {
  return ErrorKindOf(status) == ErrorKind::kBackendUnavailable ||
         status.code() == absl::StatusCode::kUnavailable;
}

Json ErrorEnvelope(const absl::Status& status) {
  const std::optional<ErrorKind> kind = ErrorKindOf(status);
  const std::string code =
      kind.has_value() ? std::string(ErrorKindName(*kind))
                       : ToStd(absl::StatusCodeToString(status.code()));
  return {{"error",
           {{"code", code},
            {"message", ToStd(status.message())},
            {"retryable", IsRetryable(status)}}}};
}

absl::Status StatusFromEnvelope(const Json& doc, int http_status) {
  std::string code;
  std::string message = absl::StrCat("HTTP ", http_status);
  if (doc.is_object() && doc.contains("error") && doc["error"].is_object()) {
    const Json& error = doc["error"];
    if (error.contains("code") && error["code"].is_string()) {
      code = error["code"].get<std::string>();
    }
    if (error.contains("message") && error["message"].is_string()) {
      message = error["message"].get<std::string>();
    }
  }
  if (std::optional<ErrorKind> kind = ParseErrorKind(code)) {
    return MakeError(*kind, message);
  }
  switch (http_status) {
    case 404:
      return MakeError(ErrorKind::kNotFound, message);
    case 409:
      return MakeError(ErrorKind::kConflict, message);
    case 413:
      return MakeError(ErrorKind::kPayloadTooLarge, message);
    case 501:
      return MakeError(ErrorKind::kUnsupportedFeature, message);
    case 502:
    case 503:
    case 504:
      return MakeError(ErrorKind::kBackendUnavailable, message);
    default:
      break;
  }
  if (http_status >= 400 && http_status < 500) {
    return MakeError(ErrorKind::kInvalidArgument, message);
  }
  return MakeError(ErrorKind::kBackendUnavailable, message);
}

absl::StatusOr<std::string> ImageToWire(const RasterImage& image) {
  return imaging::EncodePngBase64(image);
}

absl::StatusOr<RasterImage> ImageFromWire(const Json& object,
                                          std::string_view key,
                                          std::string_view path) {
  PRIVSYNTH_ASSIGN_OR_RETURN(std::string text, GetString(object, key, path));
  auto image = imaging::DecodePngBase64(text);
  if (!image.ok()) {
    return Violation(JoinPath(path, key),
                     absl::StrCat("bad image: ", ToStd(image.status().message())));
  }
  return image;
}

absl::StatusOr<std::string> MaskToWire(const imaging::BitMask& mask) {
  return imaging::EncodePngBase64(imaging::MaskToImage(mask));
}

absl::StatusOr<imaging::BitMask> MaskFromWire(const Json& object,
                                              std::string_view key,
                                              std::string_view path) {
  PRIVSYNTH_ASSIGN_OR_RETURN(RasterImage image,
                             ImageFromWire(object, key, path));
  return imaging::ImageToMask(image);
}

absl::StatusOr<Json> ImagesToWire(const std::vector<RasterImage>& images) {
  Json out = Json::array();
  for (const RasterImage& image : images) {
    PRIVSYNTH_ASSIGN_OR_RETURN(std::string wire, ImageToWire(image));
    out.push_back(std::move(wire));
  }
  return out;
}

absl::StatusOr<std::vector<RasterImage>> ImagesFromWire(
    const Json& object, std::string_view key, std::string_view path) {
  PRIVSYNTH_ASSIGN_OR_RETURN(const Json* array, GetArray(object, key, path));
  std::vector<RasterImage> images;
  images.reserve(array->size());
  const std::string field = JoinPath(path, key);
  for (size_t i = 0; i < array->size(); ++i) {
    const Json& item = (*array)[i];
    if (!item.is_string()) {
      return Violation(IndexPath(field, i), "expected a base64 PNG string");
    }
    auto image = imaging::DecodePngBase64(item.get<std::string>());
    if (!image.ok()) {
      return Violation(IndexPath(field, i),
                       absl::StrCat("bad image: ",
                                    ToStd(image.status().message())));
    }
    images.push_back(*std::move(image));
  }
  return images;
}

Json CapabilitiesToJson(const orchestrator::BackendCapabilities& caps) {
  return {{"provider", caps.provider},
          {"deterministic", caps.deterministic},
          {"endpoints", caps.endpoints}};
}

absl::StatusOr<orchestrator::BackendCapabilities> CapabilitiesFromJson(
    const Json& doc) {
  orchestrator::BackendCapabilities caps;
  PRIVSYNTH_ASSIGN_OR_RETURN(caps.provider, GetString(doc, "provider", ""));
  PRIVSYNTH_ASSIGN_OR_RETURN(caps.deterministic,
                             GetBool(doc, "deterministic", ""));
  PRIVSYNTH_ASSIGN_OR_RETURN(caps.endpoints,
                             GetStringArray(doc, "endpoints", ""));
  return caps;
}

Json TrainingRunToJson(const utility::TrainingRun& run) {
  Json epochs = Json::array();
  for (const utility::EpochScore& e : run.epochs) {
    epochs.push_back({{"epoch", e.epoch},
                      {"validation_score", e.validation_score},
                      {"model_ref", e.model_ref}});
  }
  return {{"initial_model_ref", run.initial_model_ref},
          {"epochs", std::move(epochs)}};
}

absl::StatusOr<utility::TrainingRun> TrainingRunFromJson(const Json& doc) {
  utility::TrainingRun run;
  PRIVSYNTH_ASSIGN_OR_RETURN(run.initial_model_ref,
                             GetString(doc, "initial_model_ref", ""));
  PRIVSYNTH_ASSIGN_OR_RETURN(const Json* epochs, GetArray(doc, "epochs", ""));
  for (size_t i = 0; i < epochs->size(); ++i) {
    const std::string path = IndexPath("epochs", i);
    utility::EpochScore score;
    PRIVSYNTH_ASSIGN_OR_RETURN(int64_t epoch,
                               GetInt((*epochs)[i], "epoch", path));
    score.epoch = static_cast<int>(epoch);
    PRIVSYNTH_ASSIGN_OR_RETURN(
        score.validation_score,
        GetNumber((*epochs)[i], "validation_score", path));
    PRIVSYNTH_ASSIGN_OR_RETURN(score.model_ref,
                               GetString((*epochs)[i], "model_ref", path));
    run.epochs.push_back(std::move(score));
  }
  return run;
}

}  // namespace privsynth::service
