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

#include "privsynth/service/conformance.h"

#include <functional>
#include <utility>

#include "absl/strings/str_cat.h"
#include "httplib.h"
#include "privsynth/common/seed.h"
#include "privsynth/common/status.h"
#include "privsynth/orchestrator/dataset.h"
#include "privsynth/service/backend_protocol.h"
#include "privsynth/service/remote_backend.h"

namespace privsynth::service {
namespace {

using imaging::BitMask;
using imaging::PixelFormat;
using imaging::RasterImage;

absl::Status Fail(std::string_view message) {
  return absl::FailedPreconditionError(ToStd(message));
}

// Hash-textured image with a disc of `tint` in the middle.
RasterImage Probe(int width, int height, uint64_t seed, uint8_t tint) {
  RasterImage image(width, height, PixelFormat::kRgb8);
  const double cx = width / 2.0;
  const double cy = height / 2.0;
  const double r = std::min(width, height) / 3.0;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const uint64_t h = DeriveSeed(seed, {static_cast<uint64_t>(x),
                                           static_cast<uint64_t>(y)});
      const bool inside = (x - cx) * (x - cx) + (y - cy) * (y - cy) < r * r;
      for (int c = 0; c < 3; ++c) {
        const uint8_t noise = static_cast<uint8_t>((h >> (8 * c)) & 0x1f);
        const uint8_t base = inside ? (c == 0 ? tint : 40) : 120;
        image.set(x, y, c, static_cast<uint8_t>(base + noise));
      }
    }
  }
  return image;
}

struct RawResponse {
  int status = 0;
  Json body;
};

absl::StatusOr<RawResponse> RawPost(const std::string& host,
                                    const std::string& path,
                                    const std::string& body) {
  httplib::Client client(host);
  client.set_connection_timeout(5, 0);
  client.set_read_timeout(120, 0);
  auto result = client.Post(path, body, "application/json");
  if (!result) {
    return MakeError(ErrorKind::kBackendUnavailable,
                     httplib::to_string(result.error()));
  }
  RawResponse out;
  out.status = result->status;
  auto parsed = ParseJson(result->body, "response");
  if (!parsed.ok()) return parsed.status();
  out.body = *std::move(parsed);
  return out;
}

absl::Status CheckEnvelope(const RawResponse& response, int min_status,
                           int max_status) {
  if (response.status < min_status || response.status > max_status) {
    return Fail(absl::StrCat("HTTP ", response.status, ", expected ",
                             min_status, "..", max_status));
  }
  const Json& body = response.body;
  if (!body.is_object() || !body.contains("error") ||
      !body["error"].is_object()) {
    return Fail("no error object");
  }
  const Json& error = body["error"];
  if (!error.contains("code") || !error["code"].is_string() ||
      !error.contains("message") || !error["message"].is_string() ||
      !error.contains("retryable") || !error["retryable"].is_boolean()) {
    return Fail(absl::StrCat("malformed error envelope: ", error.dump()));
  }
  return absl::OkStatus();
}

orchestrator::SyntheticDataset TinyDataset(uint64_t seed) {
  orchestrator::SyntheticDataset dataset;
  dataset.task = sanitizer::TaskKind::kClassification;
  dataset.class_names = {"red", "blue"};
  dataset.preference = "conformance";
  for (int i = 0; i < 6; ++i) {
    orchestrator::SyntheticSample sample;
    sample.class_id = i % 2;
    sample.image = Probe(24, 24, DeriveSeed(seed, {static_cast<uint64_t>(i)}),
                         sample.class_id == 0 ? 220 : 20);
    dataset.samples.push_back(std::move(sample));
  }
  return dataset;
}

}  // namespace

bool ConformanceReport::AllPassed() const {
  for (const ConformanceCheck& check : checks) {
    if (!check.passed) return false;
  }
  return !checks.empty();
}

std::string ConformanceReport::Summary() const {
  std::string out;
  for (const ConformanceCheck& check : checks) {
    absl::StrAppend(&out, check.passed ? "PASS " : "FAIL ", check.name);
    if (!check.detail.empty()) absl::StrAppend(&out, ": ", check.detail);
    out += "\n";
  }
  return out;
}

absl::StatusOr<ConformanceReport> RunConformance(std::string_view url) {
  PRIVSYNTH_ASSIGN_OR_RETURN(std::unique_ptr<RemoteBackend> backend,
                             RemoteBackend::Create(url));
  const std::string host = backend->host();
  const std::string prefix =
      std::string(url.substr(std::min(url.size(), host.size())));
  auto path = [&prefix](std::string_view endpoint) {
    std::string base = prefix;
    while (!base.empty() && base.back() == '/') base.pop_back();
    return absl::StrCat(base, kBackendPath, "/", ToStd(endpoint));
  };

  ConformanceReport report;
  auto run = [&report](std::string name, const std::function<absl::Status()>& fn) {
    absl::Status status = fn();
    report.checks.push_back(
        {std::move(name), status.ok(), ToStd(status.message())});
  };

  orchestrator::BackendCapabilities caps;
  run("capabilities", [&]() -> absl::Status {
    PRIVSYNTH_ASSIGN_OR_RETURN(caps, backend->Capabilities());
    if (caps.provider.empty()) return Fail("empty provider");
    for (const std::string& endpoint : BackendEndpoints()) {
      if (std::find(caps.endpoints.begin(), caps.endpoints.end(), endpoint) ==
          caps.endpoints.end()) {
        return Fail(absl::StrCat("endpoint ", endpoint, " not advertised"));
      }
    }
    return absl::OkStatus();
  });

  run("request_id_echo", [&]() -> absl::Status {
    PRIVSYNTH_ASSIGN_OR_RETURN(
        RawResponse response,
        RawPost(host, path("capabilities"),
                Json{{"request_id", "conformance-echo"}}.dump()));
    if (response.status != 200) return Fail("capabilities call failed");
    if (response.body.value("request_id", "") != "conformance-echo") {
      return Fail("request_id not echoed");
    }
    return absl::OkStatus();
  });

  run("error_missing_request_id", [&]() -> absl::Status {
    PRIVSYNTH_ASSIGN_OR_RETURN(
        RawResponse response,
        RawPost(host, path("capabilities"), Json::object().dump()));
    return CheckEnvelope(response, 400, 499);
  });

  run("error_malformed_body", [&]() -> absl::Status {
    PRIVSYNTH_ASSIGN_OR_RETURN(
        RawResponse response, RawPost(host, path("generate"), "{not json"));
    return CheckEnvelope(response, 400, 499);
  });

  run("error_bad_field", [&]() -> absl::Status {
    Json request = {{"request_id", "conformance-bad"},
                    {"model_ref", "pretrained"},
                    {"prompt", "a dog"},
                    {"seed", 1},
                    {"want_alpha", true},
                    {"width", 0},
                    {"height", 32}};
    PRIVSYNTH_ASSIGN_OR_RETURN(
        RawResponse response, RawPost(host, path("generate"), request.dump()));
    PRIVSYNTH_RETURN_IF_ERROR(CheckEnvelope(response, 400, 499));
    if (response.body["error"]["retryable"].get<bool>()) {
      return Fail("schema errors must not be retryable");
    }
    return absl::OkStatus();
  });

  run("error_unknown_endpoint", [&]() -> absl::Status {
    PRIVSYNTH_ASSIGN_OR_RETURN(
        RawResponse response,
        RawPost(host, path("no_such_endpoint"),
                Json{{"request_id", "conformance-404"}}.dump()));
    return CheckEnvelope(response, 404, 404);
  });

  run("generate_alpha", [&]() -> absl::Status {
    PRIVSYNTH_ASSIGN_OR_RETURN(
        orchestrator::GeneratedImage out,
        backend->Generate("pretrained", "a dog", 11, true, 48, 40));
    if (!out.image.SameSize(48, 40)) return Fail("image size mismatch");
    if (!out.alpha.has_value() || !out.alpha->SameSize(48, 40)) {
      return Fail("alpha missing or mis-sized");
    }
    const size_t set = out.alpha->CountSet();
    if (set == 0 || set == out.alpha->size()) {
      return Fail("alpha is empty or full");
    }
    return absl::OkStatus();
  });

  run("generate_without_alpha", [&]() -> absl::Status {
    Json request = {{"request_id", "conformance-noalpha"},
                    {"model_ref", "pretrained"},
                    {"prompt", "a dog"},
                    {"seed", 11},
                    {"want_alpha", false},
                    {"width", 32},
                    {"height", 32}};
    PRIVSYNTH_ASSIGN_OR_RETURN(
        RawResponse response, RawPost(host, path("generate"), request.dump()));
    if (response.status != 200) return Fail("generate failed");
    if (response.body.contains("alpha")) return Fail("unrequested alpha");
    return ImageFromWire(response.body, "image", "").status();
  });

  run("generate_determinism", [&]() -> absl::Status {
    PRIVSYNTH_ASSIGN_OR_RETURN(
        orchestrator::GeneratedImage a,
        backend->Generate("pretrained", "a bedroom", 5, false, 32, 32));
    PRIVSYNTH_ASSIGN_OR_RETURN(
        orchestrator::GeneratedImage b,
        backend->Generate("pretrained", "a bedroom", 5, false, 32, 32));
    if (caps.deterministic && !(a.image == b.image)) {
      return Fail("declared deterministic but outputs differ");
    }
    return absl::OkStatus();
  });

  std::string model_ref;
  run("fine_tune", [&]() -> absl::Status {
    std::vector<RasterImage> refs = {Probe(32, 32, 1, 200),
                                     Probe(32, 32, 2, 210)};
    PRIVSYNTH_ASSIGN_OR_RETURN(
        model_ref,
        backend->FineTune("t", "dog", refs, orchestrator::DefaultFineTuneConfig()));
    if (model_ref.empty()) return Fail("empty model_ref");
    PRIVSYNTH_ASSIGN_OR_RETURN(
        orchestrator::GeneratedImage out,
        backend->Generate(model_ref, "a dog is sitting", 3, true, 32, 32));
    if (!out.image.SameSize(32, 32)) return Fail("tuned image size mismatch");
    return absl::OkStatus();
  });

  run("condition_generate", [&]() -> absl::Status {
    std::vector<RasterImage> features = {Probe(32, 24, 3, 255),
                                         Probe(32, 24, 4, 255)};
    PRIVSYNTH_ASSIGN_OR_RETURN(
        std::vector<RasterImage> images,
        backend->ConditionGenerate(features, "a dog", 9, 3));
    if (images.size() != 3) return Fail("wrong image count");
    for (const RasterImage& image : images) {
      if (!image.SameSize(32, 24)) return Fail("image size mismatch");
    }
    return absl::OkStatus();
  });

  run("inpaint_locality", [&]() -> absl::Status {
    RasterImage canvas = Probe(32, 32, 7, 90);
    BitMask mask(32, 32);
    for (int y = 0; y < 32; ++y) {
      for (int x = 0; x < 16; ++x) mask.set(x, y, true);
    }
    PRIVSYNTH_ASSIGN_OR_RETURN(
        RasterImage out,
        backend->Inpaint("pretrained", canvas, mask, "a bedroom", 4));
    if (!out.SameSize(32, 32)) return Fail("image size mismatch");
    const int channels = std::min(out.channels(), canvas.channels());
    for (int y = 0; y < 32; ++y) {
      for (int x = 16; x < 32; ++x) {
        for (int c = 0; c < channels; ++c) {
          if (out.at(x, y, c) != canvas.at(x, y, c)) {
            return Fail("pixels outside the mask changed");
          }
        }
      }
    }
    return absl::OkStatus();
  });

  run("embed", [&]() -> absl::Status {
    PRIVSYNTH_ASSIGN_OR_RETURN(
        std::vector<metrics::EmbeddingVector> images,
        backend->EmbedImages({Probe(24, 24, 1, 200), Probe(24, 24, 2, 30)}));
    PRIVSYNTH_ASSIGN_OR_RETURN(metrics::EmbeddingVector text,
                               backend->EmbedText("a dog"));
    if (images[0].dimension < 1 || images[0].dimension != images[1].dimension ||
        text.dimension != images[0].dimension) {
      return Fail("inconsistent embedding dimensions");
    }
    if (images[0].provider_id != text.provider_id) {
      return Fail("image and text embeddings from different providers");
    }
    return absl::OkStatus();
  });

  run("embed_empty_prompt_baseline", [&]() -> absl::Status {
    PRIVSYNTH_ASSIGN_OR_RETURN(metrics::EmbeddingVector a,
                               backend->EmbedText(""));
    PRIVSYNTH_ASSIGN_OR_RETURN(metrics::EmbeddingVector b,
                               backend->EmbedText(""));
    if (a.dimension < 1) return Fail("empty baseline");
    if (!(a == b)) return Fail("baseline not stable across calls");
    return absl::OkStatus();
  });

  run("segment", [&]() -> absl::Status {
    PRIVSYNTH_ASSIGN_OR_RETURN(sanitizer::ManifestEntry entry,
                               backend->Segment(Probe(40, 40, 8, 250), {"dog"}));
    const BitMask* target =
        entry.MaskFor(sanitizer::SegmentRole::Target(0));
    const BitMask* background =
        entry.MaskFor(sanitizer::SegmentRole::Background());
    if (target == nullptr || background == nullptr) {
      return Fail("missing target or background mask");
    }
    if (!target->SameSize(40, 40) || !(target->Complement() == *background)) {
      return Fail("background is not the complement of the target");
    }
    if (target->CountSet() == 0) return Fail("empty target mask");
    return absl::OkStatus();
  });

  run("feature", [&]() -> absl::Status {
    auto out = backend->ExtractFeature(Probe(32, 32, 5, 230),
                                       sanitizer::FeatureKind::kLayoutBox);
    if (!out.ok()) {
      // Declining a feature kind is allowed when it is declared properly.
      if (ErrorKindOf(out.status()) == ErrorKind::kUnsupportedFeature) {
        return absl::OkStatus();
      }
      return out.status();
    }
    if (!out->SameSize(32, 32)) return Fail("feature size mismatch");
    return absl::OkStatus();
  });

  run("train_predict", [&]() -> absl::Status {
    orchestrator::SyntheticDataset train = TinyDataset(21);
    orchestrator::SyntheticDataset validation = TinyDataset(22);
    Json config = {{"epochs", 2}, {"seed", 1}};
    PRIVSYNTH_ASSIGN_OR_RETURN(utility::TrainingRun run,
                               backend->Train(train, validation, config));
    if (run.epochs.empty()) return Fail("no epochs reported");
    for (const utility::EpochScore& epoch : run.epochs) {
      if (epoch.model_ref.empty()) return Fail("epoch without model_ref");
    }
    std::vector<RasterImage> images = {validation.samples[0].image,
                                       validation.samples[1].image};
    PRIVSYNTH_ASSIGN_OR_RETURN(
        std::vector<utility::Prediction> predictions,
        backend->Predict(run.epochs.back().model_ref, images));
    for (const utility::Prediction& p : predictions) {
      if (p.class_id < 0 || p.class_id > 1) return Fail("class out of range");
    }
    return absl::OkStatus();
  });

  return report;
}

}  // namespace privsynth::service
