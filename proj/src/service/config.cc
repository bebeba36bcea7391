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

#include "privsynth/service/config.h"

#include <cstdlib>
#include <utility>

#include "absl/strings/ascii.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "privsynth/common/status.h"

namespace privsynth::service {
namespace {

absl::Status Invalid(std::string_view field, std::string_view message) {
  return MakeError(ErrorKind::kInvalidArgument,
                   absl::StrCat(ToStd(field), ": ", ToStd(message)));
}

absl::StatusOr<bool> ParseBool(std::string_view field, std::string text) {
  absl::AsciiStrToLower(&text);
  if (text == "1" || text == "true" || text == "yes") return true;
  if (text == "0" || text == "false" || text == "no") return false;
  return Invalid(field, absl::StrCat("not a boolean: '", text, "'"));
}

template <typename T>
absl::StatusOr<T> ParseNumber(std::string_view field, const std::string& text) {
  T value;
  if (!absl::SimpleAtoi(text, &value)) {
    return Invalid(field, absl::StrCat("not an integer: '", text, "'"));
  }
  return value;
}

absl::StatusOr<double> ParseReal(std::string_view field,
                                 const std::string& text) {
  double value;
  if (!absl::SimpleAtod(text, &value)) {
    return Invalid(field, absl::StrCat("not a number: '", text, "'"));
  }
  return value;
}

// JSON values are rendered as strings so files and query parameters share
// one parser.
std::optional<std::string> JsonField(const Json& doc, const std::string& key) {
  if (!doc.contains(key)) return std::nullopt;
  const Json& value = doc[key];
  if (value.is_string()) return value.get<std::string>();
  return value.dump();
}

}  // namespace

absl::Status JobOptions::Validate() const {
  if (count_per_class < 1 || count_per_class > 100000) {
    return Invalid("count_per_class", "must be in [1, 100000]");
  }
  if (detection_count < 1 || detection_count > 100000) {
    return Invalid("detection_count", "must be in [1, 100000]");
  }
  if (width < 16 || width > 4096 || height < 16 || height > 4096) {
    return Invalid("width/height", "must be in [16, 4096]");
  }
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    return Invalid("train_fraction", "must be in (0, 1)");
  }
  if (epochs < 0 || epochs > 1000) {
    return Invalid("epochs", "must be in [0, 1000]");
  }
  return absl::OkStatus();
}

Json JobOptionsToJson(const JobOptions& options) {
  return {{"count_per_class", options.count_per_class},
          {"detection_count", options.detection_count},
          {"width", options.width},
          {"height", options.height},
          {"seed", options.seed},
          {"train", options.train},
          {"train_fraction", options.train_fraction},
          {"epochs", options.epochs}};
}

absl::StatusOr<JobOptions> JobOptionsFromStrings(
    const std::function<std::optional<std::string>(const std::string&)>& get,
    const JobOptions& defaults) {
  JobOptions options = defaults;
  if (auto v = get("count_per_class")) {
    PRIVSYNTH_ASSIGN_OR_RETURN(options.count_per_class,
                               ParseNumber<int>("count_per_class", *v));
  }
  if (auto v = get("detection_count")) {
    PRIVSYNTH_ASSIGN_OR_RETURN(options.detection_count,
                               ParseNumber<int>("detection_count", *v));
  }
  if (auto v = get("width")) {
    PRIVSYNTH_ASSIGN_OR_RETURN(options.width, ParseNumber<int>("width", *v));
  }
  if (auto v = get("height")) {
    PRIVSYNTH_ASSIGN_OR_RETURN(options.height, ParseNumber<int>("height", *v));
  }
  if (auto v = get("seed")) {
    PRIVSYNTH_ASSIGN_OR_RETURN(options.seed, ParseNumber<uint64_t>("seed", *v));
  }
  if (auto v = get("train")) {
    PRIVSYNTH_ASSIGN_OR_RETURN(options.train, ParseBool("train", *v));
  }
  if (auto v = get("train_fraction")) {
    PRIVSYNTH_ASSIGN_OR_RETURN(options.train_fraction,
                               ParseReal("train_fraction", *v));
  }
  if (auto v = get("epochs")) {
    PRIVSYNTH_ASSIGN_OR_RETURN(options.epochs, ParseNumber<int>("epochs", *v));
  }
  PRIVSYNTH_RETURN_IF_ERROR(options.Validate());
  return options;
}

absl::StatusOr<JobOptions> JobOptionsFromJson(const Json& doc,
                                              const JobOptions& defaults) {
  if (!doc.is_object()) return Invalid("job options", "expected an object");
  return JobOptionsFromStrings(
      [&doc](const std::string& key) { return JsonField(doc, key); },
      defaults);
}

EnvLookup ProcessEnv() {
  return [](const std::string& name) -> std::optional<std::string> {
    const char* value = std::getenv(name.c_str());
    if (value == nullptr || *value == '\0') return std::nullopt;
    return std::string(value);
  };
}

absl::Status ParseListen(std::string_view text, ServiceConfig& config) {
  std::string host = "127.0.0.1";
  std::string port_text(text);
  const size_t colon = text.rfind(':');
  if (colon != std::string_view::npos) {
    if (colon > 0) host = std::string(text.substr(0, colon));
    port_text = std::string(text.substr(colon + 1));
  }
  int port;
  if (!absl::SimpleAtoi(port_text, &port) || port < 0 || port > 65535) {
    return Invalid("listen", absl::StrCat("bad address '", ToStd(text), "'"));
  }
  config.host = host;
  config.port = port;
  return absl::OkStatus();
}

absl::StatusOr<ServiceConfig> ServiceConfigFromJson(const Json& doc) {
  if (!doc.is_object()) return Invalid("config", "expected an object");
  ServiceConfig config;
  auto field = [&doc](const std::string& key) { return JsonField(doc, key); };
  if (auto v = field("listen")) PRIVSYNTH_RETURN_IF_ERROR(ParseListen(*v, config));
  if (auto v = field("backend_url")) config.backend_url = *v;
  if (auto v = field("data_dir")) config.data_dir = *v;
  if (auto v = field("max_payload_bytes")) {
    PRIVSYNTH_ASSIGN_OR_RETURN(config.max_payload_bytes,
                               ParseNumber<uint64_t>("max_payload_bytes", *v));
  }
  if (auto v = field("max_backend_payload_bytes")) {
    PRIVSYNTH_ASSIGN_OR_RETURN(
        config.max_backend_payload_bytes,
        ParseNumber<uint64_t>("max_backend_payload_bytes", *v));
  }
  if (auto v = field("workers")) {
    PRIVSYNTH_ASSIGN_OR_RETURN(config.workers, ParseNumber<int>("workers", *v));
  }
  if (auto v = field("backend_max_in_flight")) {
    PRIVSYNTH_ASSIGN_OR_RETURN(config.backend_max_in_flight,
                               ParseNumber<int>("backend_max_in_flight", *v));
  }
  if (auto v = field("backend_timeout_seconds")) {
    PRIVSYNTH_ASSIGN_OR_RETURN(config.backend_timeout_seconds,
                               ParseNumber<int>("backend_timeout_seconds", *v));
  }
  if (doc.contains("job_defaults")) {
    PRIVSYNTH_ASSIGN_OR_RETURN(
        config.job_defaults,
        JobOptionsFromJson(doc["job_defaults"], config.job_defaults));
  }
  if (auto v = field("seed")) {
    PRIVSYNTH_ASSIGN_OR_RETURN(config.job_defaults.seed,
                               ParseNumber<uint64_t>("seed", *v));
  }
  return config;
}

Json ServiceConfigToJson(const ServiceConfig& config) {
  return {{"listen", absl::StrCat(config.host, ":", config.port)},
          {"backend_url", config.backend_url},
          {"data_dir", config.data_dir.string()},
          {"max_payload_bytes", config.max_payload_bytes},
          {"max_backend_payload_bytes", config.max_backend_payload_bytes},
          {"seed", config.job_defaults.seed},
          {"workers", config.workers},
          {"backend_max_in_flight", config.backend_max_in_flight},
          {"backend_timeout_seconds", config.backend_timeout_seconds},
          {"job_defaults", JobOptionsToJson(config.job_defaults)}};
}

absl::StatusOr<ServiceConfig> LoadServiceConfig(
    const std::optional<std::filesystem::path>& path, const EnvLookup& env) {
  ServiceConfig config;
  if (path.has_value()) {
    PRIVSYNTH_ASSIGN_OR_RETURN(Json doc, ReadJsonFile(*path));
    auto parsed = ServiceConfigFromJson(doc);
    if (!parsed.ok()) return Annotate(parsed.status(), path->string());
    config = *std::move(parsed);
  }
  if (auto v = env("PRIVSYNTH_LISTEN")) {
    PRIVSYNTH_RETURN_IF_ERROR(ParseListen(*v, config));
  }
  if (auto v = env("PRIVSYNTH_BACKEND_URL")) config.backend_url = *v;
  if (auto v = env("PRIVSYNTH_DATA_DIR")) config.data_dir = *v;
  if (auto v = env("PRIVSYNTH_MAX_PAYLOAD")) {
    PRIVSYNTH_ASSIGN_OR_RETURN(
        config.max_payload_bytes,
        ParseNumber<uint64_t>("PRIVSYNTH_MAX_PAYLOAD", *v));
  }
  if (auto v = env("PRIVSYNTH_SEED")) {
    PRIVSYNTH_ASSIGN_OR_RETURN(config.job_defaults.seed,
                               ParseNumber<uint64_t>("PRIVSYNTH_SEED", *v));
  }
  if (auto v = env("PRIVSYNTH_WORKERS")) {
    PRIVSYNTH_ASSIGN_OR_RETURN(config.workers,
                               ParseNumber<int>("PRIVSYNTH_WORKERS", *v));
  }
  if (config.workers < 0) return Invalid("workers", "must be >= 0");
  if (config.backend_max_in_flight < 1) {
    return Invalid("backend_max_in_flight", "must be >= 1");
  }
  if (config.max_payload_bytes == 0) {
    return Invalid("max_payload_bytes", "must be positive");
  }
  return config;
}

}  // namespace privsynth::service
