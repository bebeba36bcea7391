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

#ifndef PRIVSYNTH_SERVICE_CONFIG_H_
#define PRIVSYNTH_SERVICE_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include "absl/status/statusor.h"
#include "privsynth/common/json_util.h"

namespace privsynth::service {

// Pipeline knobs of one job. Defaults come from the server config; a
// submission may override them per job through query parameters.
struct JobOptions {
  int count_per_class = 100;
  int detection_count = 200;
  int width = 64;
  int height = 64;
  uint64_t seed = 0;
  bool train = true;
  double train_fraction = 0.8;
  int epochs = 5;

  absl::Status Validate() const;
};

Json JobOptionsToJson(const JobOptions& options);
// Missing fields keep the values of `defaults`.
absl::StatusOr<JobOptions> JobOptionsFromJson(const Json& doc,
                                              const JobOptions& defaults);
// Same, from string values such as URL query parameters.
absl::StatusOr<JobOptions> JobOptionsFromStrings(
    const std::function<std::optional<std::string>(const std::string&)>& get,
    const JobOptions& defaults);

inline constexpr uint64_t kDefaultMaxPayloadBytes = 64ull << 20;

struct ServiceConfig {
  std::string host = "127.0.0.1";
  // 0 picks a free port.
  int port = 8080;
  // "mock" runs the built-in procedural backend in process.
  std::string backend_url = "mock";
  std::filesystem::path data_dir = "privsynth-data";
  // Limit on a submitted bundle.
  uint64_t max_payload_bytes = kDefaultMaxPayloadBytes;
  // Limit on backend protocol bodies, which carry whole datasets.
  uint64_t max_backend_payload_bytes = 1ull << 30;
  int workers = 2;
  // Global cap on concurrent calls to a remote backend.
  int backend_max_in_flight = 4;
  int backend_timeout_seconds = 600;
  JobOptions job_defaults;
};

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;

// Reads the process environment.
EnvLookup ProcessEnv();

// {"listen": "host:port", "backend_url", "data_dir", "max_payload_bytes",
//  "max_backend_payload_bytes", "seed", "workers", "backend_max_in_flight",
//  "backend_timeout_seconds", "job_defaults": {...}}. Every field is
// optional.
absl::StatusOr<ServiceConfig> ServiceConfigFromJson(const Json& doc);
Json ServiceConfigToJson(const ServiceConfig& config);

// Loads `path` when given, then applies PRIVSYNTH_LISTEN,
// PRIVSYNTH_BACKEND_URL, PRIVSYNTH_DATA_DIR, PRIVSYNTH_MAX_PAYLOAD,
// PRIVSYNTH_SEED and PRIVSYNTH_WORKERS.
absl::StatusOr<ServiceConfig> LoadServiceConfig(
    const std::optional<std::filesystem::path>& path,
    const EnvLookup& env = ProcessEnv());

// "host:port"; a bare ":port" or "port" listens on 127.0.0.1.
absl::Status ParseListen(std::string_view text, ServiceConfig& config);

}  // namespace privsynth::service

#endif  // PRIVSYNTH_SERVICE_CONFIG_H_
