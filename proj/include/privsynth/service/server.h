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

#ifndef PRIVSYNTH_SERVICE_SERVER_H_
#define PRIVSYNTH_SERVICE_SERVER_H_

#include <condition_variable>
#include <deque>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/time/time.h"
#include "privsynth/service/artifact_store.h"
#include "privsynth/service/backend_protocol.h"
#include "privsynth/service/config.h"
#include "privsynth/service/job.h"
#include "privsynth/service/job_store.h"

namespace httplib {
class Server;
}  // namespace httplib

namespace spdlog {
class logger;
}  // namespace spdlog

namespace privsynth::service {

// The long-running job server:
//
//   POST /v1/jobs               bundle body; optional Idempotency-Key header
//                               and query overrides of JobOptions
//   GET  /v1/jobs/{id}          job status and artifact index
//   GET  /v1/artifacts/{addr}   artifact bytes by sha256
//   /v1/backend/*               the backend protocol (see backend_protocol.h)
//
// Under data_dir: jobs.db (job table), inputs/ (submitted bodies),
// artifacts/ (outputs) and server.log.
class Server {
 public:
  // Builds the backends named by config.backend_url.
  static absl::StatusOr<std::unique_ptr<Server>> Create(
      const ServiceConfig& config);
  // Uses caller-owned backends instead; generation and training must be set.
  static absl::StatusOr<std::unique_ptr<Server>> Create(
      const ServiceConfig& config, const LocalBackends& backends);
  ~Server();

  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  // Binds, re-queues every unfinished job and starts the workers.
  absl::Status Start();
  // Stops accepting requests and joins the workers. A job interrupted
  // mid-pipeline keeps its state and resumes on the next Start.
  void Stop();

  int port() const { return port_; }
  std::string url() const;

  // The POST /v1/jobs logic without HTTP.
  absl::StatusOr<CreateResult> Submit(const std::string& body,
                                      const std::string& idempotency_key,
                                      const JobOptions& options);
  // Polls until the job is done or failed.
  absl::StatusOr<Job> WaitForJob(const std::string& id,
                                 absl::Duration timeout);

  JobStore& jobs() { return *jobs_; }
  ArtifactStore& artifacts() { return artifacts_; }
  const ServiceConfig& config() const { return config_; }

 private:
  Server(const ServiceConfig& config, std::unique_ptr<JobStore> jobs);

  void InstallRoutes();
  void Enqueue(const std::string& id);
  void WorkerLoop();
  void ProcessJob(const std::string& id);
  absl::Status RunPipeline(const std::string& id);
  // Moves forward to `to` unless a resumed job is already there or beyond.
  absl::Status Advance(const std::string& id, JobState to);
  absl::Status StoreArtifact(const std::string& id, ArtifactKind kind,
                             const std::string& bytes,
                             const std::string& media_type);

  ServiceConfig config_;
  std::unique_ptr<JobStore> jobs_;
  ArtifactStore artifacts_;
  ArtifactStore inputs_;
  std::shared_ptr<spdlog::logger> log_;

  // Backends built from the config; `backends_` points at them or at
  // caller-owned ones.
  std::vector<std::shared_ptr<void>> owned_backends_;
  LocalBackends backends_;

  std::unique_ptr<httplib::Server> http_;
  std::thread http_thread_;
  int port_ = 0;

  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<std::string> queue_;
  bool stopping_ = false;
  bool started_ = false;
  std::vector<std::thread> workers_;
};

}  // namespace privsynth::service

#endif  // PRIVSYNTH_SERVICE_SERVER_H_
