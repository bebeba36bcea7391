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

#include "privsynth/service/server.h"

#include <spdlog/logger.h>
#include <spdlog/sinks/basic_file_sink.h>

#include <atomic>
#include <chrono>
#include <utility>

#include "absl/strings/str_cat.h"
#include "absl/time/clock.h"
#include "httplib.h"
#include "privsynth/common/seed.h"
#include "privsynth/common/status.h"
#include "privsynth/mock/backends.h"
#include "privsynth/orchestrator/assemble.h"
#include "privsynth/orchestrator/dataset.h"
#include "privsynth/orchestrator/plan.h"
#include "privsynth/sanitizer/wire.h"
#include "privsynth/service/remote_backend.h"
#include "privsynth/utility/evaluate.h"

namespace privsynth::service {
namespace {

constexpr char kJson[] = "application/json";

// Marks the switch from training to evaluation on the first prediction.
class StageTracker : public utility::TrainingBackend {
 public:
  StageTracker(utility::TrainingBackend& inner,
               std::function<absl::Status()> on_evaluate)
      : inner_(inner), on_evaluate_(std::move(on_evaluate)) {}

  absl::StatusOr<utility::TrainingRun> Train(
      const orchestrator::SyntheticDataset& train,
      const orchestrator::SyntheticDataset& validation,
      const Json& config) override {
    return inner_.Train(train, validation, config);
  }
  absl::StatusOr<std::vector<utility::Prediction>> Predict(
      const std::string& model_ref,
      const std::vector<imaging::RasterImage>& images) override {
    if (!evaluating_) {
      evaluating_ = true;
      PRIVSYNTH_RETURN_IF_ERROR(on_evaluate_());
    }
    return inner_.Predict(model_ref, images);
  }

 private:
  utility::TrainingBackend& inner_;
  std::function<absl::Status()> on_evaluate_;
  bool evaluating_ = false;
};

void SendJson(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

void SendError(httplib::Response& res, const absl::Status& status) {
  SendJson(res, HttpStatusFor(status), ErrorEnvelope(status));
}

std::string LoggerName() {
  static std::atomic<int> counter{0};
  return absl::StrCat("privsynth-server-", counter.fetch_add(1));
}

}  // namespace

absl::StatusOr<std::unique_ptr<Server>> Server::Create(
    const ServiceConfig& config) {
  LocalBackends none;
  PRIVSYNTH_ASSIGN_OR_RETURN(std::unique_ptr<Server> server,
                             Create(config, none));
  if (config.backend_url == "mock") {
    auto generation = std::make_shared<mock::MockGenerationBackend>();
    auto embedding = std::make_shared<mock::MockEmbeddingProvider>();
    auto training = std::make_shared<mock::MockTrainingBackend>();
    auto features = std::make_shared<mock::MockFeatureService>();
    auto segmentation = std::make_shared<mock::MockSegmentationService>();
    server->backends_ = {generation.get(), embedding.get(), training.get(),
                         features.get(), segmentation.get()};
    server->owned_backends_ = {generation, embedding, training, features,
                               segmentation};
  } else {
    RemoteOptions options;
    options.max_in_flight = config.backend_max_in_flight;
    options.read_timeout_seconds = config.backend_timeout_seconds;
    PRIVSYNTH_ASSIGN_OR_RETURN(std::unique_ptr<RemoteBackend> remote,
                               RemoteBackend::Create(config.backend_url,
                                                     options));
    std::shared_ptr<RemoteBackend> shared = std::move(remote);
    server->backends_ = {shared.get(), shared.get(), shared.get(),
                         shared.get(), shared.get()};
    server->owned_backends_ = {shared};
  }
  return server;
}

absl::StatusOr<std::unique_ptr<Server>> Server::Create(
    const ServiceConfig& config, const LocalBackends& backends) {
  std::error_code ec;
  std::filesystem::create_directories(config.data_dir, ec);
  if (ec) {
    return MakeError(ErrorKind::kIo,
                     absl::StrCat("cannot create ", config.data_dir.string(),
                                  ": ", ec.message()));
  }
  PRIVSYNTH_ASSIGN_OR_RETURN(std::unique_ptr<JobStore> jobs,
                             JobStore::Open(config.data_dir / "jobs.db"));
  std::unique_ptr<Server> server(new Server(config, std::move(jobs)));
  server->backends_ = backends;
  return server;
}

Server::Server(const ServiceConfig& config, std::unique_ptr<JobStore> jobs)
    : config_(config),
      jobs_(std::move(jobs)),
      artifacts_(config.data_dir / "artifacts"),
      inputs_(config.data_dir / "inputs") {
  auto sink = std::make_shared<spdlog::sinks::basic_file_sink_mt>(
      (config.data_dir / "server.log").string());
  log_ = std::make_shared<spdlog::logger>(LoggerName(), std::move(sink));
  log_->flush_on(spdlog::level::info);
}

Server::~Server() { Stop(); }

std::string Server::url() const {
  return absl::StrCat("http://", config_.host, ":", port_);
}

absl::Status Server::Start() {
  if (started_) return absl::OkStatus();
  if (backends_.generation == nullptr || backends_.training == nullptr) {
    return MakeError(ErrorKind::kInvalidArgument,
                     "server needs generation and training backends");
  }
  http_ = std::make_unique<httplib::Server>();
  InstallRoutes();
  if (config_.port == 0) {
    port_ = http_->bind_to_any_port(config_.host);
  } else {
    port_ = http_->bind_to_port(config_.host, config_.port) ? config_.port
                                                            : -1;
  }
  if (port_ <= 0) {
    return MakeError(ErrorKind::kIo,
                     absl::StrCat("cannot listen on ", config_.host, ":",
                                  config_.port));
  }
  http_thread_ = std::thread([this] { http_->listen_after_bind(); });
  {
    std::lock_guard<std::mutex> lock(mu_);
    stopping_ = false;
    started_ = true;
  }
  PRIVSYNTH_ASSIGN_OR_RETURN(std::vector<std::string> active,
                             jobs_->ListActive());
  for (const std::string& id : active) {
    log_->info("resuming job {}", id);
    Enqueue(id);
  }
  for (int i = 0; i < config_.workers; ++i) {
    workers_.emplace_back([this] { WorkerLoop(); });
  }
  log_->info("listening on {}:{} with {} workers, backend {}", config_.host,
             port_, config_.workers, config_.backend_url);
  return absl::OkStatus();
}

void Server::Stop() {
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (!started_) return;
    stopping_ = true;
    started_ = false;
  }
  cv_.notify_all();
  if (http_ != nullptr) http_->stop();
  if (http_thread_.joinable()) http_thread_.join();
  for (std::thread& worker : workers_) worker.join();
  workers_.clear();
  std::lock_guard<std::mutex> lock(mu_);
  queue_.clear();
  log_->info("stopped");
}

void Server::InstallRoutes() {
  httplib::Server& http = *http_;
  http.set_payload_max_length(
      std::max(config_.max_payload_bytes, config_.max_backend_payload_bytes));

  // Oversized bundles are refused from the headers, before the body is read.
  http.set_pre_routing_handler([this](const httplib::Request& req,
                                      httplib::Response& res) {
    if (req.method != "POST" || req.path != "/v1/jobs") {
      return httplib::Server::HandlerResponse::Unhandled;
    }
    const uint64_t length = req.get_header_value_u64("Content-Length");
    if (length <= config_.max_payload_bytes) {
      return httplib::Server::HandlerResponse::Unhandled;
    }
    log_->warn("rejected bundle of {} bytes", length);
    SendError(res, MakeError(ErrorKind::kPayloadTooLarge,
                             absl::StrCat("bundle of ", length,
                                          " bytes exceeds the limit of ",
                                          config_.max_payload_bytes)));
    res.set_header("Connection", "close");
    return httplib::Server::HandlerResponse::Handled;
  });

  // Fills the envelope for errors raised inside httplib (unknown routes,
  // unreadable bodies).
  http.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return httplib::Server::HandlerResponse::Unhandled;
    ErrorKind kind = ErrorKind::kInvalidArgument;
    if (res.status == 404) kind = ErrorKind::kNotFound;
    if (res.status == 413) kind = ErrorKind::kPayloadTooLarge;
    if (res.status >= 500) kind = ErrorKind::kIo;
    SendJson(res, res.status,
             ErrorEnvelope(MakeError(kind, httplib::status_message(res.status))));
    return httplib::Server::HandlerResponse::Handled;
  });

  http.set_exception_handler(
      [](const httplib::Request&, httplib::Response& res, std::exception_ptr) {
        SendError(res, MakeError(ErrorKind::kIo, "internal error"));
      });

  http.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
    SendJson(res, 200, Json{{"status", "ok"}});
  });

  http.Post("/v1/jobs", [this](const httplib::Request& req,
                               httplib::Response& res) {
    auto options = JobOptionsFromStrings(
        [&req](const std::string& key) -> std::optional<std::string> {
          if (!req.has_param(key)) return std::nullopt;
          return req.get_param_value(key);
        },
        config_.job_defaults);
    if (!options.ok()) {
      SendError(res, options.status());
      return;
    }
    auto result =
        Submit(req.body, req.get_header_value("Idempotency-Key"), *options);
    if (!result.ok()) {
      SendError(res, result.status());
      return;
    }
    SendJson(res, result->created ? 202 : 200, JobToJson(result->job));
  });

  http.Get(R"(/v1/jobs/([A-Za-z0-9_-]+))",
           [this](const httplib::Request& req, httplib::Response& res) {
             auto job = jobs_->Get(req.matches[1]);
             if (!job.ok()) {
               SendError(res, job.status());
               return;
             }
             SendJson(res, 200, JobToJson(*job));
           });

  http.Get(R"(/v1/artifacts/([^/]+))",
           [this](const httplib::Request& req, httplib::Response& res) {
             const std::string address = req.matches[1];
             auto bytes = artifacts_.Get(address);
             if (!bytes.ok()) {
               SendError(res, bytes.status());
               return;
             }
             auto media_type = artifacts_.MediaType(address);
             res.status = 200;
             res.set_content(*std::move(bytes),
                             media_type.ok() ? *media_type
                                             : "application/octet-stream");
           });

  MountBackend(http, backends_);
}

absl::StatusOr<CreateResult> Server::Submit(const std::string& body,
                                            const std::string& idempotency_key,
                                            const JobOptions& options) {
  if (body.size() > config_.max_payload_bytes) {
    return MakeError(ErrorKind::kPayloadTooLarge,
                     absl::StrCat("bundle of ", body.size(),
                                  " bytes exceeds the limit of ",
                                  config_.max_payload_bytes));
  }
  PRIVSYNTH_RETURN_IF_ERROR(options.Validate());
  auto bundle = sanitizer::ParseBundle(body);
  if (!bundle.ok()) {
    log_->warn("rejected bundle: {}", ToStd(bundle.status().message()));
    return bundle.status();
  }
  const Json options_doc = JobOptionsToJson(options);
  NewJob request;
  request.idempotency_key = idempotency_key;
  request.fingerprint = Sha256Hex(absl::StrCat(body, "\n", options_doc.dump()));
  request.options = options_doc;
  PRIVSYNTH_ASSIGN_OR_RETURN(request.input_address,
                             inputs_.Put(body, kJson));
  PRIVSYNTH_ASSIGN_OR_RETURN(CreateResult result, jobs_->Create(request));
  if (result.created) {
    log_->info("job {} queued: {} bytes, {} images, {} payloads",
               result.job.id, body.size(), bundle->entries.size(),
               bundle->PayloadCount());
    Enqueue(result.job.id);
  } else {
    log_->info("job {} resubmitted with its idempotency key", result.job.id);
  }
  return result;
}

absl::StatusOr<Job> Server::WaitForJob(const std::string& id,
                                       absl::Duration timeout) {
  const absl::Time deadline = absl::Now() + timeout;
  while (true) {
    PRIVSYNTH_ASSIGN_OR_RETURN(Job job, jobs_->Get(id));
    if (IsTerminal(job.state)) return job;
    if (absl::Now() > deadline) {
      return absl::DeadlineExceededError(
          absl::StrCat("job ", id, " still ", ToStd(JobStateName(job.state))));
    }
    absl::SleepFor(absl::Milliseconds(10));
  }
}

void Server::Enqueue(const std::string& id) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    queue_.push_back(id);
  }
  cv_.notify_one();
}

void Server::WorkerLoop() {
  while (true) {
    std::string id;
    {
      std::unique_lock<std::mutex> lock(mu_);
      cv_.wait(lock, [this] { return stopping_ || !queue_.empty(); });
      if (stopping_) return;
      id = std::move(queue_.front());
      queue_.pop_front();
    }
    ProcessJob(id);
  }
}

void Server::ProcessJob(const std::string& id) {
  absl::Status status = RunPipeline(id);
  if (status.ok()) {
    status = Advance(id, JobState::kDone);
    if (status.ok()) {
      log_->info("job {} done", id);
      return;
    }
  }
  if (status.code() == absl::StatusCode::kCancelled) {
    log_->info("job {} interrupted; it resumes on restart", id);
    return;
  }
  auto job = jobs_->Get(id);
  JobError error;
  error.step = job.ok() ? std::string(JobStateName(job->state)) : "unknown";
  const std::optional<ErrorKind> kind = ErrorKindOf(status);
  error.kind = kind.has_value()
                   ? std::string(ErrorKindName(*kind))
                   : ToStd(absl::StatusCodeToString(status.code()));
  error.message = ToStd(status.message());
  log_->error("job {} failed in {}: {}: {}", id, error.step, error.kind,
              error.message);
  absl::Status recorded = jobs_->Fail(id, error);
  if (!recorded.ok()) {
    log_->error("job {}: cannot record failure: {}", id,
                ToStd(recorded.message()));
  }
}

absl::Status Server::Advance(const std::string& id, JobState to) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (stopping_ && to != JobState::kDone) {
      return absl::CancelledError("server stopping");
    }
  }
  PRIVSYNTH_ASSIGN_OR_RETURN(Job job, jobs_->Get(id));
  if (static_cast<int>(job.state) >= static_cast<int>(to)) {
    return absl::OkStatus();
  }
  log_->info("job {} {} -> {}", id, JobStateName(job.state), JobStateName(to));
  return jobs_->Transition(id, to);
}

absl::Status Server::StoreArtifact(const std::string& id, ArtifactKind kind,
                                   const std::string& bytes,
                                   const std::string& media_type) {
  PRIVSYNTH_ASSIGN_OR_RETURN(std::string address,
                             artifacts_.Put(bytes, media_type));
  ArtifactRef ref{kind, address, media_type, bytes.size()};
  log_->info("job {} stored {} {} ({} bytes)", id, ArtifactKindName(kind),
             address, bytes.size());
  return jobs_->AddArtifact(id, ref);
}

absl::Status Server::RunPipeline(const std::string& id) {
  PRIVSYNTH_ASSIGN_OR_RETURN(Job job, jobs_->Get(id));
  if (IsTerminal(job.state)) return absl::OkStatus();
  PRIVSYNTH_ASSIGN_OR_RETURN(JobOptions options,
                             JobOptionsFromJson(job.options, JobOptions{}));

  PRIVSYNTH_RETURN_IF_ERROR(Advance(id, JobState::kSanitizingReceived));
  PRIVSYNTH_ASSIGN_OR_RETURN(std::string input_address,
                             jobs_->InputAddress(id));
  PRIVSYNTH_ASSIGN_OR_RETURN(std::string body, inputs_.Get(input_address));
  PRIVSYNTH_ASSIGN_OR_RETURN(sanitizer::SanitizedBundle bundle,
                             sanitizer::ParseBundle(body));
  body.clear();

  PRIVSYNTH_RETURN_IF_ERROR(Advance(id, JobState::kFineTuning));
  orchestrator::AssembleOptions assemble;
  assemble.count_per_class = options.count_per_class;
  assemble.detection_count = options.detection_count;
  assemble.width = options.width;
  assemble.height = options.height;
  assemble.seed = DeriveSeed(options.seed, {0x6E});
  assemble.max_in_flight = config_.backend_max_in_flight;
  PRIVSYNTH_ASSIGN_OR_RETURN(orchestrator::FineTunePlan plan,
                             orchestrator::PlanFineTune(bundle));
  PRIVSYNTH_ASSIGN_OR_RETURN(
      orchestrator::GenerationModels models,
      orchestrator::PrepareModels(plan, bundle.request, *backends_.generation,
                                  orchestrator::DefaultFineTuneConfig(),
                                  DeriveSeed(assemble.seed, {0xF1})));

  PRIVSYNTH_RETURN_IF_ERROR(Advance(id, JobState::kGenerating));
  PRIVSYNTH_ASSIGN_OR_RETURN(
      orchestrator::SyntheticDataset dataset,
      orchestrator::AssembleDataset(bundle.request, models,
                                    *backends_.generation, assemble,
                                    bundle.preference.Format()));
  PRIVSYNTH_ASSIGN_OR_RETURN(Json dataset_doc,
                             orchestrator::DatasetToJson(dataset));
  PRIVSYNTH_RETURN_IF_ERROR(
      StoreArtifact(id, ArtifactKind::kDataset, dataset_doc.dump(), kJson));
  dataset_doc = nullptr;
  if (!options.train) return absl::OkStatus();

  PRIVSYNTH_RETURN_IF_ERROR(Advance(id, JobState::kTraining));
  auto split = utility::SplitDataset(dataset, options.train_fraction,
                                     DeriveSeed(options.seed, {0x5B}));
  if (!split.ok()) return split.status();
  Json config = utility::DefaultTrainingConfig(dataset.task);
  config["epochs"] = options.epochs;
  config["seed"] = DeriveSeed(options.seed, {0x54});
  StageTracker tracker(*backends_.training, [this, &id] {
    // A stop request surfaces at the next stage boundary instead.
    absl::Status status = Advance(id, JobState::kEvaluating);
    return absl::IsCancelled(status) ? absl::OkStatus() : status;
  });
  // Without a separate test set the held-out split doubles as one.
  PRIVSYNTH_ASSIGN_OR_RETURN(
      utility::UtilityReport report,
      utility::RunUtility(split->first, split->second, split->second, tracker,
                          config, options.train_fraction));
  PRIVSYNTH_RETURN_IF_ERROR(Advance(id, JobState::kEvaluating));
  PRIVSYNTH_RETURN_IF_ERROR(StoreArtifact(id, ArtifactKind::kModelWeights,
                                          report.model_ref,
                                          "application/octet-stream"));
  return StoreArtifact(id, ArtifactKind::kUtilityReport,
                       utility::UtilityReportToJson(report).dump(2), kJson);
}

}  // namespace privsynth::service
