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

#include <cstdlib>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "absl/strings/str_cat.h"
#include "absl/time/clock.h"
#include "gtest/gtest.h"
#include "httplib.h"
#include "privsynth/common/status.h"
#include "privsynth/experiment/corpus.h"
#include "privsynth/mock/backends.h"
#include "privsynth/orchestrator/dataset.h"
#include "privsynth/sanitizer/sanitize.h"
#include "privsynth/sanitizer/wire.h"
#include "privsynth/service/artifact_store.h"
#include "privsynth/service/audit.h"
#include "privsynth/service/backend_protocol.h"
#include "privsynth/service/config.h"
#include "privsynth/service/conformance.h"
#include "privsynth/service/job.h"
#include "privsynth/service/job_store.h"
#include "privsynth/service/remote_backend.h"
#include "privsynth/service/server.h"
#include "privsynth/utility/evaluate.h"

namespace privsynth::service {
namespace {

namespace fs = std::filesystem;
using sanitizer::PrivacyPreference;

fs::path FreshDir(std::string_view name) {
  fs::path dir = fs::path(::testing::TempDir()) / "privsynth_service" /
                 std::string(name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

const experiment::Corpus& SmallCorpus() {
  static const auto* corpus = [] {
    experiment::CorpusOptions options;
    options.reference_images = 5;
    options.test_images = 1;
    options.seed = 11;
    auto made = experiment::MakeCorpus(options);
    EXPECT_TRUE(made.ok()) << made.status();
    return new experiment::Corpus(*std::move(made));
  }();
  return *corpus;
}

std::string BundleBody(std::string_view preference) {
  const experiment::Corpus& corpus = SmallCorpus();
  auto pref = PrivacyPreference::Parse(preference);
  EXPECT_TRUE(pref.ok()) << pref.status();
  sanitizer::SanitizeOptions options;
  options.seed = 4;
  auto bundle = sanitizer::BuildBundle(corpus.request, corpus.images,
                                       corpus.manifest, *pref, options);
  EXPECT_TRUE(bundle.ok()) << bundle.status();
  auto body = sanitizer::SerializeBundle(*bundle);
  EXPECT_TRUE(body.ok()) << body.status();
  return *body;
}

JobOptions SmallJob() {
  JobOptions options;
  options.count_per_class = 4;
  options.detection_count = 8;
  options.width = 48;
  options.height = 48;
  options.seed = 9;
  options.epochs = 2;
  return options;
}

ServiceConfig TestConfig(const fs::path& dir, int workers = 1) {
  ServiceConfig config;
  config.port = 0;
  config.data_dir = dir;
  config.workers = workers;
  config.job_defaults = SmallJob();
  return config;
}

std::unique_ptr<Server> StartServer(const ServiceConfig& config) {
  auto server = Server::Create(config);
  EXPECT_TRUE(server.ok()) << server.status();
  absl::Status started = (*server)->Start();
  EXPECT_TRUE(started.ok()) << started;
  return *std::move(server);
}

Json ParseBody(const httplib::Result& result) {
  EXPECT_TRUE(result);
  auto doc = ParseJson(result->body, "response");
  EXPECT_TRUE(doc.ok()) << doc.status();
  return *doc;
}

TEST(JobStateTest, OnlyForwardTransitions) {
  const std::vector<JobState> order = {
      JobState::kQueued,     JobState::kSanitizingReceived,
      JobState::kFineTuning, JobState::kGenerating,
      JobState::kTraining,   JobState::kEvaluating,
      JobState::kDone};
  for (size_t i = 0; i < order.size(); ++i) {
    for (size_t j = 0; j < order.size(); ++j) {
      EXPECT_EQ(CanTransition(order[i], order[j]),
                j > i && order[i] != JobState::kDone)
          << JobStateName(order[i]) << " -> " << JobStateName(order[j]);
    }
    EXPECT_EQ(CanTransition(order[i], JobState::kFailed),
              order[i] != JobState::kDone);
    EXPECT_FALSE(CanTransition(JobState::kFailed, order[i]));
  }
  for (JobState state : order) {
    auto parsed = ParseJobState(JobStateName(state));
    ASSERT_TRUE(parsed.ok());
    EXPECT_EQ(*parsed, state);
  }
}

TEST(ArtifactStoreTest, ContentAddressedAndImmutable) {
  EXPECT_EQ(Sha256Hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  ArtifactStore store(FreshDir("artifacts"));
  auto a = store.Put("hello", "text/plain");
  ASSERT_TRUE(a.ok()) << a.status();
  EXPECT_EQ(*a, Sha256Hex("hello"));
  auto again = store.Put("hello", "application/json");
  ASSERT_TRUE(again.ok());
  EXPECT_EQ(*again, *a);
  EXPECT_EQ(*store.Get(*a), "hello");
  // The first writer's media type sticks.
  EXPECT_EQ(*store.MediaType(*a), "text/plain");
  EXPECT_EQ(ErrorKindOf(store.Get(Sha256Hex("absent")).status()),
            ErrorKind::kNotFound);
  EXPECT_EQ(ErrorKindOf(store.Get("../jobs.db").status()), ErrorKind::kNotFound);
}

TEST(JobStoreTest, LifecycleIdempotencyAndPersistence) {
  const fs::path dir = FreshDir("jobstore");
  std::string id;
  {
    auto store = JobStore::Open(dir / "jobs.db");
    ASSERT_TRUE(store.ok()) << store.status();
    NewJob request{"key-1", "fp-1", "addr", Json{{"seed", 1}}};
    auto created = (*store)->Create(request);
    ASSERT_TRUE(created.ok()) << created.status();
    EXPECT_TRUE(created->created);
    EXPECT_EQ(created->job.state, JobState::kQueued);
    id = created->job.id;

    auto replay = (*store)->Create(request);
    ASSERT_TRUE(replay.ok());
    EXPECT_FALSE(replay->created);
    EXPECT_EQ(replay->job.id, id);

    NewJob changed = request;
    changed.fingerprint = "fp-2";
    EXPECT_EQ(ErrorKindOf((*store)->Create(changed).status()),
              ErrorKind::kConflict);

    // Without a key every submission is a new job.
    NewJob anonymous{"", "fp-1", "addr", Json::object()};
    auto first = (*store)->Create(anonymous);
    auto second = (*store)->Create(anonymous);
    ASSERT_TRUE(first.ok() && second.ok());
    EXPECT_NE(first->job.id, second->job.id);

    ASSERT_TRUE((*store)->Transition(id, JobState::kGenerating).ok());
    EXPECT_EQ(ErrorKindOf((*store)->Transition(id, JobState::kFineTuning)),
              ErrorKind::kConflict);
    EXPECT_EQ(ErrorKindOf((*store)->Transition(id, JobState::kGenerating)),
              ErrorKind::kConflict);
    ArtifactRef ref{ArtifactKind::kDataset, Sha256Hex("x"), "application/json",
                    1};
    ASSERT_TRUE((*store)->AddArtifact(id, ref).ok());
    ASSERT_TRUE((*store)->AddArtifact(id, ref).ok());
    EXPECT_EQ((*store)->Get(id)->artifacts.size(), 1u);
    EXPECT_EQ(ErrorKindOf((*store)->Get("nope").status()), ErrorKind::kNotFound);
  }
  auto reopened = JobStore::Open(dir / "jobs.db");
  ASSERT_TRUE(reopened.ok());
  auto job = (*reopened)->Get(id);
  ASSERT_TRUE(job.ok());
  EXPECT_EQ(job->state, JobState::kGenerating);
  EXPECT_EQ(job->options, (Json{{"seed", 1}}));
  auto active = (*reopened)->ListActive();
  ASSERT_TRUE(active.ok());
  EXPECT_EQ(active->size(), 3u);
  ASSERT_TRUE((*reopened)->Transition(id, JobState::kDone).ok());
  EXPECT_FALSE((*reopened)->Fail(id, {"done", "io", "late"}).ok());
  ArtifactRef late{ArtifactKind::kUtilityReport, Sha256Hex("y"), "a", 1};
  EXPECT_EQ(ErrorKindOf((*reopened)->AddArtifact(id, late)),
            ErrorKind::kConflict);
  EXPECT_EQ((*reopened)->ListActive()->size(), 2u);
}

TEST(ConfigTest, FileThenEnvironment) {
  const fs::path dir = FreshDir("config");
  ASSERT_TRUE(WriteJsonFile(dir / "server.json",
                            Json{{"listen", "0.0.0.0:9000"},
                                 {"backend_url", "http://10.0.0.1:7000"},
                                 {"workers", 3},
                                 {"seed", 5},
                                 {"job_defaults", {{"count_per_class", 40}}}})
                  .ok());
  std::map<std::string, std::string> env = {
      {"PRIVSYNTH_LISTEN", "127.0.0.1:9100"},
      {"PRIVSYNTH_MAX_PAYLOAD", "1024"},
      {"PRIVSYNTH_SEED", "77"},
  };
  auto lookup = [&env](const std::string& name) -> std::optional<std::string> {
    auto it = env.find(name);
    if (it == env.end()) return std::nullopt;
    return it->second;
  };
  auto config = LoadServiceConfig(dir / "server.json", lookup);
  ASSERT_TRUE(config.ok()) << config.status();
  EXPECT_EQ(config->host, "127.0.0.1");
  EXPECT_EQ(config->port, 9100);
  EXPECT_EQ(config->backend_url, "http://10.0.0.1:7000");
  EXPECT_EQ(config->workers, 3);
  EXPECT_EQ(config->max_payload_bytes, 1024u);
  EXPECT_EQ(config->job_defaults.seed, 77u);
  EXPECT_EQ(config->job_defaults.count_per_class, 40);

  auto defaults = LoadServiceConfig(std::nullopt, lookup);
  ASSERT_TRUE(defaults.ok());
  EXPECT_EQ(ServiceConfig().max_payload_bytes, 64ull * 1024 * 1024);
  env["PRIVSYNTH_MAX_PAYLOAD"] = "lots";
  EXPECT_EQ(ErrorKindOf(LoadServiceConfig(std::nullopt, lookup).status()),
            ErrorKind::kInvalidArgument);
}

TEST(ProtocolTest, ErrorEnvelopeRoundTrip) {
  for (ErrorKind kind :
       {ErrorKind::kSchemaViolation, ErrorKind::kUnsupportedFeature,
        ErrorKind::kBackendUnavailable, ErrorKind::kTrainingFailed}) {
    absl::Status status = MakeError(kind, "boom");
    Json envelope = ErrorEnvelope(status);
    EXPECT_EQ(envelope["error"]["code"], std::string(ErrorKindName(kind)));
    EXPECT_EQ(envelope["error"]["retryable"],
              kind == ErrorKind::kBackendUnavailable);
    absl::Status back = StatusFromEnvelope(envelope, HttpStatusFor(status));
    EXPECT_EQ(ErrorKindOf(back), kind);
    EXPECT_EQ(back.message(), "boom");
  }
  EXPECT_EQ(HttpStatusFor(MakeError(ErrorKind::kPayloadTooLarge, "")), 413);
  EXPECT_EQ(ErrorKindOf(StatusFromEnvelope(Json::object(), 503)),
            ErrorKind::kBackendUnavailable);
}

TEST(ProtocolTest, HandlerValidatesFields) {
  mock::MockGenerationBackend generation;
  LocalBackends backends;
  backends.generation = &generation;
  Json request = {{"model_ref", "pretrained"}, {"prompt", "a dog"},
                  {"seed", 1},                 {"want_alpha", true},
                  {"width", 32}};
  auto missing = HandleBackendCall("generate", request, backends);
  EXPECT_EQ(ErrorKindOf(missing.status()), ErrorKind::kSchemaViolation);
  EXPECT_NE(missing.status().message().find("height"), std::string::npos);
  request["height"] = 32;
  auto ok = HandleBackendCall("generate", request, backends);
  ASSERT_TRUE(ok.ok()) << ok.status();
  EXPECT_TRUE(ok->contains("alpha"));
  EXPECT_EQ(ErrorKindOf(HandleBackendCall("embed", Json::object(), backends)
                            .status()),
            ErrorKind::kUnsupportedFeature);
  EXPECT_EQ(ErrorKindOf(HandleBackendCall("teleport", Json::object(), backends)
                            .status()),
            ErrorKind::kNotFound);
}

TEST(ConformanceTest, MockBackendPassesEverything) {
  auto server = StartServer(TestConfig(FreshDir("conformance"), 0));
  auto report = RunConformance(server->url());
  ASSERT_TRUE(report.ok()) << report.status();
  EXPECT_TRUE(report->AllPassed()) << report->Summary();
  EXPECT_GE(report->checks.size(), 16u);
}

TEST(ConformanceTest, ExternalBackend) {
  const char* url = std::getenv("PRIVSYNTH_CONFORMANCE_URL");
  if (url == nullptr || *url == '\0') {
    GTEST_SKIP() << "PRIVSYNTH_CONFORMANCE_URL not set";
  }
  auto report = RunConformance(url);
  ASSERT_TRUE(report.ok()) << report.status();
  EXPECT_TRUE(report->AllPassed()) << report->Summary();
}

TEST(RemoteBackendTest, TransportAndRemoteErrors) {
  auto dead = RemoteBackend::Create("http://127.0.0.1:1");
  ASSERT_TRUE(dead.ok());
  EXPECT_EQ(ErrorKindOf((*dead)->Capabilities().status()),
            ErrorKind::kBackendUnavailable);
  EXPECT_FALSE(RemoteBackend::Create("https://example.com").ok());
  EXPECT_FALSE(RemoteBackend::Create("ftp://example.com").ok());

  auto server = StartServer(TestConfig(FreshDir("remote"), 0));
  auto remote = RemoteBackend::Create(server->url());
  ASSERT_TRUE(remote.ok());
  imaging::RasterImage segment(16, 16, imaging::PixelFormat::kRgb8, 100);
  // The mock has no canny endpoint; the kind survives the wire.
  EXPECT_EQ(ErrorKindOf((*remote)
                            ->ExtractFeature(segment,
                                             sanitizer::FeatureKind::kCanny)
                            .status()),
            ErrorKind::kUnsupportedFeature);
  EXPECT_EQ(ErrorKindOf((*remote)->Generate("mock-ft:@@", "a dog", 1, false,
                                            16, 16)
                            .status()),
            ErrorKind::kNotFound);
}

TEST(ServerTest, SubmissionContract) {
  auto server = StartServer(TestConfig(FreshDir("submit"), 0));
  httplib::Client client(server->url());
  const std::string body = BundleBody("t=L0,b=L0");
  httplib::Headers key = {{"Idempotency-Key", "abc"}};

  auto first = client.Post("/v1/jobs", key, body, "application/json");
  ASSERT_TRUE(first);
  EXPECT_EQ(first->status, 202);
  Json job = ParseBody(first);
  EXPECT_EQ(job["state"], "queued");
  const std::string id = job["id"];

  auto replay = client.Post("/v1/jobs", key, body, "application/json");
  ASSERT_TRUE(replay);
  EXPECT_EQ(replay->status, 200);
  EXPECT_EQ(ParseBody(replay)["id"], id);

  auto conflict =
      client.Post("/v1/jobs", key, BundleBody("t=L2,b=L0"), "application/json");
  ASSERT_TRUE(conflict);
  EXPECT_EQ(conflict->status, 409);
  EXPECT_EQ(ParseBody(conflict)["error"]["code"], "conflict");

  auto status = client.Get(absl::StrCat("/v1/jobs/", id));
  ASSERT_TRUE(status);
  EXPECT_EQ(status->status, 200);
  EXPECT_EQ(ParseBody(status)["state"], "queued");

  auto unknown = client.Get("/v1/jobs/jdoesnotexist");
  ASSERT_TRUE(unknown);
  EXPECT_EQ(unknown->status, 404);
  EXPECT_EQ(ParseBody(unknown)["error"]["code"], "not-found");

  auto no_artifact = client.Get(absl::StrCat("/v1/artifacts/", Sha256Hex("")));
  ASSERT_TRUE(no_artifact);
  EXPECT_EQ(no_artifact->status, 404);

  auto bad_option = client.Post("/v1/jobs?train_fraction=1.5", body,
                                "application/json");
  ASSERT_TRUE(bad_option);
  EXPECT_EQ(bad_option->status, 400);
}

TEST(ServerTest, CorruptPayloadNamesTheSegment) {
  auto server = StartServer(TestConfig(FreshDir("corrupt"), 0));
  auto doc = ParseJson(BundleBody("t=L2,b=L0"), "bundle");
  ASSERT_TRUE(doc.ok());
  (*doc)["images"][1]["segments"][0]["payload"]["png_base64"] = "@@not-png@@";
  httplib::Client client(server->url());
  auto res = client.Post("/v1/jobs", doc->dump(), "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
  Json error = ParseBody(res)["error"];
  EXPECT_EQ(error["code"], "schema-violation");
  EXPECT_NE(error["message"].get<std::string>().find(
                "images[1].segments[0].payload.png_base64"),
            std::string::npos)
      << error.dump();

  auto garbage = client.Post("/v1/jobs", "{\"format\": 3}", "application/json");
  ASSERT_TRUE(garbage);
  EXPECT_EQ(garbage->status, 400);
}

TEST(ServerTest, OversizedBundleRejected) {
  ServiceConfig config = TestConfig(FreshDir("oversize"), 0);
  config.max_payload_bytes = 4096;
  auto server = StartServer(config);
  httplib::Client client(server->url());
  auto res = client.Post("/v1/jobs", std::string(8192, 'x'), "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 413);
  EXPECT_EQ(ParseBody(res)["error"]["code"], "payload-too-large");
  // The limit applies to the job route only.
  auto caps = client.Get("/v1/backend/capabilities");
  ASSERT_TRUE(caps);
  EXPECT_EQ(caps->status, 200);
}

TEST(ServerTest, JobRunsToDoneWithArtifacts) {
  auto server = StartServer(TestConfig(FreshDir("lifecycle"), 1));
  httplib::Client client(server->url());
  auto res = client.Post("/v1/jobs", BundleBody("t=L2,b=L1"), "application/json");
  ASSERT_TRUE(res);
  ASSERT_EQ(res->status, 202) << res->body;
  const std::string id = ParseBody(res)["id"];

  std::vector<JobState> seen;
  for (int i = 0; i < 3000; ++i) {
    auto job = server->jobs().Get(id);
    ASSERT_TRUE(job.ok());
    if (seen.empty() || seen.back() != job->state) seen.push_back(job->state);
    if (IsTerminal(job->state)) break;
    absl::SleepFor(absl::Milliseconds(5));
  }
  for (size_t i = 1; i < seen.size(); ++i) {
    EXPECT_TRUE(CanTransition(seen[i - 1], seen[i]))
        << JobStateName(seen[i - 1]) << " -> " << JobStateName(seen[i]);
  }
  auto status = client.Get(absl::StrCat("/v1/jobs/", id));
  Json job = ParseBody(status);
  ASSERT_EQ(job["state"], "done") << job.dump();
  EXPECT_TRUE(job["error"].is_null());

  std::map<std::string, Json> by_kind;
  for (const Json& ref : job["artifacts"]) by_kind[ref["kind"]] = ref;
  ASSERT_EQ(by_kind.size(), 3u) << job.dump();
  for (const auto& [kind, ref] : by_kind) {
    auto blob = client.Get(absl::StrCat("/v1/artifacts/",
                                        ref["address"].get<std::string>()));
    ASSERT_TRUE(blob);
    ASSERT_EQ(blob->status, 200);
    EXPECT_EQ(Sha256Hex(blob->body), ref["address"]);
    EXPECT_EQ(blob->body.size(), ref["size"].get<size_t>());
    EXPECT_EQ(blob->get_header_value("Content-Type"),
              ref["media_type"].get<std::string>());
  }
  auto dataset_blob = server->artifacts().Get(by_kind["dataset"]["address"].get<std::string>());
  ASSERT_TRUE(dataset_blob.ok());
  auto dataset = orchestrator::DatasetFromJson(*ParseJson(*dataset_blob, "d"));
  ASSERT_TRUE(dataset.ok()) << dataset.status();
  EXPECT_EQ(dataset->samples.size(), 16u);
  EXPECT_EQ(dataset->preference, "t=L2,b=L1:canny");

  auto report_blob =
      server->artifacts().Get(by_kind["utility_report"]["address"].get<std::string>());
  auto report = utility::UtilityReportFromJson(*ParseJson(*report_blob, "r"));
  ASSERT_TRUE(report.ok()) << report.status();
  EXPECT_EQ(report->metric, "accuracy");
  EXPECT_EQ(report->train_size + report->validation_size, 16u);
}

// Generation that always reports its backend as down.
class DownGeneration : public mock::MockGenerationBackend {
 public:
  absl::StatusOr<orchestrator::GeneratedImage> Generate(
      const std::string&, const std::string&, uint64_t, bool, int,
      int) override {
    return MakeError(ErrorKind::kBackendUnavailable, "diffusion host down");
  }
};

TEST(ServerTest, BackendFailureRecordsStepAndCause) {
  DownGeneration generation;
  mock::MockTrainingBackend training;
  LocalBackends backends;
  backends.generation = &generation;
  backends.training = &training;
  auto server = Server::Create(TestConfig(FreshDir("failure"), 1), backends);
  ASSERT_TRUE(server.ok());
  ASSERT_TRUE((*server)->Start().ok());
  auto submitted =
      (*server)->Submit(BundleBody("t=L0,b=L0"), "", SmallJob());
  ASSERT_TRUE(submitted.ok()) << submitted.status();
  auto job = (*server)->WaitForJob(submitted->job.id, absl::Seconds(30));
  ASSERT_TRUE(job.ok()) << job.status();
  EXPECT_EQ(job->state, JobState::kFailed);
  ASSERT_TRUE(job->error.has_value());
  EXPECT_EQ(job->error->step, "generating");
  // Assembly wraps backend errors with the sample, step and prompt.
  EXPECT_EQ(job->error->kind, "generation-failed");
  EXPECT_NE(job->error->message.find("diffusion host down"), std::string::npos);
  EXPECT_TRUE(job->artifacts.empty());
}

TEST(ServerTest, RestartResumesQueuedJobs) {
  const fs::path dir = FreshDir("restart");
  std::string id;
  {
    auto server = StartServer(TestConfig(dir, 0));
    auto submitted = server->Submit(BundleBody("t=L0,b=L0"), "k", SmallJob());
    ASSERT_TRUE(submitted.ok()) << submitted.status();
    id = submitted->job.id;
    server->Stop();
    EXPECT_EQ(server->jobs().Get(id)->state, JobState::kQueued);
  }
  auto server = StartServer(TestConfig(dir, 1));
  auto job = server->WaitForJob(id, absl::Seconds(60));
  ASSERT_TRUE(job.ok()) << job.status();
  EXPECT_EQ(job->state, JobState::kDone);
  EXPECT_FALSE(job->artifacts.empty());
}

TEST(ServerTest, RemoteBackendEndToEnd) {
  auto backend_server = StartServer(TestConfig(FreshDir("remote_backend"), 0));
  ServiceConfig config = TestConfig(FreshDir("remote_front"), 1);
  config.backend_url = backend_server->url();
  auto server = StartServer(config);
  auto submitted =
      server->Submit(BundleBody("t=L2,b=L0"), "", SmallJob());
  ASSERT_TRUE(submitted.ok()) << submitted.status();
  auto job = server->WaitForJob(submitted->job.id, absl::Seconds(60));
  ASSERT_TRUE(job.ok()) << job.status();
  EXPECT_EQ(job->state, JobState::kDone)
      << (job->error ? job->error->message : "");
  EXPECT_EQ(job->artifacts.size(), 3u);
}

std::vector<imaging::RasterImage> PrivateImages() {
  std::vector<imaging::RasterImage> images;
  for (const auto& ref : SmallCorpus().images) images.push_back(ref.image);
  return images;
}

absl::StatusOr<AuditReport> RunAndAudit(std::string_view preference,
                                        const fs::path& dir) {
  auto server = StartServer(TestConfig(dir, 1));
  PRIVSYNTH_ASSIGN_OR_RETURN(
      CreateResult submitted,
      server->Submit(BundleBody(preference), "", SmallJob()));
  PRIVSYNTH_ASSIGN_OR_RETURN(
      Job job, server->WaitForJob(submitted.job.id, absl::Seconds(60)));
  EXPECT_EQ(job.state, JobState::kDone);
  server->Stop();
  return AuditPrivatePixels(dir, PrivateImages());
}

TEST(AuditTest, AllL0JobStoresNoPrivatePixels) {
  auto bundle = sanitizer::ParseBundle(BundleBody("t=L0,b=L0"));
  ASSERT_TRUE(bundle.ok());
  EXPECT_EQ(bundle->PayloadCount(), 0u);
  auto report = RunAndAudit("t=L0,b=L0", FreshDir("audit_l0"));
  ASSERT_TRUE(report.ok()) << report.status();
  EXPECT_GE(report->files_scanned, 4u);
  // The synthetic dataset is full of images; none carries private pixels.
  EXPECT_GT(report->embedded_images, 0u);
  EXPECT_TRUE(report->clean()) << report->findings[0].file << ": "
                               << report->findings[0].what;
}

TEST(AuditTest, RawSharingIsDetected) {
  auto report = RunAndAudit("t=L2,b=L0", FreshDir("audit_l2"));
  ASSERT_TRUE(report.ok()) << report.status();
  ASSERT_FALSE(report->clean());
  // The hits are the stored request body, not generated output.
  for (const AuditFinding& finding : report->findings) {
    EXPECT_NE(finding.file.string().find("inputs"), std::string::npos)
        << finding.file << ": " << finding.what;
  }
}

}  // namespace
}  // namespace privsynth::service
