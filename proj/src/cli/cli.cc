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

#include "privsynth/cli/cli.h"

#include <signal.h>

#include <algorithm>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"
#include "privsynth/common/json_util.h"
#include "privsynth/common/seed.h"
#include "privsynth/common/status.h"
#include "privsynth/experiment/corpus.h"
#include "privsynth/experiment/harness.h"
#include "privsynth/imaging/png_io.h"
#include "privsynth/metrics/mutual_information.h"
#include "privsynth/metrics/report.h"
#include "privsynth/mock/backends.h"
#include "privsynth/orchestrator/assemble.h"
#include "privsynth/orchestrator/dataset.h"
#include "privsynth/sanitizer/manifest.h"
#include "privsynth/sanitizer/preference.h"
#include "privsynth/sanitizer/sanitize.h"
#include "privsynth/sanitizer/wire.h"
#include "privsynth/service/audit.h"
#include "privsynth/service/backend_protocol.h"
#include "privsynth/service/config.h"
#include "privsynth/service/conformance.h"
#include "privsynth/service/remote_backend.h"
#include "privsynth/service/server.h"
#include "privsynth/utility/evaluate.h"

namespace privsynth::cli {
namespace {

namespace fs = std::filesystem;
using sanitizer::PrivacyPreference;

// Backends named on the command line: "mock" or a backend-protocol url.
class BackendSet {
 public:
  static absl::StatusOr<std::unique_ptr<BackendSet>> Open(
      const std::string& name) {
    auto set = std::unique_ptr<BackendSet>(new BackendSet());
    if (name == "mock") {
      set->generation_ = std::make_unique<mock::MockGenerationBackend>();
      set->embedding_ = std::make_unique<mock::MockEmbeddingProvider>();
      set->training_ = std::make_unique<mock::MockTrainingBackend>();
      set->features_ = std::make_unique<mock::MockFeatureService>();
      set->segmentation_ = std::make_unique<mock::MockSegmentationService>();
      set->local_ = {set->generation_.get(), set->embedding_.get(),
                     set->training_.get(), set->features_.get(),
                     set->segmentation_.get()};
      return set;
    }
    PRIVSYNTH_ASSIGN_OR_RETURN(set->remote_,
                               service::RemoteBackend::Create(name));
    service::RemoteBackend* r = set->remote_.get();
    set->local_ = {r, r, r, r, r};
    return set;
  }

  const service::LocalBackends& local() const { return local_; }

  experiment::Backends experiment() const {
    return {local_.generation, local_.embedding, local_.training,
            local_.features};
  }

 private:
  BackendSet() = default;

  std::unique_ptr<mock::MockGenerationBackend> generation_;
  std::unique_ptr<mock::MockEmbeddingProvider> embedding_;
  std::unique_ptr<mock::MockTrainingBackend> training_;
  std::unique_ptr<mock::MockFeatureService> features_;
  std::unique_ptr<mock::MockSegmentationService> segmentation_;
  std::unique_ptr<service::RemoteBackend> remote_;
  service::LocalBackends local_;
};

absl::StatusOr<metrics::SimMode> ParseSimMode(const std::string& text) {
  if (text == "all-pairs") return metrics::SimMode::kAllPairs;
  if (text == "matched") return metrics::SimMode::kMatched;
  return MakeError(ErrorKind::kInvalidArgument,
                   absl::StrCat("unknown sim mode \"", text,
                                "\" (want all-pairs or matched)"));
}

absl::StatusOr<sanitizer::NoiseOrder> ParseNoiseOrder(const std::string& text) {
  if (text == "before-feature") return sanitizer::NoiseOrder::kBeforeFeature;
  if (text == "after-feature") return sanitizer::NoiseOrder::kAfterFeature;
  return MakeError(ErrorKind::kInvalidArgument,
                   absl::StrCat("unknown noise order \"", text,
                                "\" (want before-feature or after-feature)"));
}

absl::StatusOr<std::vector<double>> ParseSigmas(const std::string& text) {
  std::vector<double> out;
  for (absl::string_view part :
       absl::StrSplit(text, ',', absl::SkipWhitespace())) {
    double v = 0;
    if (!absl::SimpleAtod(absl::StripAsciiWhitespace(part), &v)) {
      return MakeError(ErrorKind::kInvalidArgument,
                       absl::StrCat("bad sigma \"", ToStd(part), "\""));
    }
    out.push_back(v);
  }
  if (out.empty()) {
    return MakeError(ErrorKind::kInvalidArgument, "no sigma values given");
  }
  return out;
}

// Training config shared by evaluate, tradeoff and the job server.
Json TrainingConfig(sanitizer::TaskKind task, uint64_t seed, int epochs) {
  Json config = utility::DefaultTrainingConfig(task);
  if (epochs > 0) config["epochs"] = epochs;
  config["seed"] = DeriveSeed(seed, {0x54});
  return config;
}

absl::Status WriteTextOrFail(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  return WriteTextFile(path, text);
}

// ---------------------------------------------------------------- commands

struct MakeCorpusArgs {
  std::string task = "classification";
  std::string out;
  int references = 20;
  int test = 25;
  int width = 64;
  int height = 64;
  uint64_t seed = 0;
};

absl::Status MakeCorpusCommand(const MakeCorpusArgs& a, std::ostream& out) {
  experiment::CorpusOptions options;
  PRIVSYNTH_ASSIGN_OR_RETURN(options.task, sanitizer::ParseTaskKind(a.task));
  options.reference_images = a.references;
  options.test_images = a.test;
  options.width = a.width;
  options.height = a.height;
  options.seed = a.seed;
  PRIVSYNTH_ASSIGN_OR_RETURN(experiment::Corpus corpus,
                             experiment::MakeCorpus(options));
  PRIVSYNTH_RETURN_IF_ERROR(experiment::WriteCorpus(corpus, a.out));
  out << "wrote corpus " << a.out << ": " << corpus.images.size()
      << " reference images, " << corpus.test_set.samples.size()
      << " test images\n";
  return absl::OkStatus();
}

struct SegmentArgs {
  std::string request;
  std::string images;
  std::string backend = "mock";
  std::string out;
};

absl::Status SegmentCommand(const SegmentArgs& a, std::ostream& out) {
  PRIVSYNTH_ASSIGN_OR_RETURN(sanitizer::UserRequest request,
                             experiment::ReadRequestFile(a.request));
  PRIVSYNTH_ASSIGN_OR_RETURN(auto backends, BackendSet::Open(a.backend));
  std::vector<fs::path> files;
  std::error_code ec;
  for (const auto& e : fs::directory_iterator(a.images, ec)) {
    if (e.is_regular_file() && e.path().extension() == ".png") {
      files.push_back(e.path());
    }
  }
  if (ec) {
    return MakeError(ErrorKind::kIo,
                     absl::StrCat("cannot list ", a.images, ": ", ec.message()));
  }
  std::sort(files.begin(), files.end());
  sanitizer::SegmentationManifest manifest;
  for (const auto& file : files) {
    PRIVSYNTH_ASSIGN_OR_RETURN(imaging::RasterImage image,
                               imaging::ReadPng(file));
    auto entry =
        backends->local().segmentation->Segment(image, request.target_objects);
    if (!entry.ok()) {
      return Annotate(entry.status(), file.filename().string());
    }
    entry->image_name = file.filename().string();
    manifest.entries.push_back(*std::move(entry));
  }
  PRIVSYNTH_RETURN_IF_ERROR(
      sanitizer::WriteManifest(manifest, a.out, request.target_count()));
  out << "wrote manifest " << a.out << ": " << manifest.entries.size()
      << " images\n";
  return absl::OkStatus();
}

struct SanitizeArgs {
  std::string request;
  std::string images;
  std::string manifest;
  std::string preference;
  std::string out;
  std::string refs_out;
  std::string backend = "mock";
  std::string noise_order = "before-feature";
  uint64_t seed = 0;
};

absl::Status SanitizeCommand(const SanitizeArgs& a, std::ostream& out) {
  PRIVSYNTH_ASSIGN_OR_RETURN(sanitizer::UserRequest request,
                             experiment::ReadRequestFile(a.request));
  PRIVSYNTH_ASSIGN_OR_RETURN(sanitizer::SegmentationManifest manifest,
                             sanitizer::ReadManifest(a.manifest));
  PRIVSYNTH_ASSIGN_OR_RETURN(
      std::vector<sanitizer::ReferenceImage> images,
      sanitizer::LoadReferenceImages(a.images, manifest));
  PRIVSYNTH_ASSIGN_OR_RETURN(PrivacyPreference pref,
                             PrivacyPreference::Parse(a.preference));
  PRIVSYNTH_ASSIGN_OR_RETURN(auto backends, BackendSet::Open(a.backend));
  sanitizer::SanitizeOptions options;
  options.seed = a.seed;
  PRIVSYNTH_ASSIGN_OR_RETURN(options.noise_order,
                             ParseNoiseOrder(a.noise_order));
  options.feature_service = backends->local().features;
  PRIVSYNTH_ASSIGN_OR_RETURN(
      sanitizer::SanitizedBundle bundle,
      sanitizer::BuildBundle(request, images, manifest, pref, options));
  PRIVSYNTH_RETURN_IF_ERROR(sanitizer::WriteBundleFile(a.out, bundle));
  if (!a.refs_out.empty()) {
    PRIVSYNTH_ASSIGN_OR_RETURN(
        metrics::ReferenceSet refs,
        metrics::ReferenceSet::Build(request, images, manifest));
    PRIVSYNTH_RETURN_IF_ERROR(refs.Write(a.refs_out));
  }
  out << "wrote bundle " << a.out << ": " << bundle.entries.size()
      << " images, " << bundle.PayloadCount() << " payloads\n";
  return absl::OkStatus();
}

struct EmbedArgs {
  std::string refs;
  std::string dataset;
  std::string backend = "mock";
  std::string out;
};

absl::Status EmbedCommand(const EmbedArgs& a, std::ostream& out) {
  PRIVSYNTH_ASSIGN_OR_RETURN(metrics::ReferenceSet refs,
                             metrics::ReferenceSet::Read(a.refs));
  PRIVSYNTH_ASSIGN_OR_RETURN(orchestrator::SyntheticDataset dataset,
                             orchestrator::ReadDataset(a.dataset));
  PRIVSYNTH_ASSIGN_OR_RETURN(auto backends, BackendSet::Open(a.backend));
  PRIVSYNTH_ASSIGN_OR_RETURN(
      metrics::EmbeddingTable table,
      experiment::EmbedRun(refs, dataset, *backends->local().embedding));
  PRIVSYNTH_RETURN_IF_ERROR(metrics::WriteEmbeddingFile(a.out, table));
  out << "wrote " << table.size() << " embeddings to " << a.out << "\n";
  return absl::OkStatus();
}

struct MeasureArgs {
  std::string refs;
  std::string bundle;
  std::string embeddings;
  std::string out;
  std::string csv;
  std::string sim_mode = "all-pairs";
  int jobs = 1;
};

absl::Status MeasureCommand(const MeasureArgs& a, std::ostream& out) {
  PRIVSYNTH_ASSIGN_OR_RETURN(metrics::ReferenceSet refs,
                             metrics::ReferenceSet::Read(a.refs));
  PRIVSYNTH_ASSIGN_OR_RETURN(sanitizer::SanitizedBundle bundle,
                             sanitizer::ReadBundleFile(a.bundle));
  metrics::ReportInputs inputs;
  if (!a.embeddings.empty()) {
    PRIVSYNTH_ASSIGN_OR_RETURN(metrics::EmbeddingTable table,
                               metrics::ReadEmbeddingFile(a.embeddings));
    PRIVSYNTH_ASSIGN_OR_RETURN(inputs,
                               metrics::GroupEmbeddings(table, refs.request));
  }
  PRIVSYNTH_ASSIGN_OR_RETURN(inputs.sim_mode, ParseSimMode(a.sim_mode));
  inputs.mi.parallelism = a.jobs;
  PRIVSYNTH_ASSIGN_OR_RETURN(
      metrics::PrivacyReport report,
      metrics::ComputePrivacyReport(refs, bundle, inputs));
  PRIVSYNTH_RETURN_IF_ERROR(
      WriteJsonFile(a.out, metrics::PrivacyReportsToJson({report})));
  const std::string csv = metrics::PrivacyReportsToCsv({report});
  if (!a.csv.empty()) PRIVSYNTH_RETURN_IF_ERROR(WriteTextOrFail(a.csv, csv));
  out << csv;
  return absl::OkStatus();
}

struct GenerateArgs {
  std::string bundle;
  std::string backend = "mock";
  std::string out;
  int count = 400;
  int detection_count = 1600;
  int width = 128;
  int height = 128;
  int synthetic_refs = 8;
  int max_in_flight = 4;
  uint64_t seed = 0;
};

absl::Status GenerateCommand(const GenerateArgs& a, std::ostream& out) {
  PRIVSYNTH_ASSIGN_OR_RETURN(sanitizer::SanitizedBundle bundle,
                             sanitizer::ReadBundleFile(a.bundle));
  PRIVSYNTH_ASSIGN_OR_RETURN(auto backends, BackendSet::Open(a.backend));
  orchestrator::GenerateOptions options;
  options.assemble.count_per_class = a.count;
  options.assemble.detection_count = a.detection_count;
  options.assemble.width = a.width;
  options.assemble.height = a.height;
  options.assemble.max_in_flight = a.max_in_flight;
  options.assemble.seed = DeriveSeed(a.seed, {0x6E});
  options.plan.synthetic_references_per_feature = a.synthetic_refs;
  PRIVSYNTH_ASSIGN_OR_RETURN(
      orchestrator::GenerationResult result,
      orchestrator::GenerateFromBundle(bundle, *backends->local().generation,
                                       options));
  PRIVSYNTH_RETURN_IF_ERROR(orchestrator::WriteDataset(result.dataset, a.out));
  out << "wrote dataset " << a.out << ": " << result.dataset.samples.size()
      << " samples (" << result.dataset.plan << ")\n";
  return absl::OkStatus();
}

struct EvaluateArgs {
  std::string dataset;
  std::string test;
  std::string backend = "mock";
  std::string out;
  double split = 0.8;
  int epochs = 0;
  uint64_t seed = 0;
};

absl::Status EvaluateCommand(const EvaluateArgs& a, std::ostream& out) {
  PRIVSYNTH_ASSIGN_OR_RETURN(orchestrator::SyntheticDataset dataset,
                             orchestrator::ReadDataset(a.dataset));
  PRIVSYNTH_ASSIGN_OR_RETURN(orchestrator::SyntheticDataset test,
                             orchestrator::ReadDataset(a.test));
  PRIVSYNTH_ASSIGN_OR_RETURN(auto backends, BackendSet::Open(a.backend));
  PRIVSYNTH_ASSIGN_OR_RETURN(
      auto split,
      utility::SplitDataset(dataset, a.split, DeriveSeed(a.seed, {0x5B})));
  PRIVSYNTH_ASSIGN_OR_RETURN(
      utility::UtilityReport report,
      utility::RunUtility(split.first, split.second, test,
                          *backends->local().training,
                          TrainingConfig(dataset.task, a.seed, a.epochs),
                          a.split));
  PRIVSYNTH_RETURN_IF_ERROR(
      WriteJsonFile(a.out, utility::UtilityReportToJson(report)));
  out << report.metric << " " << absl::StrFormat("%.6f", report.value)
      << " (train " << report.train_size << ", validation "
      << report.validation_size << ", test " << report.test_size << ")\n";
  return absl::OkStatus();
}

// Inputs and knobs shared by tradeoff and noise-sweep.
struct ExperimentArgs {
  std::string corpus;
  std::string request;
  std::string images;
  std::string manifest;
  std::string test;
  std::string backend = "mock";
  std::string out;
  std::string plot_data;
  std::string json;
  std::string sim_mode = "all-pairs";
  int count = 400;
  int detection_count = 1600;
  int width = 128;
  int height = 128;
  int epochs = 0;
  int jobs = 1;
  double split = 0.8;
  bool no_utility = false;
  uint64_t seed = 0;
};

void AddExperimentOptions(CLI::App& cmd, ExperimentArgs& a) {
  cmd.add_option("--corpus", a.corpus,
                 "Corpus directory (request.json, images/, manifest.json, "
                 "test/)");
  cmd.add_option("--request", a.request, "User request JSON");
  cmd.add_option("--images", a.images, "Reference image directory");
  cmd.add_option("--manifest", a.manifest, "Segmentation manifest");
  cmd.add_option("--test", a.test, "Labeled test dataset directory");
  cmd.add_option("--backend", a.backend, "\"mock\" or http://host:port")
      ->capture_default_str();
  cmd.add_option("--out", a.out, "Trade-off table (CSV)")->required();
  cmd.add_option("--plot-data", a.plot_data,
                 "Long-form plot data (CSV); defaults to <out>.plot.csv");
  cmd.add_option("--json", a.json, "Full results as JSON");
  cmd.add_option("--sim-mode", a.sim_mode, "all-pairs or matched")
      ->capture_default_str();
  cmd.add_option("--count", a.count, "Samples per class")
      ->capture_default_str();
  cmd.add_option("--detection-count", a.detection_count,
                 "Samples for detection tasks")
      ->capture_default_str();
  cmd.add_option("--width", a.width)->capture_default_str();
  cmd.add_option("--height", a.height)->capture_default_str();
  cmd.add_option("--epochs", a.epochs, "Training epochs (0: task default)")
      ->capture_default_str();
  cmd.add_option("--split", a.split, "Training fraction of synthetic data")
      ->capture_default_str();
  cmd.add_flag("--no-utility", a.no_utility, "Skip model training");
  cmd.add_option("--jobs", a.jobs, "Worker threads")->capture_default_str();
  cmd.add_option("--seed", a.seed)->capture_default_str();
}

absl::StatusOr<experiment::ExperimentInputs> LoadInputs(
    const ExperimentArgs& a) {
  experiment::ExperimentInputs inputs;
  if (!a.corpus.empty()) {
    PRIVSYNTH_ASSIGN_OR_RETURN(experiment::Corpus corpus,
                               experiment::ReadCorpus(a.corpus));
    inputs.request = std::move(corpus.request);
    inputs.images = std::move(corpus.images);
    inputs.manifest = std::move(corpus.manifest);
    inputs.test_set = std::move(corpus.test_set);
  } else {
    if (a.request.empty() || a.images.empty() || a.manifest.empty()) {
      return MakeError(ErrorKind::kInvalidArgument,
                       "give --corpus, or --request, --images and --manifest");
    }
    PRIVSYNTH_ASSIGN_OR_RETURN(inputs.request,
                               experiment::ReadRequestFile(a.request));
    PRIVSYNTH_ASSIGN_OR_RETURN(inputs.manifest,
                               sanitizer::ReadManifest(a.manifest));
    PRIVSYNTH_ASSIGN_OR_RETURN(
        inputs.images, sanitizer::LoadReferenceImages(a.images, inputs.manifest));
  }
  if (!a.test.empty()) {
    PRIVSYNTH_ASSIGN_OR_RETURN(inputs.test_set,
                               orchestrator::ReadDataset(a.test));
  }
  return inputs;
}

absl::StatusOr<experiment::HarnessOptions> MakeHarnessOptions(
    const ExperimentArgs& a, sanitizer::TaskKind task) {
  experiment::HarnessOptions options;
  options.seed = a.seed;
  options.generate.assemble.count_per_class = a.count;
  options.generate.assemble.detection_count = a.detection_count;
  options.generate.assemble.width = a.width;
  options.generate.assemble.height = a.height;
  options.train_fraction = a.split;
  options.training_config = TrainingConfig(task, a.seed, a.epochs);
  PRIVSYNTH_ASSIGN_OR_RETURN(options.sim_mode, ParseSimMode(a.sim_mode));
  options.evaluate_utility = !a.no_utility;
  options.parallelism = a.jobs;
  return options;
}

std::string PlotDataPath(const ExperimentArgs& a) {
  if (!a.plot_data.empty()) return a.plot_data;
  fs::path p(a.out);
  p.replace_extension(".plot.csv");
  return p.string();
}

absl::Status WriteExperimentOutputs(
    const ExperimentArgs& a, const std::vector<experiment::TradeoffRow>& rows,
    const std::string& table) {
  PRIVSYNTH_RETURN_IF_ERROR(WriteTextOrFail(a.out, table));
  PRIVSYNTH_RETURN_IF_ERROR(
      WriteTextOrFail(PlotDataPath(a), experiment::PlotDataCsv(rows)));
  if (!a.json.empty()) {
    PRIVSYNTH_RETURN_IF_ERROR(
        WriteJsonFile(a.json, experiment::TradeoffToJson(rows)));
  }
  return absl::OkStatus();
}

struct TradeoffArgs {
  ExperimentArgs common;
  std::string preferences;
};

absl::Status TradeoffCommand(const TradeoffArgs& a, std::ostream& out) {
  PRIVSYNTH_ASSIGN_OR_RETURN(std::vector<PrivacyPreference> prefs,
                             sanitizer::ParsePreferenceList(a.preferences));
  PRIVSYNTH_ASSIGN_OR_RETURN(experiment::ExperimentInputs inputs,
                             LoadInputs(a.common));
  PRIVSYNTH_ASSIGN_OR_RETURN(auto backends, BackendSet::Open(a.common.backend));
  PRIVSYNTH_ASSIGN_OR_RETURN(
      experiment::HarnessOptions options,
      MakeHarnessOptions(a.common, inputs.request.task_kind));
  PRIVSYNTH_ASSIGN_OR_RETURN(
      std::vector<experiment::TradeoffRow> rows,
      experiment::RunTradeoff(inputs, prefs, backends->experiment(), options));
  const std::string table =
      experiment::TradeoffTableCsv(rows, inputs.request);
  PRIVSYNTH_RETURN_IF_ERROR(WriteExperimentOutputs(a.common, rows, table));
  out << table;
  return absl::OkStatus();
}

struct NoiseSweepArgs {
  ExperimentArgs common;
  std::string sigma = "5,10,50";
  std::string base = "t=L2,b=L0";
  std::string role = "t";
};

absl::Status NoiseSweepCommand(const NoiseSweepArgs& a, std::ostream& out) {
  PRIVSYNTH_ASSIGN_OR_RETURN(std::vector<double> sigmas, ParseSigmas(a.sigma));
  PRIVSYNTH_ASSIGN_OR_RETURN(PrivacyPreference base,
                             PrivacyPreference::Parse(a.base));
  PRIVSYNTH_ASSIGN_OR_RETURN(sanitizer::SegmentRole role,
                             sanitizer::ParseRoleKey(a.role));
  PRIVSYNTH_ASSIGN_OR_RETURN(
      std::vector<PrivacyPreference> prefs,
      experiment::NoiseSweepPreferences(base, role, sigmas));
  PRIVSYNTH_ASSIGN_OR_RETURN(experiment::ExperimentInputs inputs,
                             LoadInputs(a.common));
  PRIVSYNTH_ASSIGN_OR_RETURN(auto backends, BackendSet::Open(a.common.backend));
  PRIVSYNTH_ASSIGN_OR_RETURN(
      experiment::HarnessOptions options,
      MakeHarnessOptions(a.common, inputs.request.task_kind));
  PRIVSYNTH_ASSIGN_OR_RETURN(
      std::vector<experiment::TradeoffRow> rows,
      experiment::RunTradeoff(inputs, prefs, backends->experiment(), options));
  // The trade-off table with a leading sigma column.
  const std::string plain =
      experiment::TradeoffTableCsv(rows, inputs.request);
  std::vector<std::string> lines =
      absl::StrSplit(plain, '\n', absl::SkipEmpty());
  std::string table = absl::StrCat("sigma,", lines[0], "\n");
  for (size_t i = 0; i < sigmas.size() && i + 1 < lines.size(); ++i) {
    absl::StrAppend(&table, absl::StrFormat("%g", sigmas[i]), ",",
                    lines[i + 1], "\n");
  }
  PRIVSYNTH_RETURN_IF_ERROR(WriteExperimentOutputs(a.common, rows, table));
  out << table;
  return absl::OkStatus();
}

struct ServeArgs {
  std::string server_config;
  std::string listen;
  std::string data_dir;
  std::string backend;
  int workers = 0;
};

absl::Status ServeCommand(const ServeArgs& a, std::ostream& out) {
  std::optional<fs::path> path;
  if (!a.server_config.empty()) path = a.server_config;
  PRIVSYNTH_ASSIGN_OR_RETURN(service::ServiceConfig config,
                             service::LoadServiceConfig(path));
  if (!a.listen.empty()) {
    PRIVSYNTH_RETURN_IF_ERROR(service::ParseListen(a.listen, config));
  }
  if (!a.data_dir.empty()) config.data_dir = a.data_dir;
  if (!a.backend.empty()) config.backend_url = a.backend;
  if (a.workers > 0) config.workers = a.workers;

  // Block the stop signals before any thread starts so only sigwait sees
  // them.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  sigset_t previous;
  pthread_sigmask(SIG_BLOCK, &signals, &previous);

  auto server = service::Server::Create(config);
  absl::Status started =
      server.ok() ? (*server)->Start() : server.status();
  if (!started.ok()) {
    pthread_sigmask(SIG_SETMASK, &previous, nullptr);
    return started;
  }
  out << "listening on " << (*server)->url() << " (backend "
      << config.backend_url << ", data " << config.data_dir.string() << ")"
      << std::endl;
  int sig = 0;
  sigwait(&signals, &sig);
  (*server)->Stop();
  pthread_sigmask(SIG_SETMASK, &previous, nullptr);
  out << "stopped" << std::endl;
  return absl::OkStatus();
}

struct ConformanceArgs {
  std::string backend;
};

absl::Status ConformanceCommand(const ConformanceArgs& a, std::ostream& out) {
  PRIVSYNTH_ASSIGN_OR_RETURN(service::ConformanceReport report,
                             service::RunConformance(a.backend));
  out << report.Summary();
  if (!report.AllPassed()) {
    size_t failed = 0;
    for (const auto& check : report.checks) failed += check.passed ? 0 : 1;
    return MakeError(ErrorKind::kUnsupportedFeature,
                     absl::StrCat(failed, " of ", report.checks.size(),
                                  " conformance checks failed"));
  }
  return absl::OkStatus();
}

struct AuditArgs {
  std::string dir;
  std::string images;
};

// Exit code of an audit that ran but found private pixels.
constexpr int kAuditFindings = 3;

absl::StatusOr<int> AuditCommand(const AuditArgs& a, std::ostream& out) {
  std::vector<fs::path> files;
  std::error_code ec;
  for (const auto& e : fs::directory_iterator(a.images, ec)) {
    if (e.is_regular_file() && e.path().extension() == ".png") {
      files.push_back(e.path());
    }
  }
  if (ec) {
    return MakeError(ErrorKind::kIo,
                     absl::StrCat("cannot list ", a.images, ": ", ec.message()));
  }
  std::sort(files.begin(), files.end());
  std::vector<imaging::RasterImage> images;
  for (const auto& f : files) {
    PRIVSYNTH_ASSIGN_OR_RETURN(imaging::RasterImage image, imaging::ReadPng(f));
    images.push_back(std::move(image));
  }
  PRIVSYNTH_ASSIGN_OR_RETURN(service::AuditReport report,
                             service::AuditPrivatePixels(a.dir, images));
  Json findings = Json::array();
  for (const auto& f : report.findings) {
    findings.push_back({{"file", f.file.string()}, {"what", f.what}});
  }
  out << Json{{"files_scanned", report.files_scanned},
              {"embedded_images", report.embedded_images},
              {"findings", findings}}
             .dump()
      << "\n";
  return report.clean() ? 0 : kAuditFindings;
}

int Fail(const absl::Status& status, std::ostream& err) {
  err << StatusToJsonLine(status) << std::endl;
  return 1;
}

}  // namespace

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Privacy-preserving synthetic training data pipeline",
               "privsynth"};
  app.set_config("--config", "", "TOML/INI file with option defaults");
  app.require_subcommand(1);

  MakeCorpusArgs corpus;
  auto* c = app.add_subcommand("make-corpus",
                               "Write a procedural private-photo corpus");
  c->add_option("--task", corpus.task, "classification or detection")
      ->capture_default_str();
  c->add_option("--out", corpus.out)->required();
  c->add_option("--references", corpus.references)->capture_default_str();
  c->add_option("--test", corpus.test,
                "Test images (per class for classification)")
      ->capture_default_str();
  c->add_option("--width", corpus.width)->capture_default_str();
  c->add_option("--height", corpus.height)->capture_default_str();
  c->add_option("--seed", corpus.seed)->capture_default_str();

  SegmentArgs segment;
  auto* sg = app.add_subcommand(
      "segment", "Segment reference images into a manifest");
  sg->add_option("--request", segment.request)->required();
  sg->add_option("--images", segment.images)->required();
  sg->add_option("--backend", segment.backend)->capture_default_str();
  sg->add_option("--out", segment.out, "Manifest JSON")->required();

  SanitizeArgs sanitize;
  auto* s = app.add_subcommand(
      "sanitize", "Sanitize reference images into a bundle");
  s->add_option("--request", sanitize.request)->required();
  s->add_option("--images", sanitize.images)->required();
  s->add_option("--manifest", sanitize.manifest)->required();
  s->add_option("--preference", sanitize.preference, "e.g. t=L2,b=L0")
      ->required();
  s->add_option("--out", sanitize.out, "Bundle file")->required();
  s->add_option("--refs-out", sanitize.refs_out,
                "Also write the raw per-role reference canvases here");
  s->add_option("--backend", sanitize.backend,
                "Feature extraction for pose and layout_box")
      ->capture_default_str();
  s->add_option("--noise-order", sanitize.noise_order,
                "before-feature or after-feature")
      ->capture_default_str();
  s->add_option("--seed", sanitize.seed)->capture_default_str();

  EmbedArgs embed;
  auto* e = app.add_subcommand(
      "embed", "Embed reference canvases, a dataset and prompts");
  e->add_option("--refs", embed.refs)->required();
  e->add_option("--dataset", embed.dataset)->required();
  e->add_option("--backend", embed.backend)->capture_default_str();
  e->add_option("--out", embed.out, "Embedding file")->required();

  MeasureArgs measure;
  auto* m = app.add_subcommand("measure-privacy",
                               "Compute the privacy report of a bundle");
  m->add_option("--refs", measure.refs)->required();
  m->add_option("--bundle", measure.bundle)->required();
  m->add_option("--embeddings", measure.embeddings,
                "Embedding file; without it SIM is omitted");
  m->add_option("--out", measure.out, "Report JSON")->required();
  m->add_option("--csv", measure.csv, "Report CSV");
  m->add_option("--sim-mode", measure.sim_mode)->capture_default_str();
  m->add_option("--jobs", measure.jobs)->capture_default_str();

  GenerateArgs generate;
  auto* g = app.add_subcommand("generate",
                               "Generate a synthetic dataset from a bundle");
  g->add_option("--bundle", generate.bundle)->required();
  g->add_option("--backend", generate.backend)->capture_default_str();
  g->add_option("--out", generate.out, "Dataset directory")->required();
  g->add_option("--count", generate.count, "Samples per class")
      ->capture_default_str();
  g->add_option("--detection-count", generate.detection_count)
      ->capture_default_str();
  g->add_option("--width", generate.width)->capture_default_str();
  g->add_option("--height", generate.height)->capture_default_str();
  g->add_option("--synthetic-refs", generate.synthetic_refs,
                "Synthetic references per feature image")
      ->capture_default_str();
  g->add_option("--max-in-flight", generate.max_in_flight)
      ->capture_default_str();
  g->add_option("--seed", generate.seed)->capture_default_str();

  EvaluateArgs evaluate;
  auto* ev = app.add_subcommand(
      "evaluate", "Train on a synthetic dataset and score a test set");
  ev->add_option("--dataset", evaluate.dataset)->required();
  ev->add_option("--test", evaluate.test)->required();
  ev->add_option("--backend", evaluate.backend)->capture_default_str();
  ev->add_option("--out", evaluate.out, "Utility report JSON")->required();
  ev->add_option("--split", evaluate.split)->capture_default_str();
  ev->add_option("--epochs", evaluate.epochs, "0: task default")
      ->capture_default_str();
  ev->add_option("--seed", evaluate.seed)->capture_default_str();

  TradeoffArgs tradeoff;
  auto* t = app.add_subcommand(
      "tradeoff", "Privacy-utility table over several preferences");
  AddExperimentOptions(*t, tradeoff.common);
  t->add_option("--preferences", tradeoff.preferences,
                "e.g. \"t=L0,b=L0;t=L2,b=L0\"")
      ->required();

  NoiseSweepArgs sweep;
  auto* n = app.add_subcommand(
      "noise-sweep", "Privacy-utility table over noise levels");
  AddExperimentOptions(*n, sweep.common);
  n->add_option("--sigma", sweep.sigma, "Comma-separated sigmas")
      ->capture_default_str();
  n->add_option("--base", sweep.base, "Preference to add noise to")
      ->capture_default_str();
  n->add_option("--role", sweep.role, "Role key to perturb")
      ->capture_default_str();

  ServeArgs serve;
  auto* sv = app.add_subcommand("serve", "Run the job server");
  sv->add_option("--server-config", serve.server_config, "Server JSON config");
  sv->add_option("--listen", serve.listen, "host:port");
  sv->add_option("--data-dir", serve.data_dir);
  sv->add_option("--backend", serve.backend, "\"mock\" or http://host:port");
  sv->add_option("--workers", serve.workers);

  ConformanceArgs conformance;
  auto* cf = app.add_subcommand(
      "conformance", "Check a backend server against the protocol");
  cf->add_option("--backend", conformance.backend, "http://host:port")
      ->required();

  AuditArgs audit;
  auto* au = app.add_subcommand(
      "audit",
      "Search a directory for pixels of private images (exit 3 on findings)");
  au->add_option("--dir", audit.dir)->required();
  au->add_option("--images", audit.images, "Directory of private PNGs")
      ->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    CLI::App* target = &app;
    for (CLI::App* sub : app.get_subcommands()) target = sub;
    out << target->help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& error) {
    return Fail(MakeError(ErrorKind::kInvalidArgument, error.what()), err);
  }

  absl::Status status;
  if (c->parsed()) {
    status = MakeCorpusCommand(corpus, out);
  } else if (sg->parsed()) {
    status = SegmentCommand(segment, out);
  } else if (s->parsed()) {
    status = SanitizeCommand(sanitize, out);
  } else if (e->parsed()) {
    status = EmbedCommand(embed, out);
  } else if (m->parsed()) {
    status = MeasureCommand(measure, out);
  } else if (g->parsed()) {
    status = GenerateCommand(generate, out);
  } else if (ev->parsed()) {
    status = EvaluateCommand(evaluate, out);
  } else if (t->parsed()) {
    status = TradeoffCommand(tradeoff, out);
  } else if (n->parsed()) {
    status = NoiseSweepCommand(sweep, out);
  } else if (sv->parsed()) {
    status = ServeCommand(serve, out);
  } else if (cf->parsed()) {
    status = ConformanceCommand(conformance, out);
  } else if (au->parsed()) {
    auto code = AuditCommand(audit, out);
    if (!code.ok()) return Fail(code.status(), err);
    return *code;
  }
  if (!status.ok()) return Fail(status, err);
  return 0;
}

}  // namespace privsynth::cli
