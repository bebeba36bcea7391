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

// Acceptance checks for the primary pipeline. Prints one PASS/FAIL line per
// criterion and exits nonzero when any fails. Oracles here are written
// independently of the library code they check.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "absl/time/clock.h"
#include "absl/time/time.h"
#include "httplib.h"
#include "privsynth/cli/cli.h"
#include "privsynth/common/seed.h"
#include "privsynth/common/status.h"
#include "privsynth/experiment/corpus.h"
#include "privsynth/metrics/mutual_information.h"
#include "privsynth/mock/backends.h"
#include "privsynth/orchestrator/assemble.h"
#include "privsynth/orchestrator/plan.h"
#include "privsynth/orchestrator/prompts.h"
#include "privsynth/sanitizer/sanitize.h"
#include "privsynth/sanitizer/wire.h"
#include "privsynth/service/audit.h"
#include "privsynth/service/server.h"
#include "privsynth/utility/evaluate.h"
#include "privsynth/utility/metrics.h"

namespace privsynth {
namespace {

namespace fs = std::filesystem;
using imaging::PixelFormat;
using imaging::RasterImage;
using sanitizer::PrivacyPreference;
using sanitizer::SegmentRole;

// A failed check; the criterion's detail line.
struct Failure {
  std::string what;
};

void Require(bool ok, const std::string& what) {
  if (!ok) throw Failure{what};
}

template <typename T>
T Must(absl::StatusOr<T> value, const std::string& what) {
  if (!value.ok()) {
    throw Failure{absl::StrCat(what, ": ", value.status().ToString())};
  }
  return *std::move(value);
}

void Must(const absl::Status& status, const std::string& what) {
  if (!status.ok()) throw Failure{absl::StrCat(what, ": ", status.ToString())};
}

fs::path ScratchDir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() /
                 absl::StrCat("privsynth_acceptance_", getpid()) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

experiment::Corpus MakeCorpus(sanitizer::TaskKind task, int n, int size,
                              uint64_t seed, int test_images = 1) {
  experiment::CorpusOptions options;
  options.task = task;
  options.reference_images = n;
  options.test_images = test_images;
  options.width = size;
  options.height = size;
  options.seed = seed;
  return Must(experiment::MakeCorpus(options), "corpus");
}

sanitizer::SanitizedBundle Bundle(const experiment::Corpus& corpus,
                                  const std::string& preference) {
  const PrivacyPreference pref =
      Must(PrivacyPreference::Parse(preference), preference);
  return Must(sanitizer::BuildBundle(corpus.request, corpus.images,
                                     corpus.manifest, pref, {}),
              preference);
}

metrics::ReferenceSet Refs(const experiment::Corpus& corpus) {
  return Must(metrics::ReferenceSet::Build(corpus.request, corpus.images,
                                           corpus.manifest),
              "reference set");
}

double MeanMi(const experiment::Corpus& corpus,
              const metrics::ReferenceSet& refs, const std::string& preference,
              SegmentRole role) {
  return Must(metrics::NormalizedMi(refs, Bundle(corpus, preference), role),
              preference);
}

// Joint-count MI from pair tallies and the textbook formula.
double OracleMiBits(const RasterImage& a, const RasterImage& b) {
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> pa, pb;
  const double n = static_cast<double>(a.pixel_count());
  for (int y = 0; y < a.height(); ++y) {
    for (int x = 0; x < a.width(); ++x) {
      joint[{a.at(x, y), b.at(x, y)}] += 1.0 / n;
      pa[a.at(x, y)] += 1.0 / n;
      pb[b.at(x, y)] += 1.0 / n;
    }
  }
  double mi = 0.0;
  for (const auto& [uv, p] : joint) {
    mi += p * std::log2(p / (pa[uv.first] * pb[uv.second]));
  }
  return mi;
}

// Precision-recall oracle: every ranking prefix rebuilds its matching from
// scratch; AP integrates the precision envelope over the distinct recalls.
double OracleMap50(const std::vector<std::vector<utility::Detection>>& det,
                   const std::vector<std::vector<utility::GroundTruthBox>>& gt) {
  auto iou = [](const utility::BBox& a, const utility::BBox& b) {
    const double ix = std::max(0.0, std::min(a.x + a.w, b.x + b.w) -
                                        std::max(a.x, b.x));
    const double iy = std::max(0.0, std::min(a.y + a.h, b.y + b.h) -
                                        std::max(a.y, b.y));
    const double inter = ix * iy;
    const double uni = a.w * a.h + b.w * b.h - inter;
    return uni > 0 ? inter / uni : 0.0;
  };
  std::set<int> classes;
  for (const auto& boxes : gt) {
    for (const auto& b : boxes) classes.insert(b.class_id);
  }
  double total = 0.0;
  for (int cls : classes) {
    std::vector<std::tuple<double, size_t, size_t, utility::BBox>> ranked;
    size_t order = 0;
    for (size_t i = 0; i < det.size(); ++i) {
      for (const auto& d : det[i]) {
        if (d.class_id == cls) ranked.push_back({-d.confidence, order, i, d.bbox});
        ++order;
      }
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      return std::tie(std::get<0>(a), std::get<1>(a)) <
             std::tie(std::get<0>(b), std::get<1>(b));
    });
    double positives = 0;
    for (const auto& boxes : gt) {
      for (const auto& b : boxes) positives += b.class_id == cls ? 1 : 0;
    }
    std::vector<std::pair<double, double>> points;
    for (size_t k = 1; k <= ranked.size(); ++k) {
      std::set<std::pair<size_t, size_t>> used;
      double tp = 0;
      for (size_t j = 0; j < k; ++j) {
        const size_t image = std::get<2>(ranked[j]);
        int best = -1;
        double best_iou = -1;
        for (size_t g = 0; g < gt[image].size(); ++g) {
          if (gt[image][g].class_id != cls || used.count({image, g})) continue;
          const double v = iou(std::get<3>(ranked[j]), gt[image][g].bbox);
          if (v > best_iou) {
            best_iou = v;
            best = static_cast<int>(g);
          }
        }
        if (best >= 0 && best_iou >= 0.5) {
          used.insert({image, static_cast<size_t>(best)});
          ++tp;
        }
      }
      points.push_back({tp / positives, tp / static_cast<double>(k)});
    }
    std::set<double> recalls;
    for (const auto& p : points) recalls.insert(p.first);
    double ap = 0.0, prev = 0.0;
    for (double r : recalls) {
      if (r <= 0) continue;
      double envelope = 0.0;
      for (const auto& p : points) {
        if (p.first >= r) envelope = std::max(envelope, p.second);
      }
      ap += (r - prev) * envelope;
      prev = r;
    }
    total += ap;
  }
  return total / static_cast<double>(classes.size());
}

// ------------------------------------------------------------- criteria

std::string L0ZeroLeakage() {
  int runs = 0;
  for (auto task : {sanitizer::TaskKind::kClassification,
                    sanitizer::TaskKind::kDetection}) {
    for (uint64_t seed : {1, 2, 3}) {
      const auto corpus = MakeCorpus(task, 20, 48, seed);
      const auto refs = Refs(corpus);
      for (SegmentRole role : sanitizer::RolesFor(corpus.request)) {
        const double mi = MeanMi(corpus, refs, "t=L0,b=L0", role);
        Require(mi == 0.0, absl::StrCat("MI ", mi, " for seed ", seed));
        ++runs;
      }
    }
  }
  return absl::StrCat(runs, " corpus/role pairs at exactly 0");
}

std::string MiOracle() {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> level(0, 255);
  std::uniform_int_distribution<int> small(0, 5);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    RasterImage a(8, 8, PixelFormat::kGray8), b(8, 8, PixelFormat::kGray8);
    // Alternate full-range and few-level images so joint cells repeat.
    for (size_t i = 0; i < a.pixel_count(); ++i) {
      a.mutable_samples()[i] = static_cast<uint8_t>(
          trial % 2 ? level(rng) : 40 * small(rng));
      b.mutable_samples()[i] = static_cast<uint8_t>(
          trial % 2 ? level(rng) : 40 * small(rng));
    }
    const double got = Must(metrics::ImageMiBits(a, b), "image_mi_bits");
    worst = std::max(worst, std::abs(got - OracleMiBits(a, b)));
  }
  Require(worst <= 1e-12, absl::StrCat("max error ", worst));
  return absl::StrFormat("1000 pairs, max |error| %.3g bits", worst);
}

// Normalized MI per image, where the bundle rendering equals the raw canvas.
std::string SelfInformation() {
  const auto corpus =
      MakeCorpus(sanitizer::TaskKind::kClassification, 20, 48, 5);
  const auto refs = Refs(corpus);
  double worst = 0.0;
  int images = 0;
  const std::pair<const char*, SegmentRole> cases[] = {
      {"t=L2,b=L0", SegmentRole::Target(0)},
      {"t=L0,b=L2", SegmentRole::Background()}};
  for (const auto& [pref, role] : cases) {
    const auto bundle = Bundle(corpus, pref);
    for (size_t i = 0; i < refs.entries.size(); ++i) {
      metrics::ReferenceSet one{refs.request, {refs.entries[i]}};
      sanitizer::SanitizedBundle single = bundle;
      single.entries = {bundle.entries[i]};
      const RasterImage rendered =
          Must(sanitizer::RenderBundleCanvas(single.entries[0]), "render");
      Require(rendered == refs.entries[i].canvases.at(role),
              "rendering differs from the raw canvas");
      const double mi = Must(metrics::NormalizedMi(one, single, role), pref);
      worst = std::max(worst, std::abs(mi - 1.0));
      ++images;
    }
  }
  Require(worst <= 1e-9, absl::StrCat("max |MI - 1| ", worst));
  return absl::StrFormat("%d images, max |MI - 1| %.3g", images, worst);
}

std::string Monotonicity() {
  const auto corpus =
      MakeCorpus(sanitizer::TaskKind::kClassification, 20, 64, 11);
  const auto refs = Refs(corpus);
  const SegmentRole t = SegmentRole::Target(0);
  const double l0 = MeanMi(corpus, refs, "t=L0,b=L0", t);
  const double l1 = MeanMi(corpus, refs, "t=L1:canny,b=L0", t);
  const double l2 = MeanMi(corpus, refs, "t=L2,b=L0", t);
  const std::string values =
      absl::StrFormat("MI_t L0 %.6f, L1 %.6f, L2 %.6f", l0, l1, l2);
  Require(l0 <= l1 && l1 <= l2 && l0 < l2, values);
  return values;
}

std::string NoiseSweep() {
  // At 64x64 the plug-in estimator's upward bias (more occupied joint cells
  // under heavy noise) can outweigh the loss of signal; 128x128 keeps it
  // small.
  const auto corpus =
      MakeCorpus(sanitizer::TaskKind::kClassification, 20, 128, 12);
  const auto refs = Refs(corpus);
  std::vector<double> mi;
  for (int sigma : {5, 10, 50}) {
    mi.push_back(MeanMi(corpus, refs, absl::StrCat("t=L2@", sigma, ",b=L0"),
                        SegmentRole::Target(0)));
  }
  const std::string values = absl::StrFormat(
      "MI_t sigma 5 %.6f, 10 %.6f, 50 %.6f", mi[0], mi[1], mi[2]);
  Require(mi[0] >= mi[1] && mi[1] >= mi[2], values);
  return values;
}

std::string Map50Oracle() {
  using utility::Detection;
  using utility::GroundTruthBox;
  std::mt19937_64 rng(99);
  auto coord = [&rng] { return 4.0 * static_cast<double>(rng() % 6); };
  auto extent = [&rng] { return 4.0 * static_cast<double>(1 + rng() % 4); };
  double worst = 0.0;
  for (int instance = 0; instance < 500; ++instance) {
    const size_t images = 1 + rng() % 3;
    const int classes = 1 + static_cast<int>(rng() % 3);
    std::vector<std::vector<GroundTruthBox>> gt(images);
    std::vector<std::vector<Detection>> det(images);
    const size_t gt_count = 1 + rng() % 6;
    for (size_t k = 0; k < gt_count; ++k) {
      gt[rng() % images].push_back({static_cast<int>(rng() % classes),
                                    {coord(), coord(), extent(), extent()}});
    }
    const size_t det_count = rng() % 7;
    for (size_t k = 0; k < det_count; ++k) {
      // Half the detections copy a ground-truth box so hits are common.
      const size_t image = rng() % images;
      utility::BBox box{coord(), coord(), extent(), extent()};
      int cls = static_cast<int>(rng() % classes);
      if (rng() % 2 == 0 && !gt[image].empty()) {
        const auto& g = gt[image][rng() % gt[image].size()];
        box = g.bbox;
        cls = g.class_id;
      }
      det[image].push_back(
          {box, cls, static_cast<double>(1 + rng() % 5) / 5.0});
    }
    const double got = Must(utility::Map50(det, gt), "map50");
    worst = std::max(worst, std::abs(got - OracleMap50(det, gt)));
  }
  Require(worst <= 1e-9, absl::StrCat("max error ", worst));

  // Ranked hit (0.9), miss (0.8), hit (0.7) against two ground-truth boxes.
  const std::vector<std::vector<GroundTruthBox>> gt = {
      {{0, {0, 0, 10, 10}}, {0, {20, 20, 10, 10}}}};
  const std::vector<std::vector<Detection>> det = {{{{0, 0, 10, 10}, 0, 0.9},
                                                    {{50, 50, 10, 10}, 0, 0.8},
                                                    {{20, 20, 10, 10}, 0, 0.7}}};
  const double example = Must(utility::Map50(det, gt), "worked example");
  Require(example == 5.0 / 6.0, absl::StrFormat("worked example %.17g", example));
  return absl::StrFormat("500 instances, max |error| %.3g; example = 5/6",
                         worst);
}

std::string PromptsAndSplit() {
  sanitizer::UserRequest request;
  request.target_objects = {"dog"};
  request.background = "a backyard";
  request.training_objective = "monitor my dog's status";
  request.label_classes = {"eating", "sitting", "sleeping", "playing"};
  const orchestrator::PromptSet prompts = orchestrator::BuildPrompts(request);
  Require(prompts.targets.size() == 4, "prompt count");
  for (size_t i = 0; i < 4; ++i) {
    const std::string want = "a dog is " + request.label_classes[i];
    Require(prompts.targets[i].text == want,
            absl::StrCat("prompt ", i, ": ", prompts.targets[i].text));
  }
  mock::MockGenerationBackend backend;
  orchestrator::AssembleOptions options;
  options.count_per_class = 400;
  options.width = 16;
  options.height = 16;
  options.seed = 3;
  const auto dataset = Must(
      orchestrator::AssembleDataset(request, {}, backend, options), "assemble");
  Require(dataset.samples.size() == 1600,
          absl::StrCat(dataset.samples.size(), " samples"));
  Require(dataset.ClassCounts() == std::vector<size_t>(4, 400),
          "class balance");
  const auto split =
      Must(utility::SplitDataset(dataset, 0.8, 17), "split");
  Require(split.first.samples.size() == 1280 &&
              split.second.samples.size() == 320,
          absl::StrCat("split ", split.first.samples.size(), "/",
                       split.second.samples.size()));
  Require(split.first.ClassCounts() == std::vector<size_t>(4, 320) &&
              split.second.ClassCounts() == std::vector<size_t>(4, 80),
          "split is not stratified");
  return "4 prompts, 1600 = 4 x 400 samples, split 1280/320 (320/80 per "
         "class)";
}

std::string PlanTable() {
  using orchestrator::FineTuneStrategy;
  const auto corpus =
      MakeCorpus(sanitizer::TaskKind::kClassification, 4, 32, 8);
  // No payload: stock model. Feature images: synthesize references, then
  // tune. Raw segments: tune on them.
  const FineTuneStrategy by_level[] = {
      FineTuneStrategy::kPretrainedOnly,
      FineTuneStrategy::kFeatureConditionedThenFinetune,
      FineTuneStrategy::kFinetuneOnRaw};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const std::string pref = absl::StrCat("t=L", i, ",b=L", j);
      const auto plan =
          Must(orchestrator::PlanFineTune(Bundle(corpus, pref)), pref);
      Require(plan.StrategyFor(SegmentRole::Target(0)) == by_level[i] &&
                  plan.StrategyFor(SegmentRole::Background()) == by_level[j],
              absl::StrCat(pref, " maps to the wrong strategies"));
    }
  }
  return "9 of 9 combinations";
}

std::string EndToEndTradeoff() {
  const fs::path dir = ScratchDir("e2e");
  std::ostringstream out, err;
  auto run = [&](const std::vector<std::string>& args) {
    out.str("");
    err.str("");
    Require(cli::RunCli(args, out, err) == 0, err.str());
  };
  run({"make-corpus", "--out", (dir / "corpus").string(), "--seed", "4"});
  // Command-line defaults: 400 samples per class at 128x128, with training.
  run({"tradeoff", "--corpus", (dir / "corpus").string(), "--backend", "mock",
       "--preferences", "t=L0,b=L0;t=L2,b=L0;t=L2,b=L2", "--out",
       (dir / "table.csv").string()});
  std::vector<std::string> lines =
      absl::StrSplit(out.str(), '\n', absl::SkipEmpty());
  Require(lines.size() == 4, absl::StrCat(lines.size() - 1, " rows"));
  Require(lines[0] == "preference,MI_t,MI_b,SIM_t,SIM_b,utility", lines[0]);
  // Rows: "pref",MI_t,MI_b,SIM_t,SIM_b,utility.
  std::vector<std::vector<double>> v;
  for (size_t i = 1; i < lines.size(); ++i) {
    const std::string numbers = lines[i].substr(lines[i].rfind('"') + 2);
    std::vector<double> row;
    for (absl::string_view cell : absl::StrSplit(numbers, ',')) {
      double x = 0;
      Require(absl::SimpleAtod(cell, &x), lines[i]);
      row.push_back(x);
    }
    v.push_back(row);
  }
  const double sim_t_l0 = v[0][2], sim_t_l2 = v[1][2];
  const double mi_b_l0 = v[1][1], mi_b_l2 = v[2][1];
  const std::string detail = absl::StrFormat(
      "SIM_t %.4f -> %.4f, MI_b %.4f -> %.4f", sim_t_l0, sim_t_l2, mi_b_l0,
      mi_b_l2);
  Require(sim_t_l2 > sim_t_l0 && v[2][2] > sim_t_l0, detail);
  Require(mi_b_l2 > mi_b_l0 && mi_b_l2 > v[0][1], detail);
  return detail;
}

// Runs one job through a fresh server and audits its data directory.
service::AuditReport AuditJob(const fs::path& dir,
                              const experiment::Corpus& corpus,
                              const std::string& preference) {
  service::ServiceConfig config;
  config.port = 0;
  config.data_dir = dir;
  config.workers = 1;
  auto server = Must(service::Server::Create(config), "server");
  Must(server->Start(), "start");
  const std::string body =
      Must(sanitizer::SerializeBundle(Bundle(corpus, preference)), "bundle");
  httplib::Client client("127.0.0.1", server->port());
  auto res = client.Post(
      "/v1/jobs?count_per_class=20&width=48&height=48&epochs=2", body,
      "application/json");
  Require(res && res->status == 202, "job submission");
  const std::string id =
      nlohmann::json::parse(res->body)["id"].get<std::string>();
  const service::Job job =
      Must(server->WaitForJob(id, absl::Seconds(60)), "job");
  server->Stop();
  Require(job.state == service::JobState::kDone,
          absl::StrCat("job ended ", ToStd(service::JobStateName(job.state))));
  Require(job.artifacts.size() == 3, "artifact count");
  std::vector<RasterImage> private_images;
  for (const auto& ref : corpus.images) private_images.push_back(ref.image);
  return Must(service::AuditPrivatePixels(dir, private_images), "audit");
}

std::string L0Audit() {
  const auto corpus =
      MakeCorpus(sanitizer::TaskKind::kClassification, 8, 48, 13);
  const service::AuditReport l0 =
      AuditJob(ScratchDir("audit_l0"), corpus, "t=L0,b=L0");
  Require(l0.embedded_images > 0, "audit found no images to inspect");
  Require(l0.clean(), absl::StrCat(l0.findings.size(), " findings, first: ",
                                   l0.findings.empty()
                                       ? ""
                                       : l0.findings[0].file.string()));
  // Control: the same audit does see raw pixels when they are shared.
  const service::AuditReport l2 =
      AuditJob(ScratchDir("audit_l2"), corpus, "t=L2,b=L2");
  Require(!l2.clean(), "control job with raw segments was not flagged");
  return absl::StrFormat(
      "%d files, %d embedded images, 0 findings (raw-segment control: %d)",
      l0.files_scanned, l0.embedded_images, l2.findings.size());
}

struct Criterion {
  const char* name;
  absl::Duration budget;
  std::function<std::string()> check;
};

}  // namespace
}  // namespace privsynth

int main() {
  using privsynth::Criterion;
  using absl::Seconds;
  const Criterion criteria[] = {
      {"l0_zero_leakage", Seconds(1), privsynth::L0ZeroLeakage},
      {"mi_oracle_equivalence", Seconds(5), privsynth::MiOracle},
      {"self_information", Seconds(1), privsynth::SelfInformation},
      {"sanitization_monotonicity", Seconds(30), privsynth::Monotonicity},
      {"noise_sweep_trend", Seconds(30), privsynth::NoiseSweep},
      {"map50_oracle_equivalence", Seconds(10), privsynth::Map50Oracle},
      {"prompt_dataset_structure", Seconds(10), privsynth::PromptsAndSplit},
      {"fine_tune_plan_table", Seconds(1), privsynth::PlanTable},
      {"end_to_end_mock_tradeoff", Seconds(120), privsynth::EndToEndTradeoff},
      {"l0_data_minimization_audit", Seconds(10), privsynth::L0Audit},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const absl::Time start = absl::Now();
    std::string detail;
    bool ok = true;
    try {
      detail = c.check();
    } catch (const privsynth::Failure& f) {
      ok = false;
      detail = f.what;
    }
    const absl::Duration took = absl::Now() - start;
    if (ok && took > c.budget) {
      ok = false;
      detail = absl::StrCat(detail, "; over budget of ",
                            absl::FormatDuration(c.budget));
    }
    failed += ok ? 0 : 1;
    std::printf("%s %s (%s) [%s]\n", ok ? "PASS" : "FAIL", c.name,
                detail.c_str(),
                absl::FormatDuration(absl::Trunc(took, absl::Milliseconds(1)))
                    .c_str());
    std::fflush(stdout);
  }
  std::error_code ec;
  std::filesystem::remove_all(
      std::filesystem::temp_directory_path() /
          absl::StrCat("privsynth_acceptance_", getpid()),
      ec);
  std::printf("%d of %zu criteria passed\n",
              static_cast<int>(std::size(criteria)) - failed,
              std::size(criteria));
  return failed == 0 ? 0 : 1;
}
