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

#include "privsynth/experiment/harness.h"

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "privsynth/common/seed.h"
#include "privsynth/common/status.h"
#include "privsynth/orchestrator/prompts.h"

namespace privsynth::experiment {

using sanitizer::PrivacyPreference;
using sanitizer::SegmentRole;

namespace {

std::string Cell(std::optional<double> v) {
  return v.has_value() ? absl::StrFormat("%.6f", *v) : "";
}

std::string Quote(const std::string& s) {
  return absl::StrCat("\"", s, "\"");
}

}  // namespace

absl::StatusOr<metrics::EmbeddingTable> EmbedRun(
    const metrics::ReferenceSet& refs,
    const orchestrator::SyntheticDataset& dataset,
    metrics::EmbeddingProvider& embedder) {
  const auto& request = refs.request;
  const int tc = request.target_count();
  metrics::EmbeddingTable table;
  for (const auto& entry : refs.entries) {
    for (const auto& [role, canvas] : entry.canvases) {
      PRIVSYNTH_ASSIGN_OR_RETURN(table[absl::StrCat(
                                     "private/", sanitizer::RoleKey(role, tc),
                                     "/", entry.name)],
                                 embedder.EmbedImage(canvas));
    }
  }
  for (size_t i = 0; i < dataset.samples.size(); ++i) {
    for (SegmentRole role : sanitizer::RolesFor(request)) {
      const imaging::RasterImage canvas =
          orchestrator::SampleRoleCanvas(dataset.samples[i], role);
      PRIVSYNTH_ASSIGN_OR_RETURN(
          table[absl::StrFormat("synthetic/%s/%05d",
                                sanitizer::RoleKey(role, tc), i)],
          embedder.EmbedImage(canvas));
    }
  }
  for (SegmentRole role : sanitizer::RolesFor(request)) {
    PRIVSYNTH_ASSIGN_OR_RETURN(
        table[absl::StrCat("prompt/", sanitizer::RoleKey(role, tc))],
        embedder.EmbedText(orchestrator::RolePrompt(role, request)));
  }
  PRIVSYNTH_ASSIGN_OR_RETURN(table["prompt/empty"], embedder.EmbedText(""));
  return table;
}

absl::StatusOr<TradeoffRow> RunPreference(const ExperimentInputs& inputs,
                                          const PrivacyPreference& pref,
                                          const Backends& backends,
                                          const HarnessOptions& options) {
  if (backends.generation == nullptr || backends.embedding == nullptr) {
    return MakeError(ErrorKind::kInvalidArgument,
                     "experiment needs generation and embedding backends");
  }
  sanitizer::SanitizeOptions sanitize = options.sanitize;
  sanitize.seed = options.seed;
  sanitize.parallelism = options.parallelism;
  if (sanitize.feature_service == nullptr) {
    sanitize.feature_service = backends.features;
  }
  PRIVSYNTH_ASSIGN_OR_RETURN(
      sanitizer::SanitizedBundle bundle,
      sanitizer::BuildBundle(inputs.request, inputs.images, inputs.manifest,
                             pref, sanitize));
  PRIVSYNTH_ASSIGN_OR_RETURN(
      metrics::ReferenceSet refs,
      metrics::ReferenceSet::Build(inputs.request, inputs.images,
                                   inputs.manifest));

  orchestrator::GenerateOptions generate = options.generate;
  generate.assemble.seed = DeriveSeed(options.seed, {0x6E});
  PRIVSYNTH_ASSIGN_OR_RETURN(
      orchestrator::GenerationResult generated,
      orchestrator::GenerateFromBundle(bundle, *backends.generation, generate));

  PRIVSYNTH_ASSIGN_OR_RETURN(
      metrics::EmbeddingTable table,
      EmbedRun(refs, generated.dataset, *backends.embedding));
  PRIVSYNTH_ASSIGN_OR_RETURN(metrics::ReportInputs report_inputs,
                             metrics::GroupEmbeddings(table, inputs.request));
  report_inputs.sim_mode = options.sim_mode;
  report_inputs.mi.parallelism = options.parallelism;

  TradeoffRow row;
  row.synthetic_samples = generated.dataset.samples.size();
  PRIVSYNTH_ASSIGN_OR_RETURN(
      row.privacy, metrics::ComputePrivacyReport(refs, bundle, report_inputs));

  if (options.evaluate_utility && !inputs.test_set.samples.empty()) {
    if (backends.training == nullptr) {
      return MakeError(ErrorKind::kInvalidArgument,
                       "utility evaluation needs a training backend");
    }
    PRIVSYNTH_ASSIGN_OR_RETURN(
        auto split, utility::SplitDataset(generated.dataset,
                                          options.train_fraction,
                                          DeriveSeed(options.seed, {0x5B})));
    const Json config = options.training_config.value_or(
        utility::DefaultTrainingConfig(inputs.request.task_kind));
    PRIVSYNTH_ASSIGN_OR_RETURN(
        row.utility,
        utility::RunUtility(split.first, split.second, inputs.test_set,
                            *backends.training, config,
                            options.train_fraction));
  }
  return row;
}

absl::StatusOr<std::vector<TradeoffRow>> RunTradeoff(
    const ExperimentInputs& inputs,
    const std::vector<PrivacyPreference>& preferences,
    const Backends& backends, const HarnessOptions& options) {
  std::vector<TradeoffRow> rows;
  for (const auto& pref : preferences) {
    auto row = RunPreference(inputs, pref, backends, options);
    if (!row.ok()) {
      return Annotate(row.status(),
                      absl::StrCat("preference ", pref.Format()));
    }
    rows.push_back(*std::move(row));
  }
  return rows;
}

absl::StatusOr<std::vector<PrivacyPreference>> NoiseSweepPreferences(
    const PrivacyPreference& base, SegmentRole role,
    const std::vector<double>& sigmas) {
  const sanitizer::SanitizationLevel* level = base.Find(role);
  if (level == nullptr || level->level == sanitizer::Level::kL0) {
    return MakeError(ErrorKind::kInvalidArgument,
                     "noise sweep needs an L1 or L2 level on the swept role");
  }
  std::vector<PrivacyPreference> out;
  for (double sigma : sigmas) {
    PrivacyPreference pref = base;
    // One noise seed for every sigma: the draws are shared and only scaled.
    pref.levels[role].noise = imaging::NoiseParams{sigma, 0};
    PRIVSYNTH_RETURN_IF_ERROR(pref.levels[role].Validate());
    out.push_back(std::move(pref));
  }
  return out;
}

std::string TradeoffTableCsv(const std::vector<TradeoffRow>& rows,
                             const sanitizer::UserRequest& request) {
  const int tc = request.target_count();
  std::vector<std::string> keys;
  for (SegmentRole role : sanitizer::RolesFor(request)) {
    keys.push_back(sanitizer::RoleKey(role, tc));
  }
  std::vector<std::string> header = {"preference"};
  for (const auto& k : keys) header.push_back("MI_" + k);
  for (const auto& k : keys) header.push_back("SIM_" + k);
  header.push_back("utility");
  std::string out = absl::StrCat(absl::StrJoin(header, ","), "\n");
  for (const auto& row : rows) {
    std::vector<std::string> cells = {Quote(row.privacy.preference)};
    for (const auto& k : keys) {
      const auto* leak = row.privacy.Find(k);
      cells.push_back(leak ? Cell(leak->mi) : "");
    }
    for (const auto& k : keys) {
      const auto* leak = row.privacy.Find(k);
      cells.push_back(leak ? Cell(leak->sim) : "");
    }
    cells.push_back(row.utility ? Cell(row.utility->value) : "");
    absl::StrAppend(&out, absl::StrJoin(cells, ","), "\n");
  }
  return out;
}

std::string PlotDataCsv(const std::vector<TradeoffRow>& rows) {
  std::string out = "preference,role,metric,value\n";
  for (const auto& row : rows) {
    const std::string pref = Quote(row.privacy.preference);
    for (const auto& leak : row.privacy.roles) {
      absl::StrAppend(&out, pref, ",", leak.role, ",mi,", Cell(leak.mi), "\n");
      if (leak.sim) {
        absl::StrAppend(&out, pref, ",", leak.role, ",sim,", Cell(leak.sim),
                        "\n");
      }
      if (leak.prompt) {
        absl::StrAppend(&out, pref, ",", leak.role, ",prompt_sim,",
                        Cell(leak.prompt->value), "\n");
        absl::StrAppend(&out, pref, ",", leak.role, ",prompt_baseline,",
                        Cell(leak.prompt->baseline), "\n");
      }
    }
    if (row.utility) {
      absl::StrAppend(&out, pref, ",,", row.utility->metric, ",",
                      Cell(row.utility->value), "\n");
    }
  }
  return out;
}

Json TradeoffToJson(const std::vector<TradeoffRow>& rows) {
  Json list = Json::array();
  std::vector<metrics::PrivacyReport> reports;
  for (const auto& row : rows) {
    Json roles = Json::object();
    for (const auto& leak : row.privacy.roles) {
      Json r = {{"text", leak.text}, {"mi", leak.mi}};
      r["sim"] = leak.sim ? Json(*leak.sim) : Json(nullptr);
      r["prompt_sim"] = leak.prompt ? Json(leak.prompt->value) : Json(nullptr);
      r["prompt_baseline"] =
          leak.prompt ? Json(leak.prompt->baseline) : Json(nullptr);
      roles[leak.role] = r;
    }
    list.push_back(
        {{"preference", row.privacy.preference},
         {"roles", roles},
         {"synthetic_samples", row.synthetic_samples},
         {"utility", row.utility ? utility::UtilityReportToJson(*row.utility)
                                 : Json(nullptr)}});
  }
  return Json{{"rows", list}};
}

}  // namespace privsynth::experiment
