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

#ifndef PRIVSYNTH_METRICS_REPORT_H_
#define PRIVSYNTH_METRICS_REPORT_H_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "privsynth/common/json_util.h"
#include "privsynth/metrics/embedding.h"
#include "privsynth/metrics/mutual_information.h"
#include "privsynth/sanitizer/sanitize.h"

namespace privsynth::metrics {

struct RoleEmbeddings {
  std::vector<EmbeddingVector> private_images;
  std::vector<EmbeddingVector> synthetic_images;
  std::optional<EmbeddingVector> prompt;
};

struct ReportInputs {
  std::map<sanitizer::SegmentRole, RoleEmbeddings> embeddings;
  std::optional<EmbeddingVector> empty_prompt;
  SimMode sim_mode = SimMode::kAllPairs;
  MiOptions mi;
};

// Groups an embedding table by naming convention:
//   private/<role>/<file>, synthetic/<role>/<file>, prompt/<role>,
//   prompt/empty
// where <role> is a role key of `request` ("t", "t1", "b", ...).
absl::StatusOr<ReportInputs> GroupEmbeddings(
    const EmbeddingTable& table, const sanitizer::UserRequest& request);

struct RoleLeakage {
  std::string role;
  std::string text;
  double mi = 0.0;
  // Absent when the inputs carry no embeddings for the role.
  std::optional<double> sim;
  std::optional<PromptSimilarity> prompt;
};

struct PrivacyReport {
  std::string preference;
  std::vector<RoleLeakage> roles;

  const RoleLeakage* Find(std::string_view role_key) const;
};

absl::StatusOr<PrivacyReport> ComputePrivacyReport(
    const ReferenceSet& refs, const sanitizer::SanitizedBundle& bundle,
    const ReportInputs& inputs);

// {"records": [{"preference", "role", "text", "mi", "sim", "prompt_sim",
//               "prompt_baseline"}, ...]}, with null for absent values.
Json PrivacyReportsToJson(const std::vector<PrivacyReport>& reports);
// Same records as a flat CSV table with a header row.
std::string PrivacyReportsToCsv(const std::vector<PrivacyReport>& reports);

}  // namespace privsynth::metrics

#endif  // PRIVSYNTH_METRICS_REPORT_H_
