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

#include "privsynth/metrics/report.h"

#include "absl/strings/match.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_split.h"
#include "privsynth/common/status.h"

namespace privsynth::metrics {

using sanitizer::SegmentRole;

absl::StatusOr<ReportInputs> GroupEmbeddings(
    const EmbeddingTable& table, const sanitizer::UserRequest& request) {
  ReportInputs inputs;
  for (const auto& [name, vector] : table) {
    std::vector<std::string> parts = absl::StrSplit(name, '/');
    if (parts.size() == 2 && parts[0] == "prompt" && parts[1] == "empty") {
      inputs.empty_prompt = vector;
      continue;
    }
    const bool is_prompt = parts.size() == 2 && parts[0] == "prompt";
    const bool is_image = parts.size() >= 3 &&
                          (parts[0] == "private" || parts[0] == "synthetic");
    if (!is_prompt && !is_image) {
      return MakeError(ErrorKind::kSchemaViolation,
                       absl::StrCat("embedding '", name,
                                    "' does not follow private/<role>/<file>, "
                                    "synthetic/<role>/<file> or prompt/<role>"));
    }
    auto role = sanitizer::ParseRoleKey(parts[1]);
    if (!role.ok() || !sanitizer::ValidateRole(*role, request).ok()) {
      return MakeError(ErrorKind::kSchemaViolation,
                       absl::StrCat("embedding '", name, "': unknown role '",
                                    parts[1], "'"));
    }
    RoleEmbeddings& group = inputs.embeddings[*role];
    if (is_prompt) {
      group.prompt = vector;
    } else if (parts[0] == "private") {
      group.private_images.push_back(vector);
    } else {
      group.synthetic_images.push_back(vector);
    }
  }
  return inputs;
}

const RoleLeakage* PrivacyReport::Find(std::string_view role_key) const {
  for (const auto& role : roles) {
    if (role.role == role_key) return &role;
  }
  return nullptr;
}

absl::StatusOr<PrivacyReport> ComputePrivacyReport(
    const ReferenceSet& refs, const sanitizer::SanitizedBundle& bundle,
    const ReportInputs& inputs) {
  PrivacyReport report;
  report.preference = bundle.preference.Format();
  const int targets = bundle.request.target_count();
  for (SegmentRole role : sanitizer::RolesFor(bundle.request)) {
    RoleLeakage leakage;
    leakage.role = sanitizer::RoleKey(role, targets);
    leakage.text = sanitizer::RoleText(role, bundle.request);
    auto mi = NormalizedMi(refs, bundle, role, inputs.mi);
    if (!mi.ok()) {
      return Annotate(mi.status(), absl::StrCat("MI for role ", leakage.role));
    }
    leakage.mi = *mi;
    auto it = inputs.embeddings.find(role);
    if (it != inputs.embeddings.end()) {
      const RoleEmbeddings& group = it->second;
      if (!group.private_images.empty() && !group.synthetic_images.empty()) {
        auto sim = Sim(group.private_images, group.synthetic_images,
                       inputs.sim_mode);
        if (!sim.ok()) {
          return Annotate(sim.status(),
                          absl::StrCat("SIM for role ", leakage.role));
        }
        leakage.sim = *sim;
      }
      if (group.prompt.has_value() && inputs.empty_prompt.has_value() &&
          !group.private_images.empty()) {
        auto prompt = PromptSim(*group.prompt, group.private_images,
                                *inputs.empty_prompt);
        if (!prompt.ok()) {
          return Annotate(prompt.status(),
                          absl::StrCat("prompt SIM for role ", leakage.role));
        }
        leakage.prompt = *prompt;
      }
    }
    report.roles.push_back(std::move(leakage));
  }
  return report;
}

Json PrivacyReportsToJson(const std::vector<PrivacyReport>& reports) {
  Json records = Json::array();
  for (const auto& report : reports) {
    for (const auto& role : report.roles) {
      Json record = {{"preference", report.preference},
                     {"role", role.role},
                     {"text", role.text},
                     {"mi", role.mi},
                     {"sim", nullptr},
                     {"prompt_sim", nullptr},
                     {"prompt_baseline", nullptr}};
      if (role.sim.has_value()) record["sim"] = *role.sim;
      if (role.prompt.has_value()) {
        record["prompt_sim"] = role.prompt->value;
        record["prompt_baseline"] = role.prompt->baseline;
      }
      records.push_back(std::move(record));
    }
  }
  return Json{{"records", records}};
}

std::string PrivacyReportsToCsv(const std::vector<PrivacyReport>& reports) {
  auto number = [](const std::optional<double>& v) {
    return v.has_value() ? absl::StrFormat("%.6f", *v) : std::string();
  };
  std::string out = "preference,role,mi,sim,prompt_sim,prompt_baseline\n";
  for (const auto& report : reports) {
    for (const auto& role : report.roles) {
      std::optional<double> prompt_value;
      std::optional<double> prompt_baseline;
      if (role.prompt.has_value()) {
        prompt_value = role.prompt->value;
        prompt_baseline = role.prompt->baseline;
      }
      absl::StrAppend(&out, "\"", report.preference, "\",", role.role, ",",
                      number(role.mi), ",", number(role.sim), ",",
                      number(prompt_value), ",", number(prompt_baseline), "\n");
    }
  }
  return out;
}

}  // namespace privsynth::metrics
