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

#include "privsynth/orchestrator/prompts.h"

#include "absl/strings/str_cat.h"
#include "absl/strings/str_replace.h"

namespace privsynth::orchestrator {

std::string FillTemplate(const std::string& templ, const std::string& target,
                         const std::string& label_class) {
  return absl::StrReplaceAll(templ,
                             {{"{target}", target}, {"{class}", label_class}});
}

PromptSet BuildPrompts(const sanitizer::UserRequest& request) {
  PromptSet prompts;
  prompts.background = request.background;
  for (int t = 0; t < request.target_count(); ++t) {
    const std::string& target = request.target_objects[t];
    if (request.label_classes.empty()) {
      prompts.targets.push_back({absl::StrCat("a ", target), t, std::nullopt});
      continue;
    }
    for (size_t c = 0; c < request.label_classes.size(); ++c) {
      prompts.targets.push_back(
          {FillTemplate(request.prompt_template, target,
                        request.label_classes[c]),
           t, static_cast<int>(c)});
    }
  }
  return prompts;
}

std::string RolePrompt(sanitizer::SegmentRole role,
                       const sanitizer::UserRequest& request) {
  if (!role.is_target()) return request.background;
  return absl::StrCat("a ", request.target_objects[role.target_index]);
}

}  // namespace privsynth::orchestrator
