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

#ifndef PRIVSYNTH_ORCHESTRATOR_PROMPTS_H_
#define PRIVSYNTH_ORCHESTRATOR_PROMPTS_H_

#include <optional>
#include <string>
#include <vector>

#include "privsynth/sanitizer/request.h"

namespace privsynth::orchestrator {

struct TargetPrompt {
  std::string text;
  int target_index = 0;
  // Absent for class-less detection prompts.
  std::optional<int> class_index;
};

struct PromptSet {
  // Target-major, then class order.
  std::vector<TargetPrompt> targets;
  std::string background;
};

// Classification (and detection with classes): one prompt per target and
// class from the request template. Class-less detection: "a {target}".
PromptSet BuildPrompts(const sanitizer::UserRequest& request);

// Substitutes {target} and {class}.
std::string FillTemplate(const std::string& templ, const std::string& target,
                         const std::string& label_class);

// Class-free description of a role: "a {target}" or the background text.
std::string RolePrompt(sanitizer::SegmentRole role,
                       const sanitizer::UserRequest& request);

}  // namespace privsynth::orchestrator

#endif  // PRIVSYNTH_ORCHESTRATOR_PROMPTS_H_
